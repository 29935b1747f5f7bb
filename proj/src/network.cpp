#include "oldf/network.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

#include "oldf/log.hpp"

namespace oldf {

namespace {

std::string join_ints(const std::vector<int>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ", ";
    out << v[i];
  }
  return out.str();
}

// Shared radiality scan over an abstract closed edge list.
struct EdgeRef {
  int id;
  int a;
  int b;
};

RadialCheck check_tree(int bus_count, const std::vector<EdgeRef>& closed) {
  RadialCheck result;
  if (bus_count < 1) {
    result.detail = "network has no buses";
    return result;
  }
  const int expected = bus_count - 1;
  if (static_cast<int>(closed.size()) != expected) {
    std::ostringstream out;
    out << "closed branch count " << closed.size() << " != bus count - 1 (" << expected << ")";
    result.detail = out.str();
    return result;
  }
  std::vector<std::vector<std::pair<int, int>>> adj(bus_count);  // (neighbor, id)
  for (const auto& e : closed) {
    if (e.a < 0 || e.a >= bus_count || e.b < 0 || e.b >= bus_count) {
      std::ostringstream out;
      out << "branch " << e.id << " references bus outside [0, " << bus_count - 1 << "]";
      result.detail = out.str();
      return result;
    }
    adj[e.a].emplace_back(e.b, e.id);
    adj[e.b].emplace_back(e.a, e.id);
  }
  std::vector<int> seen(bus_count, 0);
  std::vector<int> via(bus_count, -1);  // branch id used to reach a bus
  std::queue<int> queue;
  queue.push(0);
  seen[0] = 1;
  int reached = 1;
  std::vector<int> cycle_buses;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop();
    for (const auto& [v, id] : adj[u]) {
      if (id == via[u]) continue;  // don't walk back over the arrival edge
      if (seen[v]) {
        cycle_buses = {u, v};
      } else {
        seen[v] = 1;
        via[v] = id;
        ++reached;
        queue.push(v);
      }
    }
  }
  if (reached < bus_count) {
    std::vector<int> missing;
    for (int b = 0; b < bus_count; ++b)
      if (!seen[b]) missing.push_back(b);
    result.detail = "disconnected buses: {" + join_ints(missing) + "}";
    return result;
  }
  if (!cycle_buses.empty()) {
    result.detail = "cycle through buses {" + join_ints(cycle_buses) + "}";
    return result;
  }
  result.ok = true;
  return result;
}

template <typename BranchT>
std::vector<EdgeRef> closed_edges(const std::vector<BranchT>& branches,
                                  const std::set<int>& open_ids) {
  std::vector<EdgeRef> edges;
  edges.reserve(branches.size());
  for (const auto& b : branches)
    if (!open_ids.count(b.id)) edges.push_back({b.id, b.from, b.to});
  return edges;
}

// BFS from bus 0 assigning each closed branch its parent side; returns
// per-bus (parent bus, feeding branch id).
template <typename BranchT>
void orient_closed(int bus_count, std::vector<BranchT>& branches, const std::set<int>& open_ids) {
  std::vector<std::vector<std::pair<int, BranchT*>>> adj(bus_count);
  for (auto& b : branches) {
    if (open_ids.count(b.id)) continue;
    adj[b.from].emplace_back(b.to, &b);
    adj[b.to].emplace_back(b.from, &b);
  }
  std::vector<char> seen(bus_count, 0);
  std::queue<int> queue;
  queue.push(0);
  seen[0] = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop();
    for (auto& [v, branch] : adj[u]) {
      if (seen[v]) continue;
      seen[v] = 1;
      if (branch->to != v) std::swap(branch->from, branch->to);
      queue.push(v);
    }
  }
}

}  // namespace

const Branch* RadialNetwork::find_branch(int branch_id) const {
  for (const auto& b : branches)
    if (b.id == branch_id) return &b;
  return nullptr;
}

RadialCheck validate_radial(const RadialNetwork& network) {
  for (const auto& b : network.branches) {
    if (b.r < 0 || b.x < 0) {
      RadialCheck bad;
      std::ostringstream out;
      out << "branch " << b.id << " has negative impedance (r=" << b.r << ", x=" << b.x << ")";
      bad.detail = out.str();
      return bad;
    }
    if (b.r == 0 && b.x == 0 && !network.is_open(b.id))
      log_debug("branch " + std::to_string(b.id) + " has zero impedance (ideal switch)");
  }
  if (network.v0 <= 0) {
    RadialCheck bad;
    bad.detail = "substation squared voltage must be positive";
    return bad;
  }
  return check_tree(network.bus_count, closed_edges(network.branches, network.open_ids));
}

RadialNetwork oriented(const RadialNetwork& network) {
  RadialCheck check = validate_radial(network);
  if (!check.ok) throw InputError("network is not radial: " + check.detail);
  RadialNetwork out = network;
  orient_closed(out.bus_count, out.branches, out.open_ids);
  return out;
}

RadialNetwork apply_topology(const RadialNetwork& base, const TopologyConfig& cfg) {
  const std::set<int> switchable(base.switchable_ids.begin(), base.switchable_ids.end());
  for (int id : cfg.open_ids) {
    if (!switchable.count(id))
      throw InputError("cannot open branch " + std::to_string(id) + ": not switchable");
    if (cfg.closed_ids.count(id))
      throw InputError("branch " + std::to_string(id) + " appears in both open and closed sets");
  }
  for (int id : cfg.closed_ids)
    if (!switchable.count(id))
      throw InputError("cannot close branch " + std::to_string(id) + ": not switchable");

  RadialNetwork out = base;
  for (int id : cfg.open_ids) out.open_ids.insert(id);
  for (int id : cfg.closed_ids) out.open_ids.erase(id);
  RadialCheck check = validate_radial(out);
  if (!check.ok) throw InputError("topology change rejected: " + check.detail);
  orient_closed(out.bus_count, out.branches, out.open_ids);
  return out;
}

std::vector<TopologyConfig> enumerate_radial_configs(const RadialNetwork& base) {
  std::vector<int> ids = base.switchable_ids;
  std::sort(ids.begin(), ids.end());
  int open_count = 0;
  for (int id : ids)
    if (base.is_open(id)) ++open_count;
  const int k = static_cast<int>(ids.size());

  std::vector<TopologyConfig> valid;
  // Walk all C(k, open_count) assignments of which switchables stay open.
  std::vector<int> pick(open_count);
  auto emit = [&]() {
    std::set<int> open_set(pick.begin(), pick.end());
    TopologyConfig cfg;
    for (int id : ids) {
      const bool want_open = open_set.count(id) > 0;
      const bool is_open = base.is_open(id);
      if (want_open && !is_open) cfg.open_ids.insert(id);
      if (!want_open && is_open) cfg.closed_ids.insert(id);
    }
    RadialNetwork candidate = base;
    for (int id : cfg.open_ids) candidate.open_ids.insert(id);
    for (int id : cfg.closed_ids) candidate.open_ids.erase(id);
    if (validate_radial(candidate).ok) valid.push_back(std::move(cfg));
  };
  // Iterative k-choose-m enumeration in lexicographic order.
  std::vector<int> idx(open_count);
  for (int i = 0; i < open_count; ++i) idx[i] = i;
  if (open_count == 0) {
    emit();
    return valid;
  }
  for (;;) {
    for (int i = 0; i < open_count; ++i) pick[i] = ids[idx[i]];
    emit();
    int i = open_count - 1;
    while (i >= 0 && idx[i] == k - open_count + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < open_count; ++j) idx[j] = idx[j - 1] + 1;
  }
  return valid;
}

// ---------------------------------------------------------------------------
// NetworkIndex
// ---------------------------------------------------------------------------

NetworkIndex::NetworkIndex(const RadialNetwork& network) : bus_count_(network.bus_count) {
  RadialCheck check = validate_radial(network);
  if (!check.ok) throw InputError("network is not radial: " + check.detail);

  for (const auto& b : network.branches)
    if (!network.is_open(b.id)) closed_.push_back(b);
  std::sort(closed_.begin(), closed_.end(),
            [](const Branch& a, const Branch& b) { return a.id < b.id; });
  orient_closed(bus_count_, closed_, {});

  max_id_ = 0;
  for (const auto& b : closed_) max_id_ = std::max(max_id_, b.id);
  slot_of_id_.assign(max_id_ + 1, -1);
  for (int s = 0; s < static_cast<int>(closed_.size()); ++s) slot_of_id_[closed_[s].id] = s;

  parent_bus_.assign(bus_count_, -1);
  parent_slot_.assign(bus_count_, -1);
  child_slots_.assign(bus_count_, {});
  for (int s = 0; s < static_cast<int>(closed_.size()); ++s) {
    const Branch& b = closed_[s];
    parent_bus_[b.to] = b.from;
    parent_slot_[b.to] = s;
    child_slots_[b.from].push_back(s);
  }
  bfs_order_.reserve(bus_count_ - 1);
  std::queue<int> queue;
  queue.push(0);
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop();
    if (u != 0) bfs_order_.push_back(u);
    for (int s : child_slots_[u]) queue.push(closed_[s].to);
  }
}

int NetworkIndex::branch_slot(int branch_id) const {
  if (branch_id < 0 || branch_id > max_id_) return -1;
  return slot_of_id_[branch_id];
}

std::vector<int> NetworkIndex::path(int bus) const {
  std::vector<int> ids;
  for (int b = bus; b != 0; b = parent_bus_[b]) ids.push_back(closed_[parent_slot_[b]].id);
  std::reverse(ids.begin(), ids.end());
  return ids;
}

std::vector<int> NetworkIndex::downstream_buses(int branch_id) const {
  const int slot = branch_slot(branch_id);
  if (slot < 0) throw InputError("branch " + std::to_string(branch_id) + " is not closed");
  std::vector<int> buses;
  std::queue<int> queue;
  queue.push(closed_[slot].to);
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop();
    buses.push_back(u);
    for (int s : child_slots_[u]) queue.push(closed_[s].to);
  }
  std::sort(buses.begin(), buses.end());
  return buses;
}

Vec NetworkIndex::accumulate_downstream(const Vec& per_bus) const {
  Vec acc = Vec::Zero(closed_.size());
  // Leaf-to-root: children appear after parents in bfs_order_.
  for (auto it = bfs_order_.rbegin(); it != bfs_order_.rend(); ++it) {
    const int bus = *it;
    const int slot = parent_slot_[bus];
    acc[slot] += per_bus[bus - 1];
    const int parent = parent_bus_[bus];
    if (parent != 0) acc[parent_slot_[parent]] += acc[slot];
  }
  return acc;
}

Vec NetworkIndex::sum_along_paths(const Vec& per_branch) const {
  Vec w = Vec::Zero(bus_count_ - 1);
  for (int bus : bfs_order_) {
    const int parent = parent_bus_[bus];
    const double upstream = parent == 0 ? 0.0 : w[parent - 1];
    w[bus - 1] = upstream + per_branch[parent_slot_[bus]];
  }
  return w;
}

Mat NetworkIndex::incidence() const {
  const int m = branch_count();
  Mat a = Mat::Zero(m, bus_count_ - 1);
  for (int s = 0; s < m; ++s) {
    const Branch& b = closed_[s];
    a(s, b.to - 1) = -1.0;
    if (b.from != 0) a(s, b.from - 1) = 1.0;
  }
  return a;
}

Vec NetworkIndex::substation_column() const {
  Vec a0 = Vec::Zero(branch_count());
  for (int s = 0; s < branch_count(); ++s)
    if (closed_[s].from == 0) a0[s] = 1.0;
  return a0;
}

// ---------------------------------------------------------------------------
// Three-phase
// ---------------------------------------------------------------------------

std::string phase_string(PhaseMask mask) {
  std::string s;
  if (has_phase(mask, kPhaseA)) s += 'a';
  if (has_phase(mask, kPhaseB)) s += 'b';
  if (has_phase(mask, kPhaseC)) s += 'c';
  return s;
}

PhaseMask parse_phases(const std::string& s) {
  PhaseMask mask = 0;
  for (char c : s) {
    switch (c) {
      case 'a': mask |= 1 << kPhaseA; break;
      case 'b': mask |= 1 << kPhaseB; break;
      case 'c': mask |= 1 << kPhaseC; break;
      default: throw InputError(std::string("invalid phase character '") + c + "'");
    }
  }
  return mask;
}

RadialCheck validate_radial3(const ThreePhaseNetwork& network) {
  RadialCheck result;
  if (static_cast<int>(network.bus_phases.size()) != network.bus_count) {
    result.detail = "bus phase mask list length mismatch";
    return result;
  }
  std::vector<EdgeRef> edges;
  for (const auto& b : network.branches) edges.push_back({b.id, b.from, b.to});
  result = check_tree(network.bus_count, edges);
  if (!result.ok) return result;

  // Orientation pass so phase containment is checked parent-side.
  std::vector<Branch3> branches = network.branches;
  orient_closed(network.bus_count, branches, {});
  for (const auto& b : branches) {
    const PhaseMask parent_mask = network.bus_phases[b.from];
    const PhaseMask child_mask = network.bus_phases[b.to];
    if ((b.phases & parent_mask) != b.phases || (b.phases & child_mask) != b.phases) {
      RadialCheck bad;
      bad.detail = "branch " + std::to_string(b.id) + " carries phases '" +
                   phase_string(b.phases) + "' not present at both endpoints";
      return bad;
    }
    if (b.phases != child_mask) {
      RadialCheck bad;
      bad.detail = "bus " + std::to_string(b.to) + " phases '" + phase_string(child_mask) +
                   "' differ from feeding branch " + std::to_string(b.id) + " phases '" +
                   phase_string(b.phases) + "'";
      return bad;
    }
    for (int phi = 0; phi < 3; ++phi) {
      if (!has_phase(b.phases, phi)) continue;
      if (b.z(phi, phi).real() < 0) {
        RadialCheck bad;
        bad.detail = "branch " + std::to_string(b.id) + " has negative self resistance on phase " +
                     phase_string(1 << phi);
        return bad;
      }
    }
  }
  for (int phi = 0; phi < 3; ++phi) {
    if (network.v0[phi] <= 0 && has_phase(network.bus_phases[0], phi)) {
      RadialCheck bad;
      bad.detail = "substation squared voltage must be positive on phase " +
                   phase_string(1 << phi);
      return bad;
    }
  }
  result.ok = true;
  return result;
}

NetworkIndex3::NetworkIndex3(const ThreePhaseNetwork& network)
    : network_(&network), bus_count_(network.bus_count) {
  RadialCheck check = validate_radial3(network);
  if (!check.ok) throw InputError("three-phase network invalid: " + check.detail);

  branches_ = network.branches;
  std::sort(branches_.begin(), branches_.end(),
            [](const Branch3& a, const Branch3& b) { return a.id < b.id; });
  orient_closed(bus_count_, branches_, {});

  max_id_ = 0;
  for (const auto& b : branches_) max_id_ = std::max(max_id_, b.id);
  slot_of_id_.assign(max_id_ + 1, -1);
  for (int s = 0; s < static_cast<int>(branches_.size()); ++s) slot_of_id_[branches_[s].id] = s;

  parent_bus_.assign(bus_count_, -1);
  parent_slot_.assign(bus_count_, -1);
  std::vector<std::vector<int>> child_slots(bus_count_);
  for (int s = 0; s < static_cast<int>(branches_.size()); ++s) {
    parent_bus_[branches_[s].to] = branches_[s].from;
    parent_slot_[branches_[s].to] = s;
    child_slots[branches_[s].from].push_back(s);
  }
  std::queue<int> queue;
  queue.push(0);
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop();
    if (u != 0) bfs_order_.push_back(u);
    for (int s : child_slots[u]) queue.push(branches_[s].to);
  }

  bus_offset_.assign(bus_count_, -1);
  int offset = 0;
  for (int bus = 1; bus < bus_count_; ++bus) {
    bus_offset_[bus] = offset;
    offset += phase_count(network.bus_phases[bus]);
  }
  stacked_size_ = offset;
}

PhaseMask NetworkIndex3::bus_phases(int bus) const { return network_->bus_phases[bus]; }

int NetworkIndex3::stacked_offset(int bus, int phase) const {
  if (bus <= 0 || bus >= bus_count_) return -1;
  const PhaseMask mask = network_->bus_phases[bus];
  if (!has_phase(mask, phase)) return -1;
  int within = 0;
  for (int phi = 0; phi < phase; ++phi)
    if (has_phase(mask, phi)) ++within;
  return bus_offset_[bus] + within;
}

std::vector<Vec3> NetworkIndex3::accumulate_downstream(const Vec& stacked) const {
  std::vector<Vec3> acc(branches_.size(), Vec3::Zero());
  for (auto it = bfs_order_.rbegin(); it != bfs_order_.rend(); ++it) {
    const int bus = *it;
    const int slot = parent_slot_[bus];
    const PhaseMask mask = network_->bus_phases[bus];
    int within = 0;
    for (int phi = 0; phi < 3; ++phi) {
      if (!has_phase(mask, phi)) continue;
      acc[slot][phi] += stacked[bus_offset_[bus] + within];
      ++within;
    }
    const int parent = parent_bus_[bus];
    if (parent != 0) {
      // Parent branch carries a superset of this branch's phases.
      acc[parent_slot_[parent]] += acc[slot];
    }
  }
  return acc;
}

Vec NetworkIndex3::sum_along_paths(const std::vector<Vec3>& per_branch) const {
  std::vector<Vec3> cum(bus_count_, Vec3::Zero());
  Vec stacked = Vec::Zero(stacked_size_);
  for (int bus : bfs_order_) {
    const int parent = parent_bus_[bus];
    cum[bus] = cum[parent] + per_branch[parent_slot_[bus]];
    const PhaseMask mask = network_->bus_phases[bus];
    int within = 0;
    for (int phi = 0; phi < 3; ++phi) {
      if (!has_phase(mask, phi)) continue;
      stacked[bus_offset_[bus] + within] = cum[bus][phi];
      ++within;
    }
  }
  return stacked;
}

Mat NetworkIndex3::incidence() const {
  // Branch-phase rows follow the same (slot, phase a<b<c) layout used for
  // stacked bus vectors, so row blocks line up with child bus blocks.
  int rows = 0;
  for (const auto& b : branches_) rows += phase_count(b.phases);
  Mat a = Mat::Zero(rows, stacked_size_);
  int row = 0;
  for (const auto& b : branches_) {
    for (int phi = 0; phi < 3; ++phi) {
      if (!has_phase(b.phases, phi)) continue;
      a(row, stacked_offset(b.to, phi)) = -1.0;
      if (b.from != 0) {
        const int col = stacked_offset(b.from, phi);
        if (col >= 0) a(row, col) = 1.0;
      }
      ++row;
    }
  }
  return a;
}

}  // namespace oldf
