#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "oldf/types.hpp"

namespace oldf {

// -------------------------------------------------------------------------
// Single-phase radial feeder
// -------------------------------------------------------------------------

struct Branch {
  int id = 0;
  int from = 0;  // parent-side bus once oriented
  int to = 0;    // child-side bus once oriented
  double r = 0.0;  // p.u.
  double x = 0.0;  // p.u.
};

// A radial feeder rooted at bus 0 (the substation). `branches` holds every
// branch including currently open ones; the closed subset must form a
// spanning tree over all buses. Values are immutable once built: topology
// changes return new networks.
struct RadialNetwork {
  int bus_count = 0;  // total buses, substation included
  std::vector<Branch> branches;
  double v0 = 1.0;  // squared substation voltage, p.u.^2
  std::vector<int> switchable_ids;
  std::set<int> open_ids;

  int non_substation_count() const { return bus_count - 1; }
  bool is_open(int branch_id) const { return open_ids.count(branch_id) > 0; }
  const Branch* find_branch(int branch_id) const;
};

struct RadialCheck {
  bool ok = false;
  std::string detail;  // names the offending cycle / disconnected buses
};

// True iff the closed branches form a spanning tree rooted at bus 0.
// Never throws; problems are described in `detail`. Zero-impedance branches
// are allowed (ideal switches) and only produce a warning.
RadialCheck validate_radial(const RadialNetwork& network);

// Reorients every closed branch so from=parent, to=child relative to bus 0.
// Branch ids are untouched, so per-branch parameters can follow a branch
// through reconfiguration. Throws InputError if the closed set is not radial.
RadialNetwork oriented(const RadialNetwork& network);

struct TopologyConfig {
  std::set<int> open_ids;    // switchable branches to open
  std::set<int> closed_ids;  // switchable branches to close
};

// Applies a switch configuration to `base` and re-roots the result at bus 0.
// Throws InputError on unknown/non-switchable ids, overlapping sets, or a
// resulting cycle/island (the diagnostic names the buses involved).
RadialNetwork apply_topology(const RadialNetwork& base, const TopologyConfig& cfg);

// Enumerates every assignment of the switchable set with exactly
// `open_count` branches open and keeps those that validate as radial.
std::vector<TopologyConfig> enumerate_radial_configs(const RadialNetwork& base);

// -------------------------------------------------------------------------
// Tree index: the O(n) kernels behind every A^{-1} / A^{-T} product
// -------------------------------------------------------------------------

// Precomputed traversal structure for the closed subtree of an oriented
// network. Branch slots follow ascending branch id; bus slots are bus-1.
class NetworkIndex {
public:
  explicit NetworkIndex(const RadialNetwork& network);

  int bus_count() const { return bus_count_; }
  int branch_count() const { return static_cast<int>(closed_.size()); }

  const std::vector<Branch>& closed_branches() const { return closed_; }
  int branch_slot(int branch_id) const;          // -1 if open/unknown
  int parent_branch_slot(int bus) const { return parent_slot_[bus]; }
  int parent_bus(int bus) const { return parent_bus_[bus]; }
  const std::vector<int>& bfs_order() const { return bfs_order_; }  // excludes bus 0

  // Ordered branch ids on the path substation -> bus; empty for bus 0.
  std::vector<int> path(int bus) const;
  // Buses whose substation path contains the given branch.
  std::vector<int> downstream_buses(int branch_id) const;

  // acc[b] = sum of z over buses downstream of branch b (z indexed bus-1).
  // This is -A^{-T} z under the A[b,child]=-1, A[b,parent]=+1 convention.
  Vec accumulate_downstream(const Vec& per_bus) const;
  // w[n] = sum of u over branches on the path to bus n (w indexed bus-1).
  // This is -A^{-1} u under the same convention.
  Vec sum_along_paths(const Vec& per_branch) const;

  // Reduced incidence matrix (branch slot x bus-1) and substation column:
  // A[b, child]=-1, A[b, parent]=+1 for non-substation parents, a0[b]=+1
  // iff the branch hangs off the substation.
  Mat incidence() const;
  Vec substation_column() const;

private:
  int bus_count_ = 0;
  std::vector<Branch> closed_;        // ascending id, oriented parent->child
  std::vector<int> slot_of_id_;       // sparse map id -> slot (-1 absent)
  int max_id_ = 0;
  std::vector<int> parent_bus_;       // per bus
  std::vector<int> parent_slot_;      // per bus, branch slot feeding it
  std::vector<std::vector<int>> child_slots_;  // per bus
  std::vector<int> bfs_order_;        // root->leaf, excludes bus 0
};

// -------------------------------------------------------------------------
// Unbalanced three-phase feeder
// -------------------------------------------------------------------------

enum Phase : int { kPhaseA = 0, kPhaseB = 1, kPhaseC = 2 };

using PhaseMask = std::uint8_t;  // bit i set => phase i present
inline bool has_phase(PhaseMask mask, int phase) { return (mask >> phase) & 1; }
inline int phase_count(PhaseMask mask) {
  return ((mask >> 0) & 1) + ((mask >> 1) & 1) + ((mask >> 2) & 1);
}
std::string phase_string(PhaseMask mask);
PhaseMask parse_phases(const std::string& s);

struct Branch3 {
  int id = 0;
  int from = 0;
  int to = 0;
  PhaseMask phases = 0;
  // Phase impedance block, p.u.; entries for absent phases are zero.
  Mat3c z;
};

// Radial feeder with per-bus phase masks. The phases of a branch equal the
// mask of its child bus and must be contained in the parent's mask, so every
// energized phase has a path to the substation.
struct ThreePhaseNetwork {
  int bus_count = 0;
  std::vector<PhaseMask> bus_phases;  // per bus
  std::vector<Branch3> branches;
  Vec3 v0 = Vec3::Ones();  // squared substation voltages per phase, p.u.^2

  int non_substation_count() const { return bus_count - 1; }
};

RadialCheck validate_radial3(const ThreePhaseNetwork& network);

// Stacked layout: non-substation buses in ascending order, present phases in
// a<b<c order within each bus. Branch blocks follow ascending branch id.
class NetworkIndex3 {
public:
  explicit NetworkIndex3(const ThreePhaseNetwork& network);

  int bus_count() const { return bus_count_; }
  int branch_count() const { return static_cast<int>(branches_.size()); }
  int stacked_size() const { return stacked_size_; }  // sum of |phases| over buses 1..n

  const std::vector<Branch3>& branches() const { return branches_; }
  const ThreePhaseNetwork& network() const { return *network_; }
  int parent_bus(int bus) const { return parent_bus_[bus]; }
  int parent_branch_slot(int bus) const { return parent_slot_[bus]; }
  const std::vector<int>& bfs_order() const { return bfs_order_; }

  // Offset of (bus, phase) in the stacked vector; -1 if absent or bus 0.
  int stacked_offset(int bus, int phase) const;
  int bus_offset(int bus) const { return bus_offset_[bus]; }  // first slot of bus
  PhaseMask bus_phases(int bus) const;

  // Per-branch 3-vectors (absent phases zeroed) from a stacked per-bus vector:
  // acc[b][phi] = sum of z over downstream buses carrying phi.
  std::vector<Vec3> accumulate_downstream(const Vec& stacked) const;
  // Stacked per-bus vector from per-branch 3-vectors: path sums per phase.
  Vec sum_along_paths(const std::vector<Vec3>& per_branch) const;

  // Phase-expanded reduced incidence (block row per branch-phase, block
  // column per bus-phase), same sign convention as the single-phase index.
  Mat incidence() const;

private:
  const ThreePhaseNetwork* network_ = nullptr;
  int bus_count_ = 0;
  int stacked_size_ = 0;
  std::vector<Branch3> branches_;  // ascending id, oriented
  std::vector<int> slot_of_id_;
  int max_id_ = 0;
  std::vector<int> parent_bus_;
  std::vector<int> parent_slot_;
  std::vector<int> bus_offset_;
  std::vector<int> bfs_order_;
};

}  // namespace oldf
