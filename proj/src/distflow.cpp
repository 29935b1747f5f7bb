#include "oldf/distflow.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace oldf {

PfSolution solve_distflow(const NetworkIndex& index, const InjectionScenario& scenario, double v0,
                          const SolveOptions& opts) {
  const int buses = index.bus_count();
  const int lines = index.branch_count();
  const auto& branches = index.closed_branches();
  const auto& order = index.bfs_order();

  PfSolution sol;
  sol.v = Vec::Constant(buses, v0);
  if (opts.warm_start) sol.v.tail(buses - 1) = *opts.warm_start;
  sol.flow_p = Vec::Zero(lines);
  sol.flow_q = Vec::Zero(lines);
  sol.ell = Vec::Zero(lines);

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    // Backward: accumulate received flows leaf -> root using current v.
    // recv on branch b is the power delivered into its child bus; the
    // sending-end flow adds that line's own loss. The line current is the
    // same at both ends, so ell comes from the receiving-end flows and v.
    Vec recv_p = Vec::Zero(lines);
    Vec recv_q = Vec::Zero(lines);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int bus = *it;
      const int slot = index.parent_branch_slot(bus);
      recv_p[slot] += -scenario.p[bus - 1];
      recv_q[slot] += -scenario.q[bus - 1];
      const Branch& b = branches[slot];
      if (sol.v[bus] <= 0)
        throw NumericalError("distflow diverged: nonpositive squared voltage at bus " +
                             std::to_string(bus));
      const double l = (recv_p[slot] * recv_p[slot] + recv_q[slot] * recv_q[slot]) / sol.v[bus];
      sol.ell[slot] = l;
      sol.flow_p[slot] = recv_p[slot] + b.r * l;
      sol.flow_q[slot] = recv_q[slot] + b.x * l;
      const int parent = index.parent_bus(bus);
      if (parent != 0) {
        const int up = index.parent_branch_slot(parent);
        recv_p[up] += sol.flow_p[slot];
        recv_q[up] += sol.flow_q[slot];
      }
    }
    // Forward: update voltages root -> leaf.
    for (int bus : order) {
      const int slot = index.parent_branch_slot(bus);
      const Branch& b = branches[slot];
      const double vp = sol.v[index.parent_bus(bus)];
      sol.v[bus] = vp - 2.0 * (b.r * sol.flow_p[slot] + b.x * sol.flow_q[slot]) +
                   (b.r * b.r + b.x * b.x) * sol.ell[slot];
      if (sol.v[bus] <= 0)
        throw NumericalError("distflow diverged: nonpositive squared voltage at bus " +
                             std::to_string(bus));
    }
    sol.iterations = iter;
    if (!sol.v.allFinite() || !sol.flow_p.allFinite() || !sol.flow_q.allFinite()) {
      sol.residual = std::numeric_limits<double>::infinity();
      sol.converged = false;
      return sol;
    }
    sol.residual = distflow_residual(index, scenario, v0, sol);
    if (sol.residual <= opts.tol) {
      sol.converged = true;
      return sol;
    }
  }
  sol.converged = false;
  return sol;
}

PfSolution solve_distflow(const RadialNetwork& network, const InjectionScenario& scenario,
                          const SolveOptions& opts) {
  NetworkIndex index(network);
  return solve_distflow(index, scenario, network.v0, opts);
}

double distflow_residual(const NetworkIndex& index, const InjectionScenario& scenario, double v0,
                         const PfSolution& sol) {
  // NaN-safe: std::max silently drops NaNs, so screen the iterate first.
  if (!sol.v.allFinite() || !sol.flow_p.allFinite() || !sol.flow_q.allFinite() ||
      !sol.ell.allFinite())
    return std::numeric_limits<double>::infinity();
  const auto& branches = index.closed_branches();
  double worst = std::abs(sol.v[0] - v0);
  // Per-bus power balance: children sending-end flows = injection + received.
  Vec child_p = Vec::Zero(index.bus_count());
  Vec child_q = Vec::Zero(index.bus_count());
  for (int s = 0; s < index.branch_count(); ++s) {
    child_p[branches[s].from] += sol.flow_p[s];
    child_q[branches[s].from] += sol.flow_q[s];
  }
  for (int bus : index.bfs_order()) {
    const int s = index.parent_branch_slot(bus);
    const Branch& b = branches[s];
    const double balance_p =
        child_p[bus] - (scenario.p[bus - 1] + sol.flow_p[s] - b.r * sol.ell[s]);
    const double balance_q =
        child_q[bus] - (scenario.q[bus - 1] + sol.flow_q[s] - b.x * sol.ell[s]);
    const double vdrop = sol.v[bus] - (sol.v[b.from] -
                                       2.0 * (b.r * sol.flow_p[s] + b.x * sol.flow_q[s]) +
                                       (b.r * b.r + b.x * b.x) * sol.ell[s]);
    const double apparent =
        sol.v[b.from] * sol.ell[s] - (sol.flow_p[s] * sol.flow_p[s] + sol.flow_q[s] * sol.flow_q[s]);
    worst = std::max({worst, std::abs(balance_p), std::abs(balance_q), std::abs(vdrop),
                      std::abs(apparent)});
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Three-phase
// ---------------------------------------------------------------------------

namespace {

Vec3c substation_phasors(const Vec3& v0, PhaseMask mask) {
  // Positive-sequence reference angles 0, -120, +120 degrees.
  static const Complex rot[3] = {Complex(1.0, 0.0),
                                 std::polar(1.0, -2.0 * M_PI / 3.0),
                                 std::polar(1.0, 2.0 * M_PI / 3.0)};
  Vec3c out = Vec3c::Zero();
  for (int phi = 0; phi < 3; ++phi)
    if (has_phase(mask, phi)) out[phi] = std::sqrt(v0[phi]) * rot[phi];
  return out;
}

}  // namespace

PfSolution3 solve_distflow3(const NetworkIndex3& index, const InjectionScenario3& scenario,
                            const SolveOptions& opts) {
  const ThreePhaseNetwork& net = index.network();
  const int buses = index.bus_count();
  const auto& branches = index.branches();
  const auto& order = index.bfs_order();

  if (scenario.p.size() != index.stacked_size() || scenario.q.size() != index.stacked_size())
    throw InputError("three-phase scenario length does not match network phase layout");

  PfSolution3 sol;
  sol.phasors.assign(buses, Vec3c::Zero());
  sol.flows.assign(branches.size(), Vec3c::Zero());
  const Vec3c v_sub = substation_phasors(net.v0, net.bus_phases[0]);
  sol.phasors[0] = v_sub;
  for (int bus = 1; bus < buses; ++bus) {
    for (int phi = 0; phi < 3; ++phi)
      if (has_phase(net.bus_phases[bus], phi)) sol.phasors[bus][phi] = v_sub[phi];
  }

  std::vector<Vec3c> currents(branches.size(), Vec3c::Zero());
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    // Backward: branch currents leaf -> root from constant-power injections.
    for (auto& c : currents) c.setZero();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int bus = *it;
      const int slot = index.parent_branch_slot(bus);
      const PhaseMask mask = net.bus_phases[bus];
      for (int phi = 0; phi < 3; ++phi) {
        if (!has_phase(mask, phi)) continue;
        const int off = index.stacked_offset(bus, phi);
        const Complex s_drawn(-scenario.p[off], -scenario.q[off]);  // load convention
        const Complex v = sol.phasors[bus][phi];
        if (std::abs(v) < 1e-12)
          throw NumericalError("distflow3 diverged: vanishing voltage at bus " +
                               std::to_string(bus));
        currents[slot][phi] += std::conj(s_drawn / v);
      }
      const int parent = index.parent_bus(bus);
      if (parent != 0) currents[index.parent_branch_slot(parent)] += currents[slot];
    }
    // Forward: voltage drops root -> leaf over the full phase blocks.
    double shift = 0.0;
    for (int bus : order) {
      const int slot = index.parent_branch_slot(bus);
      const Branch3& b = branches[slot];
      Vec3c v_new = Vec3c::Zero();
      for (int phi = 0; phi < 3; ++phi) {
        if (!has_phase(b.phases, phi)) continue;
        Complex drop(0.0, 0.0);
        for (int psi = 0; psi < 3; ++psi)
          if (has_phase(b.phases, psi)) drop += b.z(phi, psi) * currents[slot][psi];
        v_new[phi] = sol.phasors[b.from][phi] - drop;
      }
      shift = std::max(shift, (v_new - sol.phasors[bus]).cwiseAbs().maxCoeff());
      sol.phasors[bus] = v_new;
    }
    sol.iterations = iter;
    sol.residual = shift;
    bool finite = true;
    for (int bus : order)
      if (!sol.phasors[bus].allFinite()) finite = false;
    if (!finite) {
      sol.residual = std::numeric_limits<double>::infinity();
      sol.converged = false;
      break;
    }
    if (shift < opts.tol) {
      sol.converged = true;
      break;
    }
  }

  for (std::size_t s = 0; s < branches.size(); ++s) {
    const Branch3& b = branches[s];
    for (int phi = 0; phi < 3; ++phi)
      if (has_phase(b.phases, phi))
        sol.flows[s][phi] = sol.phasors[b.from][phi] * std::conj(currents[s][phi]);
  }
  sol.v = Vec::Zero(index.stacked_size());
  for (int bus = 1; bus < buses; ++bus) {
    for (int phi = 0; phi < 3; ++phi) {
      const int off = index.stacked_offset(bus, phi);
      if (off >= 0) sol.v[off] = std::norm(sol.phasors[bus][phi]);
    }
  }
  return sol;
}

}  // namespace oldf
