#pragma once

#include <vector>

#include "oldf/network.hpp"
#include "oldf/scenario.hpp"
#include "oldf/types.hpp"

namespace oldf {

struct SolveOptions {
  double tol = 1e-10;  // max equation violation, p.u.
  int max_iter = 200;
  const Vec* warm_start = nullptr;  // squared voltages, bus-1 indexed
};

// Branch-flow solution of the nonlinear radial power flow. Branch slots
// follow NetworkIndex order (ascending id); flows are sending-end values
// oriented parent -> child.
struct PfSolution {
  Vec v;        // squared voltage magnitudes per bus (index = bus), p.u.^2
  Vec flow_p;   // per closed branch, p.u.
  Vec flow_q;   // per closed branch, p.u.
  Vec ell;      // squared branch current magnitudes, p.u.^2
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;

  // Squared voltages for non-substation buses (bus-1 indexed), the vector
  // the approximations are compared against.
  Vec v_tail() const { return v.tail(v.size() - 1); }
};

// Backward/forward sweep for the branch-flow equations. Non-convergence
// returns converged=false with the last iterate; a negative squared voltage
// mid-sweep throws NumericalError naming the bus.
PfSolution solve_distflow(const NetworkIndex& index, const InjectionScenario& scenario,
                          double v0, const SolveOptions& opts = {});
PfSolution solve_distflow(const RadialNetwork& network, const InjectionScenario& scenario,
                          const SolveOptions& opts = {});

// Max violation of the branch-flow equations at the given iterate, checked
// independently of solver internals.
double distflow_residual(const NetworkIndex& index, const InjectionScenario& scenario, double v0,
                         const PfSolution& sol);

// ---------------------------------------------------------------------------
// Unbalanced three-phase sweep
// ---------------------------------------------------------------------------

struct PfSolution3 {
  // Stacked per-(bus, phase) squared magnitudes for non-substation buses.
  Vec v;
  // Complex phasors per bus (absent phases zero), substation included.
  std::vector<Vec3c> phasors;
  // Sending-end complex power per branch slot and phase.
  std::vector<Vec3c> flows;
  double residual = 0.0;  // max phasor mismatch of the last sweep
  int iterations = 0;
  bool converged = false;
};

// Phasor backward current sweep / forward voltage sweep with constant-power
// injections. Substation phasors default to sqrt(v0) at 0/-120/+120 degrees.
PfSolution3 solve_distflow3(const NetworkIndex3& index, const InjectionScenario3& scenario,
                            const SolveOptions& opts = {});

}  // namespace oldf
