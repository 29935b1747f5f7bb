#pragma once

#include <string>
#include <vector>

#include "oldf/lindistflow.hpp"
#include "oldf/network.hpp"
#include "oldf/qp.hpp"
#include "oldf/scenario.hpp"
#include "oldf/types.hpp"

namespace oldf {

struct GeneratorSpec {
  int bus = 0;
  double p_max = 0.0;  // p.u.
  double s_max = 0.0;  // p.u. apparent
};

enum class VoltageModel { kLdf, kOldf };

// Utilization problem for inverter-based generation: minimize curtailment
// plus weighted reactive usage subject to generator capability, voltage
// bounds under the selected linear model, and line/transformer apparent
// limits. Cones are enforced by inner polygonal cuts, so any returned
// setpoint satisfies the true quadratic constraints.
struct HostingProblem {
  std::vector<GeneratorSpec> generators;
  double xi = 0.02;          // reactive tradeoff weight
  double v_min_sq = 0.9025;  // p.u.^2
  double v_max_sq = 1.1025;  // p.u.^2
  std::vector<std::pair<int, double>> line_limits;  // (branch id, S_n p.u.)
  double transformer_limit = 0.0;  // S_T p.u.; <= 0 disables
  VoltageModel model = VoltageModel::kLdf;
  int polygon_facets = 32;
};

struct HostingSolution {
  Vec pg;  // per generator, p.u.
  Vec qg;
  double objective = 0.0;  // value of the curtailment objective as written
  std::string status;
  Vec model_voltages;  // squared voltages of the linear model at the setpoints
  double qp_primal_residual = 0.0;
  double qp_dual_residual = 0.0;
  int qp_iterations = 0;
  QpResult qp;  // full solver state, for certificates and warm starts
};

// Builds and solves the convex program. `params` supplies the OLDF voltage
// map; pass the nominal parameters for the LDF model. Throws NumericalError
// when the cut program is infeasible (naming the most violated constraint)
// or the splitting iterations do not converge.
HostingSolution solve_hosting(const NetworkIndex& index, double v0, const LdfParams& params,
                              const InjectionScenario& base, const HostingProblem& problem,
                              const HostingSolution* warm = nullptr);

// Nonlinear audit of setpoints: adds them to the base injections, solves the
// branch-flow equations, and reports margins against the problem limits.
struct ViolationReport {
  bool distflow_converged = false;
  Vec v_magnitude;              // per bus, p.u.
  double worst_voltage_violation = 0.0;  // |V| distance outside [vmin, vmax]
  int worst_bus = -1;
  int buses_in_violation = 0;
  double worst_line_violation = 0.0;  // apparent flow above its limit, p.u.
  int worst_line = -1;
  double transformer_violation = 0.0;
};

ViolationReport validate_with_distflow(const NetworkIndex& index, double v0,
                                       const InjectionScenario& base,
                                       const HostingProblem& problem,
                                       const Vec& pg, const Vec& qg);

// Problem spec JSON: generator placements with MVA caps and power factor,
// limits in MVA, voltage bounds in p.u. magnitude. Converted to per-unit on
// the case base.
HostingProblem parse_hosting_json(const std::string& text, double base_mva);
std::string hosting_result_json(const HostingProblem& problem, const HostingSolution& solution,
                                const ViolationReport& report, double base_mva);

}  // namespace oldf
