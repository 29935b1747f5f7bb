#include "oldf/hosting.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oldf/distflow.hpp"
#include "oldf/log.hpp"

namespace oldf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_problem(const NetworkIndex& index, const HostingProblem& problem) {
  if (problem.generators.empty()) throw InputError("hosting: no generators specified");
  for (const auto& g : problem.generators) {
    if (g.bus <= 0 || g.bus >= index.bus_count())
      throw InputError("hosting: generator bus " + std::to_string(g.bus) + " does not exist");
    if (g.p_max < 0 || g.s_max < g.p_max)
      throw InputError("hosting: generator at bus " + std::to_string(g.bus) +
                       " needs 0 <= p_max <= s_max");
  }
  if (problem.v_min_sq >= problem.v_max_sq)
    throw InputError("hosting: voltage bounds must satisfy v_min < v_max");
  if (problem.xi < 0) throw InputError("hosting: xi must be nonnegative");
  if (problem.polygon_facets < 3) throw InputError("hosting: polygon needs at least 3 facets");
  for (const auto& [id, limit] : problem.line_limits) {
    if (index.branch_slot(id) < 0)
      throw InputError("hosting: line limit references unknown branch " + std::to_string(id));
    if (limit <= 0) throw InputError("hosting: line limits must be positive");
  }
}

}  // namespace

HostingSolution solve_hosting(const NetworkIndex& index, double v0, const LdfParams& params,
                              const InjectionScenario& base, const HostingProblem& problem,
                              const HostingSolution* warm) {
  check_problem(index, problem);
  const int gens = static_cast<int>(problem.generators.size());
  const int buses = index.bus_count() - 1;
  const int dim = 2 * gens;  // [pg; qg]
  const int facets = problem.polygon_facets;
  // Inner polygon inscribed in the disk: facet normals at the edge midpoints,
  // right-hand side shrunk by cos(pi/K).
  const double shrink = std::cos(M_PI / facets);

  // Voltage map at the base injections and its sensitivity columns per
  // generator (the model's own D_r/D_x, so OLDF headroom differs from LDF).
  const Vec v_fixed = oldf_voltages(index, params, base, v0);
  Mat v_sens = Mat::Zero(buses, dim);
  for (int g = 0; g < gens; ++g) {
    Vec unit = Vec::Zero(buses);
    unit[problem.generators[g].bus - 1] = 1.0;
    const Vec acc = index.accumulate_downstream(unit);
    v_sens.col(g) = 2.0 * index.sum_along_paths(params.dr.cwiseProduct(acc));
    v_sens.col(gens + g) = 2.0 * index.sum_along_paths(params.dx.cwiseProduct(acc));
  }

  // Lossless flows at the base injections and per-generator flow columns
  // (a generator reduces the serving flow on every branch above it).
  Vec flow_p_base, flow_q_base;
  ldf_flows(index, base, &flow_p_base, &flow_q_base);
  Mat flow_cols = Mat::Zero(index.branch_count(), gens);
  for (int g = 0; g < gens; ++g) {
    Vec unit = Vec::Zero(buses);
    unit[problem.generators[g].bus - 1] = 1.0;
    flow_cols.col(g) = -index.accumulate_downstream(unit);
  }

  int rows = gens                    // p box
             + gens * facets        // capability disks
             + buses;               // voltage bounds
  rows += static_cast<int>(problem.line_limits.size()) * facets;
  const bool transformer = problem.transformer_limit > 0;
  if (transformer) rows += facets;

  QpProblem qp;
  qp.p_diag = Vec::Zero(dim);
  qp.c = Vec::Zero(dim);
  for (int g = 0; g < gens; ++g) {
    const auto& spec = problem.generators[g];
    if (spec.p_max > 0) {
      qp.p_diag[g] = 2.0 / spec.p_max;
      qp.c[g] = -2.0;
    }
    if (spec.s_max > 0) qp.p_diag[gens + g] = 2.0 * problem.xi / spec.s_max;
  }
  qp.g = Mat::Zero(rows, dim);
  qp.lower = Vec::Constant(rows, -kInf);
  qp.upper = Vec::Constant(rows, kInf);
  qp.row_labels.resize(rows);

  int row = 0;
  for (int g = 0; g < gens; ++g) {
    qp.g(row, g) = 1.0;
    qp.lower[row] = 0.0;
    qp.upper[row] = problem.generators[g].p_max;
    qp.row_labels[row] = "p-cap generator bus " + std::to_string(problem.generators[g].bus);
    ++row;
  }
  for (int g = 0; g < gens; ++g) {
    for (int k = 0; k < facets; ++k) {
      const double theta = 2.0 * M_PI * (k + 0.5) / facets;
      qp.g(row, g) = std::cos(theta);
      qp.g(row, gens + g) = std::sin(theta);
      qp.upper[row] = problem.generators[g].s_max * shrink;
      qp.row_labels[row] = "s-cap generator bus " + std::to_string(problem.generators[g].bus);
      ++row;
    }
  }
  for (int b = 0; b < buses; ++b) {
    qp.g.row(row) = v_sens.row(b);
    qp.lower[row] = problem.v_min_sq - v_fixed[b];
    qp.upper[row] = problem.v_max_sq - v_fixed[b];
    qp.row_labels[row] = "voltage bus " + std::to_string(b + 1);
    ++row;
  }
  for (const auto& [id, limit] : problem.line_limits) {
    const int slot = index.branch_slot(id);
    for (int k = 0; k < facets; ++k) {
      const double theta = 2.0 * M_PI * (k + 0.5) / facets;
      const double ct = std::cos(theta), st = std::sin(theta);
      qp.g.row(row).head(gens) = ct * flow_cols.row(slot);
      qp.g.row(row).segment(gens, gens) = st * flow_cols.row(slot);
      qp.upper[row] = limit * shrink - ct * flow_p_base[slot] - st * flow_q_base[slot];
      qp.row_labels[row] = "flow line " + std::to_string(id);
      ++row;
    }
  }
  if (transformer) {
    // Net substation import: sum of the root-branch flows.
    Vec root_mask = Vec::Zero(index.branch_count());
    for (int s = 0; s < index.branch_count(); ++s)
      if (index.closed_branches()[s].from == 0) root_mask[s] = 1.0;
    const double pt_base = root_mask.dot(flow_p_base);
    const double qt_base = root_mask.dot(flow_q_base);
    const Vec pt_cols = flow_cols.transpose() * root_mask;
    for (int k = 0; k < facets; ++k) {
      const double theta = 2.0 * M_PI * (k + 0.5) / facets;
      const double ct = std::cos(theta), st = std::sin(theta);
      qp.g.row(row).head(gens) = ct * pt_cols.transpose();
      qp.g.row(row).segment(gens, gens) = st * pt_cols.transpose();
      qp.upper[row] = problem.transformer_limit * shrink - ct * pt_base - st * qt_base;
      qp.row_labels[row] = "transformer";
      ++row;
    }
  }

  QpOptions qp_opts;
  const Vec* warm_x = warm && warm->qp.x.size() == dim ? &warm->qp.x : nullptr;
  const Vec* warm_y = warm && warm->qp.y.size() == rows ? &warm->qp.y : nullptr;
  QpResult qr = solve_qp(qp, qp_opts, warm_x, warm_y);
  if (qr.status == QpStatus::kPrimalInfeasible) {
    const std::string label = qr.most_violated_row >= 0 && !qp.row_labels.empty()
                                  ? qp.row_labels[qr.most_violated_row]
                                  : "unknown";
    throw NumericalError("hosting: problem infeasible; most violated constraint: " + label);
  }
  if (qr.status == QpStatus::kMaxIterations)
    throw NumericalError("hosting: splitting iterations did not converge (primal residual " +
                         std::to_string(qr.primal_residual) + ")");

  HostingSolution sol;
  sol.pg = qr.x.head(gens);
  sol.qg = qr.x.segment(gens, gens);
  sol.status = to_string(qr.status);
  sol.model_voltages = v_fixed + v_sens * qr.x;
  sol.qp_primal_residual = qr.primal_residual;
  sol.qp_dual_residual = qr.dual_residual;
  sol.qp_iterations = qr.iterations;
  double objective = 0.0;
  for (int g = 0; g < gens; ++g) {
    const auto& spec = problem.generators[g];
    if (spec.p_max > 0) {
      const double gap = spec.p_max - sol.pg[g];
      objective += gap * gap / spec.p_max;
    }
    if (spec.s_max > 0) objective += problem.xi * sol.qg[g] * sol.qg[g] / spec.s_max;
  }
  sol.objective = objective;
  sol.qp = std::move(qr);
  return sol;
}

ViolationReport validate_with_distflow(const NetworkIndex& index, double v0,
                                       const InjectionScenario& base,
                                       const HostingProblem& problem, const Vec& pg,
                                       const Vec& qg) {
  if (!pg.allFinite() || !qg.allFinite())
    throw InputError("hosting validation: setpoints must be finite");
  InjectionScenario scenario = base;
  for (int g = 0; g < static_cast<int>(problem.generators.size()); ++g) {
    scenario.p[problem.generators[g].bus - 1] += pg[g];
    scenario.q[problem.generators[g].bus - 1] += qg[g];
  }

  ViolationReport report;
  PfSolution sol;
  try {
    sol = solve_distflow(index, scenario, v0);
  } catch (const NumericalError& e) {
    log_warn(std::string("hosting validation: nonlinear solve diverged: ") + e.what());
    return report;
  }
  report.distflow_converged = sol.converged;
  if (!sol.converged) return report;

  const double v_min = std::sqrt(problem.v_min_sq);
  const double v_max = std::sqrt(problem.v_max_sq);
  report.v_magnitude = sol.v.cwiseSqrt();
  for (int bus = 1; bus < index.bus_count(); ++bus) {
    const double vm = report.v_magnitude[bus];
    const double violation = std::max(v_min - vm, vm - v_max);
    if (violation > 0) ++report.buses_in_violation;
    if (violation > report.worst_voltage_violation) {
      report.worst_voltage_violation = violation;
      report.worst_bus = bus;
    }
  }
  for (const auto& [id, limit] : problem.line_limits) {
    const int slot = index.branch_slot(id);
    const double apparent = std::hypot(sol.flow_p[slot], sol.flow_q[slot]);
    if (apparent - limit > report.worst_line_violation) {
      report.worst_line_violation = apparent - limit;
      report.worst_line = id;
    }
  }
  if (problem.transformer_limit > 0) {
    double pt = 0.0, qt = 0.0;
    for (int s = 0; s < index.branch_count(); ++s) {
      if (index.closed_branches()[s].from == 0) {
        pt += sol.flow_p[s];
        qt += sol.flow_q[s];
      }
    }
    report.transformer_violation = std::max(0.0, std::hypot(pt, qt) - problem.transformer_limit);
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON interface
// ---------------------------------------------------------------------------

HostingProblem parse_hosting_json(const std::string& text, double base_mva) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("hosting problem: invalid JSON: ") + e.what());
  }
  HostingProblem problem;
  if (!root.contains("generators") || !root["generators"].is_array())
    throw InputError("hosting problem: missing 'generators' array");
  for (const auto& jg : root["generators"]) {
    GeneratorSpec g;
    g.bus = jg.value("bus", -1);
    const double s_mva = jg.value("s_max_mva", 0.0);
    const double pf = jg.value("power_factor", 1.0);
    if (pf <= 0 || pf > 1)
      throw InputError("hosting problem: power_factor must be in (0, 1]");
    g.s_max = s_mva / base_mva;
    g.p_max = pf * g.s_max;
    problem.generators.push_back(g);
  }
  problem.xi = root.value("xi", 0.02);
  const double v_min = root.value("v_min_pu", 0.95);
  const double v_max = root.value("v_max_pu", 1.05);
  problem.v_min_sq = v_min * v_min;
  problem.v_max_sq = v_max * v_max;
  problem.transformer_limit = root.value("transformer_limit_mva", 0.0) / base_mva;
  if (root.contains("line_limits")) {
    for (const auto& jl : root["line_limits"])
      problem.line_limits.emplace_back(jl.value("branch", -1),
                                       jl.value("s_mva", 0.0) / base_mva);
  }
  problem.polygon_facets = root.value("polygon_facets", 32);
  return problem;
}

std::string hosting_result_json(const HostingProblem& problem, const HostingSolution& solution,
                                const ViolationReport& report, double base_mva) {
  nlohmann::json root;
  root["status"] = solution.status;
  root["objective"] = solution.objective;
  nlohmann::json gens = nlohmann::json::array();
  for (int g = 0; g < static_cast<int>(problem.generators.size()); ++g) {
    nlohmann::json jg;
    jg["bus"] = problem.generators[g].bus;
    jg["p_mw"] = solution.pg[g] * base_mva;
    jg["q_mvar"] = solution.qg[g] * base_mva;
    gens.push_back(jg);
  }
  root["setpoints"] = gens;
  root["qp"] = {{"iterations", solution.qp_iterations},
                {"primal_residual", solution.qp_primal_residual},
                {"dual_residual", solution.qp_dual_residual}};
  nlohmann::json val;
  val["distflow_converged"] = report.distflow_converged;
  val["worst_voltage_violation_pu"] = report.worst_voltage_violation;
  val["worst_bus"] = report.worst_bus;
  val["buses_in_violation"] = report.buses_in_violation;
  val["worst_line_violation_pu"] = report.worst_line_violation;
  val["transformer_violation_pu"] = report.transformer_violation;
  if (report.v_magnitude.size() > 0) {
    val["v_min_pu"] = report.v_magnitude.tail(report.v_magnitude.size() - 1).minCoeff();
    val["v_max_pu"] = report.v_magnitude.tail(report.v_magnitude.size() - 1).maxCoeff();
  }
  root["validation"] = val;
  return root.dump(2);
}

}  // namespace oldf
