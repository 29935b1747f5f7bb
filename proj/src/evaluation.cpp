#include "oldf/evaluation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "oldf/log.hpp"
#include "oldf/parallel.hpp"

namespace oldf {

ErrorReport error_metrics(const std::vector<std::optional<Vec>>& truth,
                          const std::vector<std::optional<Vec>>& approx) {
  if (truth.size() != approx.size())
    throw InputError("error_metrics: truth and approximation batch sizes differ");
  if (truth.empty()) throw InputError("error_metrics: empty input");
  ErrorReport report;
  double l1_total = 0.0;
  Eigen::Index dim = 0;
  for (std::size_t m = 0; m < truth.size(); ++m) {
    if (!truth[m] || !approx[m]) {
      ++report.scenarios_dropped;
      continue;
    }
    const Vec& t = *truth[m];
    const Vec& a = *approx[m];
    if (t.size() != a.size()) throw InputError("error_metrics: dimension mismatch");
    dim = t.size();
    const Vec err = (a - t).cwiseAbs();
    Eigen::Index worst;
    const double inf = err.maxCoeff(&worst);
    if (inf > report.eps_max) {
      report.eps_max = inf;
      report.worst_bus = static_cast<int>(worst) + 1;
      report.worst_scenario = static_cast<int>(m);
    }
    l1_total += err.sum();
    ++report.scenarios_used;
  }
  if (report.scenarios_used == 0) throw NumericalError("error_metrics: no usable scenarios");
  report.eps_avg = l1_total / (static_cast<double>(report.scenarios_used) * dim);
  return report;
}

Vec to_magnitudes(const Vec& v_squared) { return v_squared.cwiseMax(0.0).cwiseSqrt(); }

ModelComparison compare_models(const NetworkIndex& index, const LdfParams& params,
                               const ScenarioSet& set, double v0, std::size_t jobs) {
  const auto truth = solve_truth(index, set, v0, jobs);
  const LdfParams nominal = nominal_params(index);
  std::vector<std::optional<Vec>> vm_truth(set.size()), ldf(set.size()), opt(set.size());
  for (std::size_t m = 0; m < set.size(); ++m) {
    if (!truth[m]) continue;  // paired masks
    vm_truth[m] = to_magnitudes(*truth[m]);
    ldf[m] = to_magnitudes(oldf_voltages(index, nominal, set.scenarios[m], v0));
    opt[m] = to_magnitudes(oldf_voltages(index, params, set.scenarios[m], v0));
  }
  return {error_metrics(vm_truth, ldf), error_metrics(vm_truth, opt)};
}

ModelComparison compare_models3(const NetworkIndex3& index, const Ldf3Params& params,
                                const ScenarioSet3& set, std::size_t jobs) {
  const auto truth = solve_truth3(index, set, jobs);
  const Ldf3Params nominal = nominal_h_blocks(index);
  std::vector<std::optional<Vec>> vm_truth(set.size()), ldf(set.size()), opt(set.size());
  for (std::size_t m = 0; m < set.size(); ++m) {
    if (!truth[m]) continue;
    vm_truth[m] = to_magnitudes(*truth[m]);
    ldf[m] = to_magnitudes(ldf3_voltages(index, nominal, set.scenarios[m]));
    opt[m] = to_magnitudes(ldf3_voltages(index, params, set.scenarios[m]));
  }
  return {error_metrics(vm_truth, ldf), error_metrics(vm_truth, opt)};
}

// ---------------------------------------------------------------------------
// Topology sweep
// ---------------------------------------------------------------------------

LdfParams adapt_params(const LdfParams& trained, const NetworkIndex& trained_index,
                       const NetworkIndex& target_index) {
  LdfParams out;
  const int m = target_index.branch_count();
  out.dr = Vec(m);
  out.dx = Vec(m);
  for (int s = 0; s < m; ++s) {
    const Branch& b = target_index.closed_branches()[s];
    const int src = trained_index.branch_slot(b.id);
    if (src >= 0) {
      out.dr[s] = trained.dr[src];
      out.dx[s] = trained.dx[src];
    } else {
      // Newly closed line: fall back to its physical impedance.
      out.dr[s] = b.r;
      out.dx[s] = b.x;
    }
  }
  out.gamma = trained.gamma;
  out.rho = trained.rho;
  out.varrho = trained.varrho;
  return out;
}

TopologyMatrix topology_sweep(const RadialNetwork& base, const InjectionScenario& base_load,
                              const std::vector<TopologyConfig>& configs,
                              const SweepOptions& opts) {
  const int t_count = static_cast<int>(configs.size());
  TopologyMatrix result;
  result.configs = configs;
  result.eps_avg = Mat::Constant(t_count, t_count, std::numeric_limits<double>::quiet_NaN());
  result.baseline = Vec::Zero(t_count);
  result.dominates.setConstant(t_count, t_count, false);

  // One seeded sample set, scaled from the base feeder's loads, shared by
  // every topology; training uses its own seeded set the same way.
  const ScenarioSet test_set = sample_uniform_scenarios(base_load, opts.test_count, opts.test_lo,
                                                        opts.test_hi, opts.test_seed);
  const ScenarioSet train_set =
      sample_training_scenarios(base_load, opts.train_count, opts.train_seed);

  struct TopologyJob {
    std::optional<NetworkIndex> index;
    std::vector<std::optional<Vec>> truth;  // voltage magnitudes
    std::optional<LdfParams> params;        // empty when training failed
  };
  std::vector<TopologyJob> jobs(t_count);

  parallel_for(t_count, opts.jobs, [&](std::size_t i) {
    TopologyJob& job = jobs[i];
    const RadialNetwork network = apply_topology(base, configs[i]);
    job.index.emplace(network);
    job.truth = solve_truth(*job.index, test_set, network.v0, 1);
    for (auto& t : job.truth)
      if (t) t = to_magnitudes(*t);
    try {
      TrainOptions train_opts = opts.train;
      train_opts.jobs = 1;  // the pool is already parallel over topologies
      job.params = train(*job.index, train_set, network.v0, train_opts);
    } catch (const NumericalError& e) {
      log_warn("topology " + std::to_string(i) + ": training failed: " + e.what());
    }
  });

  for (int i = 0; i < t_count; ++i)
    if (!jobs[i].params) result.failed_rows.push_back(i);

  // Baselines: traditional model per topology. Reconfiguration keeps the
  // substation, so base.v0 carries over.
  for (int j = 0; j < t_count; ++j) {
    const NetworkIndex& index = *jobs[j].index;
    const double v0 = base.v0;
    const LdfParams nominal = nominal_params(index);
    std::vector<std::optional<Vec>> approx(test_set.size());
    for (std::size_t m = 0; m < test_set.size(); ++m)
      if (jobs[j].truth[m])
        approx[m] = to_magnitudes(oldf_voltages(index, nominal, test_set.scenarios[m], v0));
    result.baseline[j] = error_metrics(jobs[j].truth, approx).eps_avg;
  }

  // Cross grid: params trained on i, adapted to j.
  parallel_for(t_count, opts.jobs, [&](std::size_t i) {
    if (!jobs[i].params) return;
    for (int j = 0; j < t_count; ++j) {
      const NetworkIndex& target = *jobs[j].index;
      const LdfParams adapted = adapt_params(*jobs[i].params, *jobs[i].index, target);
      std::vector<std::optional<Vec>> approx(test_set.size());
      for (std::size_t m = 0; m < test_set.size(); ++m)
        if (jobs[j].truth[m])
          approx[m] = to_magnitudes(oldf_voltages(target, adapted, test_set.scenarios[m], base.v0));
      const ErrorReport report = error_metrics(jobs[j].truth, approx);
      result.eps_avg(i, j) = report.eps_avg;
      result.dominates(i, j) = report.eps_avg < result.baseline[j];
    }
  });
  return result;
}

std::string topology_matrix_csv(const TopologyMatrix& m) {
  std::ostringstream out;
  const int t = static_cast<int>(m.configs.size());
  out << "trained_on";
  for (int j = 0; j < t; ++j) out << ",topo_" << j + 1;
  out << "\n";
  for (int i = 0; i < t; ++i) {
    out << "topo_" << i + 1;
    for (int j = 0; j < t; ++j) out << "," << m.eps_avg(i, j);
    out << "\n";
  }
  out << "baseline_ldf";
  for (int j = 0; j < t; ++j) out << "," << m.baseline[j];
  out << "\n";
  return out.str();
}

std::string topology_long_csv(const TopologyMatrix& m) {
  std::ostringstream out;
  out << "topology_i,topology_j,eps_avg\n";
  const int t = static_cast<int>(m.configs.size());
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j) out << i + 1 << "," << j + 1 << "," << m.eps_avg(i, j) << "\n";
  return out.str();
}

std::string dominance_csv(const TopologyMatrix& m) {
  std::ostringstream out;
  const int t = static_cast<int>(m.configs.size());
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < t; ++j) out << (m.dominates(i, j) ? 1 : 0) << (j + 1 < t ? "," : "");
    out << "\n";
  }
  return out.str();
}

}  // namespace oldf
