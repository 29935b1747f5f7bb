#include "oldf/training.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "oldf/log.hpp"
#include "oldf/parallel.hpp"

namespace oldf {

namespace {

// One multiplier per bus per scenario, scenario-major draw order.
template <typename Draw>
std::vector<Vec> per_bus_multipliers(Eigen::Index buses, int count, std::uint64_t seed,
                                     Draw&& draw) {
  std::mt19937_64 rng(seed);
  std::vector<Vec> factors(count, Vec::Ones(buses));
  for (int m = 0; m < count; ++m)
    for (Eigen::Index i = 0; i < buses; ++i) factors[m][i] = draw(rng);
  return factors;
}

}  // namespace

ScenarioSet sample_training_scenarios(const InjectionScenario& base, int count,
                                      std::uint64_t seed, double std_dev) {
  if (count < 1) throw InputError("scenario count must be at least 1");
  ScenarioSet set;
  set.family = ScenarioFamily::kBaseScaledNormal;
  set.seed = seed;
  std::normal_distribution<double> normal(1.0, std_dev);
  auto factors = per_bus_multipliers(base.p.size(), count, seed, [&](std::mt19937_64& rng) {
    return std_dev == 0.0 ? 1.0 : normal(rng);
  });
  set.scenarios.reserve(count);
  for (int m = 0; m < count; ++m)
    set.scenarios.push_back({base.p.cwiseProduct(factors[m]), base.q.cwiseProduct(factors[m])});
  return set;
}

ScenarioSet sample_highload_scenarios(const InjectionScenario& base) {
  ScenarioSet set;
  set.family = ScenarioFamily::kHighLoadGrid;
  for (int sign = -1; sign <= 1; sign += 2) {
    for (int k = 0; k <= 14; ++k) {
      // 15 factors across [1, 2] (negated for the mirrored band).
      const double factor = sign * (1.0 + static_cast<double>(k) / 14.0);
      set.scenarios.push_back({factor * base.p, factor * base.q});
    }
  }
  return set;
}

ScenarioSet sample_uniform_scenarios(const InjectionScenario& base, int count, double lo,
                                     double hi, std::uint64_t seed) {
  if (count < 1) throw InputError("scenario count must be at least 1");
  if (lo > hi) throw InputError("uniform scenario range has lo > hi");
  ScenarioSet set;
  set.family = ScenarioFamily::kUniformRandom;
  set.seed = seed;
  std::uniform_real_distribution<double> uniform(lo, hi);
  auto factors = per_bus_multipliers(base.p.size(), count, seed, [&](std::mt19937_64& rng) {
    return lo == hi ? lo : uniform(rng);
  });
  set.scenarios.reserve(count);
  for (int m = 0; m < count; ++m)
    set.scenarios.push_back({base.p.cwiseProduct(factors[m]), base.q.cwiseProduct(factors[m])});
  return set;
}

namespace {

// Expand a per-bus multiplier onto the stacked (bus, phase) layout.
Vec expand_bus_factors(const NetworkIndex3& index, const Vec& per_bus) {
  Vec stacked(index.stacked_size());
  for (int bus = 1; bus < index.bus_count(); ++bus) {
    for (int phi = 0; phi < 3; ++phi) {
      const int off = index.stacked_offset(bus, phi);
      if (off >= 0) stacked[off] = per_bus[bus - 1];
    }
  }
  return stacked;
}

}  // namespace

ScenarioSet3 sample_training_scenarios3(const NetworkIndex3& index, const InjectionScenario3& base,
                                        int count, std::uint64_t seed, double std_dev) {
  if (count < 1) throw InputError("scenario count must be at least 1");
  ScenarioSet3 set;
  set.family = ScenarioFamily::kBaseScaledNormal;
  set.seed = seed;
  std::normal_distribution<double> normal(1.0, std_dev);
  auto factors = per_bus_multipliers(index.bus_count() - 1, count, seed,
                                     [&](std::mt19937_64& rng) {
    return std_dev == 0.0 ? 1.0 : normal(rng);
  });
  for (int m = 0; m < count; ++m) {
    const Vec stacked = expand_bus_factors(index, factors[m]);
    set.scenarios.push_back({base.p.cwiseProduct(stacked), base.q.cwiseProduct(stacked)});
  }
  return set;
}

ScenarioSet3 sample_uniform_scenarios3(const NetworkIndex3& index, const InjectionScenario3& base,
                                       int count, double lo, double hi, std::uint64_t seed) {
  if (count < 1) throw InputError("scenario count must be at least 1");
  if (lo > hi) throw InputError("uniform scenario range has lo > hi");
  ScenarioSet3 set;
  set.family = ScenarioFamily::kUniformRandom;
  set.seed = seed;
  std::uniform_real_distribution<double> uniform(lo, hi);
  auto factors = per_bus_multipliers(index.bus_count() - 1, count, seed,
                                     [&](std::mt19937_64& rng) {
    return lo == hi ? lo : uniform(rng);
  });
  for (int m = 0; m < count; ++m) {
    const Vec stacked = expand_bus_factors(index, factors[m]);
    set.scenarios.push_back({base.p.cwiseProduct(stacked), base.q.cwiseProduct(stacked)});
  }
  return set;
}

// ---------------------------------------------------------------------------
// Truth batches
// ---------------------------------------------------------------------------

std::vector<std::optional<Vec>> solve_truth(const NetworkIndex& index, const ScenarioSet& set,
                                            double v0, std::size_t jobs,
                                            const SolveOptions& opts) {
  std::vector<std::optional<Vec>> truth(set.size());
  parallel_for(set.size(), jobs, [&](std::size_t m) {
    try {
      PfSolution sol = solve_distflow(index, set.scenarios[m], v0, opts);
      if (sol.converged) truth[m] = sol.v_tail();
    } catch (const NumericalError&) {
      // diverged; leave the slot empty
    }
  });
  int dropped = 0;
  for (const auto& t : truth)
    if (!t) ++dropped;
  if (dropped > 0)
    log_warn(std::to_string(dropped) + " of " + std::to_string(set.size()) +
             " scenarios did not converge and were dropped");
  return truth;
}

std::vector<std::optional<Vec>> solve_truth3(const NetworkIndex3& index, const ScenarioSet3& set,
                                             std::size_t jobs, const SolveOptions& opts) {
  std::vector<std::optional<Vec>> truth(set.size());
  parallel_for(set.size(), jobs, [&](std::size_t m) {
    try {
      PfSolution3 sol = solve_distflow3(index, set.scenarios[m], opts);
      if (sol.converged) truth[m] = sol.v;
    } catch (const NumericalError&) {
    }
  });
  int dropped = 0;
  for (const auto& t : truth)
    if (!t) ++dropped;
  if (dropped > 0)
    log_warn(std::to_string(dropped) + " of " + std::to_string(set.size()) +
             " three-phase scenarios did not converge and were dropped");
  return truth;
}

// ---------------------------------------------------------------------------
// Loss and gradients
// ---------------------------------------------------------------------------

namespace {

int usable_count(const std::vector<std::optional<Vec>>& truth) {
  int usable = 0;
  for (const auto& t : truth)
    if (t) ++usable;
  if (usable == 0) throw NumericalError("no usable scenarios: every truth solve failed");
  return usable;
}

}  // namespace

double loss(const NetworkIndex& index, const LdfParams& params, const ScenarioSet& set,
            const std::vector<std::optional<Vec>>& truth, double v0) {
  const int usable = usable_count(truth);
  const double norm = 1.0 / (static_cast<double>(usable) * (index.bus_count() - 1));
  double total = 0.0;
  for (std::size_t m = 0; m < set.size(); ++m) {
    if (!truth[m]) continue;
    const Vec err = oldf_voltages(index, params, set.scenarios[m], v0) - *truth[m];
    total += err.squaredNorm();
  }
  return norm * total;
}

Vec loss_gradients(const NetworkIndex& index, const LdfParams& params, const ScenarioSet& set,
                   const std::vector<std::optional<Vec>>& truth, double v0) {
  const int usable = usable_count(truth);
  const int branches = index.branch_count();
  const int buses = index.bus_count() - 1;
  const double scale = 2.0 / (static_cast<double>(usable) * buses);

  Vec g_dr = Vec::Zero(branches);
  Vec g_dx = Vec::Zero(branches);
  Vec g_gamma = Vec::Zero(buses);
  Vec g_rho = Vec::Zero(buses);
  Vec g_varrho = Vec::Zero(buses);

  for (std::size_t m = 0; m < set.size(); ++m) {
    if (!truth[m]) continue;
    const InjectionScenario& sc = set.scenarios[m];
    const Vec acc_p = index.accumulate_downstream(sc.p + params.rho);
    const Vec acc_q = index.accumulate_downstream(sc.q + params.varrho);
    const Vec v = Vec::Constant(buses, v0) +
                  2.0 * index.sum_along_paths(params.dr.cwiseProduct(acc_p) +
                                              params.dx.cwiseProduct(acc_q)) +
                  params.gamma;
    const Vec err = v - *truth[m];
    const Vec acc_err = index.accumulate_downstream(err);
    // d v / d dr_b acts through the accumulated downstream injections, so
    // the chain rule pairs them with the downstream-accumulated residual.
    g_dr += 2.0 * acc_p.cwiseProduct(acc_err);
    g_dx += 2.0 * acc_q.cwiseProduct(acc_err);
    g_gamma += err;
    g_rho += 2.0 * index.sum_along_paths(params.dr.cwiseProduct(acc_err));
    g_varrho += 2.0 * index.sum_along_paths(params.dx.cwiseProduct(acc_err));
  }
  LdfParams g;
  g.dr = scale * g_dr;
  g.dx = scale * g_dx;
  g.gamma = scale * g_gamma;
  g.rho = scale * g_rho;
  g.varrho = scale * g_varrho;
  return g.pack();
}

double loss3(const NetworkIndex3& index, const Ldf3Params& params, const ScenarioSet3& set,
             const std::vector<std::optional<Vec>>& truth) {
  const int usable = usable_count(truth);
  const double norm = 1.0 / (static_cast<double>(usable) * index.stacked_size());
  double total = 0.0;
  for (std::size_t m = 0; m < set.size(); ++m) {
    if (!truth[m]) continue;
    const Vec err = ldf3_voltages(index, params, set.scenarios[m]) - *truth[m];
    total += err.squaredNorm();
  }
  return norm * total;
}

Vec loss3_gradients(const NetworkIndex3& index, const Ldf3Params& params, const ScenarioSet3& set,
                    const std::vector<std::optional<Vec>>& truth) {
  const int usable = usable_count(truth);
  const int branches = index.branch_count();
  const Eigen::Index n = index.stacked_size();
  const double scale = 2.0 / (static_cast<double>(usable) * n);

  Ldf3Params g;
  g.hp.assign(branches, Mat3::Zero());
  g.hq.assign(branches, Mat3::Zero());
  g.gamma3 = Vec::Zero(n);
  g.rho3 = Vec::Zero(n);
  g.varrho3 = Vec::Zero(n);

  for (std::size_t m = 0; m < set.size(); ++m) {
    if (!truth[m]) continue;
    const InjectionScenario3& sc = set.scenarios[m];
    const std::vector<Vec3> acc_p = index.accumulate_downstream(sc.p + params.rho3);
    const std::vector<Vec3> acc_q = index.accumulate_downstream(sc.q + params.varrho3);
    const Vec err = ldf3_voltages(index, params, sc) - *truth[m];
    const std::vector<Vec3> acc_err = index.accumulate_downstream(err);

    // v_n picks up HP_b * (-acc_p_b) for every branch b on the path to n, so
    // the HP gradient is the outer product of the downstream residual sum
    // with the accumulated flows; rho enters through those flows.
    std::vector<Vec3> rho_term(branches);
    std::vector<Vec3> varrho_term(branches);
    for (int s = 0; s < branches; ++s) {
      g.hp[s] += acc_err[s] * (-acc_p[s]).transpose();
      g.hq[s] += acc_err[s] * (-acc_q[s]).transpose();
      rho_term[s] = -params.hp[s].transpose() * acc_err[s];
      varrho_term[s] = -params.hq[s].transpose() * acc_err[s];
    }
    g.gamma3 += err;
    g.rho3 += index.sum_along_paths(rho_term);
    g.varrho3 += index.sum_along_paths(varrho_term);
  }
  return scale * g.pack(index);
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

LdfParams train(const NetworkIndex& index, const ScenarioSet& set, double v0,
                const TrainOptions& opts, TrainReport* report) {
  if (set.size() == 0) throw InputError("training scenario set is empty");
  const auto start = std::chrono::steady_clock::now();
  const auto truth = solve_truth(index, set, v0, opts.jobs, opts.solver);
  int dropped = 0;
  for (const auto& t : truth)
    if (!t) ++dropped;
  usable_count(truth);

  const Eigen::Index branches = index.branch_count();
  const Eigen::Index buses = index.bus_count() - 1;
  const Vec x0 = nominal_params(index).pack();
  auto objective = [&](const Vec& x) {
    return loss(index, LdfParams::unpack(x, branches, buses), set, truth, v0);
  };
  auto gradient = [&](const Vec& x) {
    return loss_gradients(index, LdfParams::unpack(x, branches, buses), set, truth, v0);
  };

  TncOptions tnc;
  tnc.grad_tol = opts.grad_tol;
  tnc.max_iter = opts.max_iter;
  tnc.check_gradient = log_level() >= 2;  // debug-mode audit at x0
  TncResult result = tnc_minimize(objective, gradient, x0, tnc);

  if (report) {
    report->initial_loss = objective(x0);
    report->final_loss = result.f;
    report->iterations = result.iterations;
    report->grad_norm = result.grad_norm;
    report->dropped_scenarios = dropped;
    report->exit_reason = to_string(result.exit);
    report->wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return LdfParams::unpack(result.x, branches, buses);
}

Ldf3Params train3(const NetworkIndex3& index, const ScenarioSet3& set, const TrainOptions& opts,
                  TrainReport* report) {
  if (set.size() == 0) throw InputError("training scenario set is empty");
  const auto start = std::chrono::steady_clock::now();
  const auto truth = solve_truth3(index, set, opts.jobs, opts.solver);
  int dropped = 0;
  for (const auto& t : truth)
    if (!t) ++dropped;
  usable_count(truth);

  const Vec x0 = nominal_h_blocks(index).pack(index);
  auto objective = [&](const Vec& x) {
    return loss3(index, Ldf3Params::unpack(x, index), set, truth);
  };
  auto gradient = [&](const Vec& x) {
    return loss3_gradients(index, Ldf3Params::unpack(x, index), set, truth);
  };

  TncOptions tnc;
  tnc.grad_tol = opts.grad_tol;
  tnc.max_iter = opts.max_iter;
  tnc.check_gradient = log_level() >= 2;  // debug-mode audit at x0
  TncResult result = tnc_minimize(objective, gradient, x0, tnc);

  if (report) {
    report->initial_loss = objective(x0);
    report->final_loss = result.f;
    report->iterations = result.iterations;
    report->grad_norm = result.grad_norm;
    report->dropped_scenarios = dropped;
    report->exit_reason = to_string(result.exit);
    report->wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return Ldf3Params::unpack(result.x, index);
}

}  // namespace oldf
