#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oldf/distflow.hpp"
#include "oldf/lindistflow.hpp"
#include "oldf/network.hpp"
#include "oldf/scenario.hpp"
#include "oldf/tnc.hpp"
#include "oldf/types.hpp"

namespace oldf {

// ---------------------------------------------------------------------------
// Scenario sampling. All draws flow through one seeded generator; the same
// seed reproduces the same set bit for bit on a given platform.
// ---------------------------------------------------------------------------

// Scales every bus's base injection by an independent Normal(1, std) draw
// (one multiplier per bus per scenario, applied to p and q together).
ScenarioSet sample_training_scenarios(const InjectionScenario& base, int count,
                                      std::uint64_t seed, double std_dev = 0.35);

// 30 scenarios scaling all injections uniformly by a factor stepping at 1/14
// across [-2, -1] and [1, 2].
ScenarioSet sample_highload_scenarios(const InjectionScenario& base);

// Scales every bus's injection by an independent Uniform(lo, hi) draw.
ScenarioSet sample_uniform_scenarios(const InjectionScenario& base, int count, double lo,
                                     double hi, std::uint64_t seed);

// Three-phase variants; the per-bus multiplier applies to all present phases.
ScenarioSet3 sample_training_scenarios3(const NetworkIndex3& index,
                                        const InjectionScenario3& base, int count,
                                        std::uint64_t seed, double std_dev = 0.35);
ScenarioSet3 sample_uniform_scenarios3(const NetworkIndex3& index, const InjectionScenario3& base,
                                       int count, double lo, double hi, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Ground truth batches
// ---------------------------------------------------------------------------

// Nonlinear solutions per scenario; entries without a value did not converge
// (or tripped the divergence guard) and are excluded downstream.
std::vector<std::optional<Vec>> solve_truth(const NetworkIndex& index, const ScenarioSet& set,
                                            double v0, std::size_t jobs = 1,
                                            const SolveOptions& opts = {});
std::vector<std::optional<Vec>> solve_truth3(const NetworkIndex3& index, const ScenarioSet3& set,
                                             std::size_t jobs = 1, const SolveOptions& opts = {});

// ---------------------------------------------------------------------------
// Loss and analytic gradients
// ---------------------------------------------------------------------------

// Mean squared voltage error over the usable scenarios:
//   L = 1/(|M| |N'|) sum_m ||v_m^model - v_m^truth||^2.
// Scenarios whose truth entry is empty are skipped; throws NumericalError if
// none remain.
double loss(const NetworkIndex& index, const LdfParams& params, const ScenarioSet& set,
            const std::vector<std::optional<Vec>>& truth, double v0);

// Gradient in LdfParams::pack order [dr, dx, gamma, rho, varrho].
Vec loss_gradients(const NetworkIndex& index, const LdfParams& params, const ScenarioSet& set,
                   const std::vector<std::optional<Vec>>& truth, double v0);

// Three-phase loss normalized by the number of present (bus, phase) pairs.
double loss3(const NetworkIndex3& index, const Ldf3Params& params, const ScenarioSet3& set,
             const std::vector<std::optional<Vec>>& truth);
Vec loss3_gradients(const NetworkIndex3& index, const Ldf3Params& params, const ScenarioSet3& set,
                    const std::vector<std::optional<Vec>>& truth);

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct TrainOptions {
  double grad_tol = 1e-6;
  int max_iter = 100;
  std::size_t jobs = 1;
  SolveOptions solver;
};

struct TrainReport {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  double wall_time_s = 0.0;
  int dropped_scenarios = 0;
  std::string exit_reason;
};

// Offline phase: solves the nonlinear truth for every scenario, starts from
// the nominal parameters, and minimizes the loss with tnc_minimize.
LdfParams train(const NetworkIndex& index, const ScenarioSet& set, double v0,
                const TrainOptions& opts, TrainReport* report = nullptr);
Ldf3Params train3(const NetworkIndex3& index, const ScenarioSet3& set, const TrainOptions& opts,
                  TrainReport* report = nullptr);

}  // namespace oldf
