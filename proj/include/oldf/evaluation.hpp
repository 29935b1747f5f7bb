#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oldf/lindistflow.hpp"
#include "oldf/network.hpp"
#include "oldf/scenario.hpp"
#include "oldf/training.hpp"
#include "oldf/types.hpp"

namespace oldf {

// Voltage-error metrics over a scenario batch:
//   eps_max = max_m ||e_m||_inf,  eps_avg = 1/(|M| |N'|) sum_m ||e_m||_1.
// The comparison pipelines feed voltage-magnitude vectors, which is the
// space the published feeder benchmarks quote.
struct ErrorReport {
  double eps_max = 0.0;
  double eps_avg = 0.0;
  int worst_bus = -1;       // bus achieving eps_max
  int worst_scenario = -1;  // scenario achieving eps_max
  int scenarios_used = 0;
  int scenarios_dropped = 0;
};

ErrorReport error_metrics(const std::vector<std::optional<Vec>>& truth,
                          const std::vector<std::optional<Vec>>& approx);

// Squared voltages -> magnitudes, clamping negative model outputs to zero.
Vec to_magnitudes(const Vec& v_squared);

// Evaluates the traditional and parameterized models against the nonlinear
// truth on the same scenario set, with an identical dropped-scenario mask so
// the comparison is paired.
struct ModelComparison {
  ErrorReport ldf;
  ErrorReport oldf;
};

ModelComparison compare_models(const NetworkIndex& index, const LdfParams& params,
                               const ScenarioSet& set, double v0, std::size_t jobs = 1);

ModelComparison compare_models3(const NetworkIndex3& index, const Ldf3Params& params,
                                const ScenarioSet3& set, std::size_t jobs = 1);

// ---------------------------------------------------------------------------
// Cross-topology study
// ---------------------------------------------------------------------------

// Row i: parameters trained on topology i, adapted to topology j by keeping
// trained dr/dx for surviving branches, inserting the physical r/x for newly
// closed ones, and leaving the bias vectors untouched.
struct TopologyMatrix {
  std::vector<TopologyConfig> configs;
  Mat eps_avg;                   // T x T; NaN for rows whose training failed
  Vec baseline;                  // traditional-model eps_avg per topology
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> dominates;  // eps < baseline
  std::vector<int> failed_rows;  // topologies whose training did not complete
};

struct SweepOptions {
  TrainOptions train;
  // Test family: uniform scaling of the base loads.
  int test_count = 1000;
  double test_lo = 0.0;
  double test_hi = 1.5;
  std::uint64_t test_seed = 1;
  std::uint64_t train_seed = 7;
  int train_count = 20;
  std::size_t jobs = 1;
};

TopologyMatrix topology_sweep(const RadialNetwork& base, const InjectionScenario& base_load,
                              const std::vector<TopologyConfig>& configs,
                              const SweepOptions& opts);

// Carries trained parameters from one topology to another by stable branch
// id (the quoted adaptation rule). Exposed for tests.
LdfParams adapt_params(const LdfParams& trained, const NetworkIndex& trained_index,
                       const NetworkIndex& target_index);

// CSV renderings for external plotting.
std::string topology_matrix_csv(const TopologyMatrix& m);
std::string topology_long_csv(const TopologyMatrix& m);
std::string dominance_csv(const TopologyMatrix& m);

}  // namespace oldf
