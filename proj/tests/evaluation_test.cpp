#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oldf/case_io.hpp"
#include "oldf/evaluation.hpp"
#include "test_util.hpp"

using namespace oldf;

namespace {

std::vector<std::optional<Vec>> wrap(std::initializer_list<Vec> vs) {
  std::vector<std::optional<Vec>> out;
  for (const auto& v : vs) out.emplace_back(v);
  return out;
}

}  // namespace

TEST_CASE("identical vectors give zero metrics") {
  Vec v(3);
  v << 1.0, 0.99, 0.98;
  ErrorReport r = error_metrics(wrap({v}), wrap({v}));
  CHECK(r.eps_max == 0.0);
  CHECK(r.eps_avg == 0.0);
  CHECK(r.scenarios_used == 1);
}

TEST_CASE("metric definitions on a 2-bus example") {
  Vec truth(2), approx(2);
  truth << 1.0, 1.0;
  approx << 1.001, 1.003;
  ErrorReport r = error_metrics(wrap({truth}), wrap({approx}));
  CHECK(r.eps_max == doctest::Approx(0.003).epsilon(1e-12));
  CHECK(r.eps_avg == doctest::Approx(0.002).epsilon(1e-12));
  CHECK(r.worst_bus == 2);
  CHECK(r.eps_avg <= r.eps_max);
}

TEST_CASE("metrics are permutation invariant over scenarios") {
  std::vector<std::optional<Vec>> truth, approx;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> draw(1.0, 0.01);
  for (int m = 0; m < 10; ++m) {
    Vec t(4), a(4);
    for (int i = 0; i < 4; ++i) {
      t[i] = draw(rng);
      a[i] = draw(rng);
    }
    truth.emplace_back(t);
    approx.emplace_back(a);
  }
  ErrorReport forward = error_metrics(truth, approx);
  std::reverse(truth.begin(), truth.end());
  std::reverse(approx.begin(), approx.end());
  ErrorReport backward = error_metrics(truth, approx);
  CHECK(forward.eps_avg == doctest::Approx(backward.eps_avg).epsilon(1e-15));
  CHECK(forward.eps_max == backward.eps_max);
}

TEST_CASE("empty input is rejected") {
  CHECK_THROWS_AS(error_metrics({}, {}), InputError);
}

TEST_CASE("dropped scenarios are excluded pairwise") {
  Vec v = Vec::Ones(2);
  std::vector<std::optional<Vec>> truth{v, std::nullopt, v};
  std::vector<std::optional<Vec>> approx{v, v, std::nullopt};
  ErrorReport r = error_metrics(truth, approx);
  CHECK(r.scenarios_used == 1);
  CHECK(r.scenarios_dropped == 2);
}

TEST_CASE("trained parameters dominate the traditional model on their set") {
  CaseFile c = load_case("data/ieee33.json");
  NetworkIndex index(c.network);
  ScenarioSet set = sample_training_scenarios(c.base, 10, 3);
  TrainOptions opts;
  LdfParams params = train(index, set, c.network.v0, opts, nullptr);
  ModelComparison cmp = compare_models(index, params, set, c.network.v0);
  CHECK(cmp.oldf.eps_avg <= cmp.ldf.eps_avg);
  CHECK(cmp.oldf.eps_max <= cmp.ldf.eps_max);
  CHECK(cmp.ldf.eps_avg <= cmp.ldf.eps_max);
}

TEST_CASE("zero-injection set is exact for both models") {
  NetworkIndex index{testing::random_tree(10, 9)};
  ScenarioSet set;
  set.scenarios.push_back({Vec::Zero(9), Vec::Zero(9)});
  ModelComparison cmp = compare_models(index, nominal_params(index), set, 1.0);
  CHECK(cmp.ldf.eps_max == 0.0);
  CHECK(cmp.oldf.eps_max == 0.0);
}

// ---------------------------------------------------------------------------
// Topology machinery
// ---------------------------------------------------------------------------

TEST_CASE("the 33-bus switch set yields exactly 35 radial configurations") {
  CaseFile c = load_case("data/ieee33.json");
  const auto configs = enumerate_radial_configs(c.network);
  CHECK(configs.size() == 35);
  auto contains = [&](std::set<int> open, std::set<int> close) {
    return std::any_of(configs.begin(), configs.end(), [&](const TopologyConfig& cfg) {
      return cfg.open_ids == open && cfg.closed_ids == close;
    });
  };
  CHECK(contains({}, {}));
  CHECK(contains({4}, {33}));
  CHECK(contains({4, 10, 26}, {33, 34, 37}));
  CHECK_FALSE(contains({4}, {34}));  // islands buses 5..18
  CHECK_FALSE(contains({4}, {36}));
  // Opening line 26 severs the 27..33 lateral; only ties 36 (18-33) and
  // 37 (25-29) reach it, so any config opening 26 must close one of them.
  for (const auto& cfg : configs) {
    if (cfg.open_ids.count(26))
      CHECK((cfg.closed_ids.count(36) || cfg.closed_ids.count(37)));
  }
}

TEST_CASE("parameter adaptation follows branch ids") {
  RadialNetwork net;
  net.bus_count = 4;
  net.branches.push_back({1, 0, 1, 0.01, 0.01});
  net.branches.push_back({2, 1, 2, 0.02, 0.02});
  net.branches.push_back({3, 2, 3, 0.03, 0.03});
  net.branches.push_back({4, 1, 3, 0.04, 0.04});
  net.open_ids = {4};
  net.switchable_ids = {3, 4};
  NetworkIndex before(net);
  LdfParams trained = nominal_params(before);
  trained.dr *= 1.5;  // pretend training moved the coefficients
  trained.gamma = Vec::Constant(3, -0.001);

  RadialNetwork swapped = apply_topology(net, {{3}, {4}});
  NetworkIndex after(swapped);
  LdfParams adapted = adapt_params(trained, before, after);
  // Surviving branches keep trained values; the newly closed one gets its
  // physical impedance; biases ride along unchanged.
  CHECK(adapted.dr[after.branch_slot(1)] == trained.dr[before.branch_slot(1)]);
  CHECK(adapted.dr[after.branch_slot(2)] == trained.dr[before.branch_slot(2)]);
  CHECK(adapted.dr[after.branch_slot(4)] == 0.04);
  CHECK(adapted.gamma == trained.gamma);
}

TEST_CASE("single-topology sweep dominates its baseline") {
  CaseFile c = load_case("data/ieee33.json");
  SweepOptions opts;
  opts.test_count = 100;
  std::vector<TopologyConfig> configs{{}};
  TopologyMatrix m = topology_sweep(c.network, c.base, configs, opts);
  REQUIRE(m.eps_avg.rows() == 1);
  CHECK(m.failed_rows.empty());
  CHECK(m.eps_avg(0, 0) <= m.baseline[0]);
  CHECK(m.dominates(0, 0));
}

TEST_CASE("small cross-topology sweep fills the grid") {
  CaseFile c = load_case("data/ieee33.json");
  std::vector<TopologyConfig> configs{{}, {{4}, {33}}, {{10}, {34}}};
  SweepOptions opts;
  opts.test_count = 50;
  opts.train.max_iter = 40;
  TopologyMatrix m = topology_sweep(c.network, c.base, configs, opts);
  CHECK(m.eps_avg.allFinite());
  for (int i = 0; i < 3; ++i) CHECK(m.dominates(i, i));  // self-trained beats baseline
  const std::string csv = topology_matrix_csv(m);
  CHECK(csv.find("baseline_ldf") != std::string::npos);
  const std::string longform = topology_long_csv(m);
  CHECK(std::count(longform.begin(), longform.end(), '\n') == 10);  // header + 9 cells
}
