#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oldf/case_io.hpp"
#include "test_util.hpp"

using namespace oldf;

TEST_CASE("minimal two-bus case parses") {
  const std::string text = R"({
    "base_mva": 10.0,
    "buses": [{"id": 0}, {"id": 1, "pd_mw": 1.0, "qd_mvar": 0.5}],
    "branches": [{"id": 1, "from": 0, "to": 1, "r": 0.01, "x": 0.02}]
  })";
  CaseFile c = parse_case_json(text);
  CHECK(c.network.bus_count == 2);
  CHECK(c.network.branches.size() == 1);
  CHECK(c.base.p[0] == doctest::Approx(-0.1));  // consumption becomes negative injection
  CHECK(c.base.q[0] == doctest::Approx(-0.05));
}

TEST_CASE("shipped 33-bus case has the advertised structure") {
  CaseFile c = load_case("data/ieee33.json");
  CHECK(c.network.bus_count == 33);
  CHECK(c.network.branches.size() == 37);
  CHECK(c.network.open_ids == std::set<int>{33, 34, 35, 36, 37});
  CHECK(c.network.switchable_ids.size() == 8);
  // Total base load: 3.715 MW / 2.3 MVAr.
  CHECK(-c.base.p.sum() * c.base_mva == doctest::Approx(3.715));
  CHECK(-c.base.q.sum() * c.base_mva == doctest::Approx(2.3));
}

TEST_CASE("dangling bus reference is a semantic error naming the bus") {
  const std::string text = R"({
    "base_mva": 10.0,
    "buses": [{"id": 0}, {"id": 1, "pd_mw": 1.0}],
    "branches": [{"id": 1, "from": 0, "to": 99, "r": 0.01, "x": 0.02}]
  })";
  try {
    parse_case_json(text);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("99") != std::string::npos);
  }
}

TEST_CASE("missing fields and malformed json are schema errors") {
  CHECK_THROWS_AS(parse_case_json("{not json"), InputError);
  CHECK_THROWS_AS(parse_case_json(R"({"buses": []})"), InputError);  // no base_mva
  CHECK_THROWS_AS(parse_case_json(R"({"base_mva": -5, "buses": [], "branches": []})"),
                  InputError);
}

TEST_CASE("non-radial closed set is rejected at parse time") {
  const std::string text = R"({
    "base_mva": 10.0,
    "buses": [{"id": 0}, {"id": 1}, {"id": 2}],
    "branches": [
      {"id": 1, "from": 0, "to": 1, "r": 0.01, "x": 0.02},
      {"id": 2, "from": 1, "to": 2, "r": 0.01, "x": 0.02},
      {"id": 3, "from": 0, "to": 2, "r": 0.01, "x": 0.02}
    ]
  })";
  CHECK_THROWS_AS(parse_case_json(text), InputError);
}

TEST_CASE("json round trip preserves random feeders") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CaseFile original;
    original.name = "random";
    original.base_mva = 10.0;
    original.network = testing::random_tree(3 + static_cast<int>(seed % 30), seed);
    original.base = testing::random_loads(original.network.bus_count, seed + 1);
    CaseFile reparsed = parse_case_json(serialize_case_json(original));
    REQUIRE(reparsed.network.bus_count == original.network.bus_count);
    REQUIRE(reparsed.network.branches.size() == original.network.branches.size());
    for (std::size_t b = 0; b < original.network.branches.size(); ++b) {
      CHECK(reparsed.network.branches[b].id == original.network.branches[b].id);
      CHECK(reparsed.network.branches[b].r == original.network.branches[b].r);
      CHECK(reparsed.network.branches[b].x == original.network.branches[b].x);
    }
    // Per-unit -> MW -> per-unit is exact well below the 1e-12 contract.
    CHECK((reparsed.base.p - original.base.p).lpNorm<Eigen::Infinity>() < 1e-15);
    CHECK((reparsed.base.q - original.base.q).lpNorm<Eigen::Infinity>() < 1e-15);
  }
}

TEST_CASE("ohm to per-unit conversion uses the voltage base") {
  const std::string text = R"({
    "base_mva": 100.0,
    "base_kv": 12.66,
    "impedance_unit": "ohm",
    "buses": [{"id": 0}, {"id": 1, "pd_mw": 0.1}],
    "branches": [{"id": 1, "from": 0, "to": 1, "r": 1.602756, "x": 0.0}]
  })";
  CaseFile c = parse_case_json(text);
  CHECK(c.network.branches[0].r == doctest::Approx(1.0).epsilon(1e-6));
}

// ---------------------------------------------------------------------------
// MATPOWER subset
// ---------------------------------------------------------------------------

TEST_CASE("hand-written three-bus matpower case") {
  const std::string text = R"(
function mpc = case3
mpc.version = '2';
mpc.baseMVA = 10;
mpc.bus = [
 1 3 0.0 0.0 0 0 1 1 0 11 1 1.1 0.9;
 2 1 0.5 0.2 0 0 1 1 0 11 1 1.1 0.9;
 3 1 0.3 0.1 0 0 1 1 0 11 1 1.1 0.9;
];
mpc.gen = [
 1 0 0 10 -10 1 10 1 10 0;
];
mpc.branch = [
 1 2 0.01 0.02 0 0 0 0 0 0 1;
 2 3 0.015 0.03 0 0 0 0 0 0 1;
];
)";
  CaseFile c = parse_matpower_subset(text);
  CHECK(c.network.bus_count == 3);
  CHECK(c.network.branches.size() == 2);
  CHECK(c.base_mva == 10.0);
  CHECK(c.base.p[0] == doctest::Approx(-0.05));
  CHECK(c.network.branches[0].r == 0.01);  // already per-unit
}

TEST_CASE("shipped case22 loads as a radial 22-bus feeder") {
  CaseFile c = parse_matpower_subset(read_file("data/case22.m"));
  CHECK(c.network.bus_count == 22);
  // 21 closed branches + 1 open tie.
  CHECK(c.network.branches.size() == 22);
  CHECK(c.network.open_ids.size() == 1);
  CHECK(validate_radial(c.network).ok);
  int closed = 0;
  for (const auto& b : c.network.branches)
    if (!c.network.is_open(b.id)) ++closed;
  CHECK(closed == 21);
}

TEST_CASE("status zero loads a branch as open") {
  const std::string text = R"(
mpc.baseMVA = 10;
mpc.bus = [
 1 3 0.0 0.0 0 0 1 1 0 11 1 1.1 0.9;
 2 1 0.5 0.2 0 0 1 1 0 11 1 1.1 0.9;
];
mpc.branch = [
 1 2 0.01 0.02 0 0 0 0 0 0 1;
 1 2 0.05 0.05 0 0 0 0 0 0 0;
];
)";
  CaseFile c = parse_matpower_subset(text);
  CHECK(c.network.branches.size() == 2);
  CHECK(c.network.open_ids.size() == 1);
  CHECK(validate_radial(c.network).ok);
}

TEST_CASE("multiple slack buses are rejected") {
  const std::string text = R"(
mpc.baseMVA = 10;
mpc.bus = [
 1 3 0 0 0 0 1 1 0 11 1 1.1 0.9;
 2 3 0 0 0 0 1 1 0 11 1 1.1 0.9;
];
mpc.branch = [
 1 2 0.01 0.02 0 0 0 0 0 0 1;
];
)";
  CHECK_THROWS_AS(parse_matpower_subset(text), InputError);
}

// ---------------------------------------------------------------------------
// Parameter files
// ---------------------------------------------------------------------------

TEST_CASE("parameter files round trip bit-exactly") {
  CaseFile c = load_case("data/ieee33.json");
  NetworkIndex index(c.network);
  LdfParams params = nominal_params(index);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> jitter(0.0, 1e-3);
  for (Eigen::Index i = 0; i < params.gamma.size(); ++i) params.gamma[i] = jitter(rng);
  ParamFileMeta meta;
  meta.scenario_count = 20;
  meta.seed = 7;
  meta.final_loss = 3.2e-8;
  const std::string text = write_params_json(c.network, params, meta);
  ParamFileMeta meta_back;
  LdfParams back = read_params_json(text, c.network, &meta_back);
  CHECK(back.dr == params.dr);
  CHECK(back.dx == params.dx);
  CHECK(back.gamma == params.gamma);
  CHECK(back.rho == params.rho);
  CHECK(back.varrho == params.varrho);
  CHECK(meta_back.seed == 7);
  CHECK(meta_back.final_loss == 3.2e-8);
}

TEST_CASE("fingerprint mismatch across feeders is a hard error") {
  CaseFile c33 = load_case("data/ieee33.json");
  CaseFile c69 = load_case("data/ieee69.json");
  NetworkIndex index(c33.network);
  const std::string text =
      write_params_json(c33.network, nominal_params(index), {});
  CHECK_THROWS_AS(read_params_json(text, c69.network), InputError);
}

TEST_CASE("fingerprint mismatch across topologies of one feeder") {
  CaseFile c = load_case("data/ieee33.json");
  RadialNetwork swapped = apply_topology(c.network, {{4}, {33}});
  CHECK(network_fingerprint(c.network) != network_fingerprint(swapped));
  NetworkIndex index(c.network);
  const std::string text = write_params_json(c.network, nominal_params(index), {});
  CHECK_THROWS_AS(read_params_json(text, swapped), InputError);
}

TEST_CASE("non-finite parameters are rejected on read") {
  CaseFile c = load_case("data/ieee33.json");
  NetworkIndex index(c.network);
  std::string text = write_params_json(c.network, nominal_params(index), {});
  const auto at = text.find("\"dr\": [");
  text.replace(at + 8, 1, "null,0");  // corrupt the first entry
  CHECK_THROWS_AS(read_params_json(text, c.network), InputError);
}

// ---------------------------------------------------------------------------
// Scenario CSV
// ---------------------------------------------------------------------------

TEST_CASE("scenario csv round trip") {
  InjectionScenario base{Vec::Constant(3, -0.1), Vec::Constant(3, -0.05)};
  ScenarioSet set = sample_training_scenarios(base, 7, 5);
  const std::string csv = write_scenarios_csv(set);
  ScenarioSet back = read_scenarios_csv(csv, 3);
  REQUIRE(back.size() == 7);
  for (std::size_t m = 0; m < 7; ++m) {
    CHECK(back.scenarios[m].p == set.scenarios[m].p);  // %.17g is lossless
    CHECK(back.scenarios[m].q == set.scenarios[m].q);
  }
}

TEST_CASE("scenario csv rejects ragged rows") {
  CHECK_THROWS_AS(read_scenarios_csv("1.0,2.0,3.0\n", 2), InputError);
}
