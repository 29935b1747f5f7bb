#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/LU>

#include "oldf/network.hpp"
#include "test_util.hpp"

using namespace oldf;
using oldf::testing::chain3;
using oldf::testing::random_tree;
using oldf::testing::star3;
using oldf::testing::two_bus;

TEST_CASE("two-bus network validates as a minimal tree") {
  CHECK(validate_radial(two_bus()).ok);
}

TEST_CASE("an extra closed edge forces a cycle") {
  RadialNetwork net;
  net.bus_count = 3;
  net.branches.push_back({1, 0, 1, 0.01, 0.01});
  net.branches.push_back({2, 0, 2, 0.01, 0.01});
  net.branches.push_back({3, 1, 2, 0.01, 0.01});
  const RadialCheck check = validate_radial(net);
  CHECK_FALSE(check.ok);
  CHECK(check.detail.find("1") != std::string::npos);
  CHECK(check.detail.find("2") != std::string::npos);
}

TEST_CASE("missing branch leaves a bus disconnected") {
  RadialNetwork net;
  net.bus_count = 3;
  net.branches.push_back({1, 0, 1, 0.01, 0.01});
  net.branches.push_back({2, 0, 1, 0.01, 0.01});  // duplicate edge, bus 2 unreached
  const RadialCheck check = validate_radial(net);
  CHECK_FALSE(check.ok);
}

TEST_CASE("zero-impedance branch is allowed") {
  RadialNetwork net = two_bus(0.0, 0.0);
  CHECK(validate_radial(net).ok);
}

TEST_CASE("negative impedance is rejected") {
  RadialNetwork net = two_bus(-0.01, 0.02);
  CHECK_FALSE(validate_radial(net).ok);
}

TEST_CASE("paths and downstream sets") {
  NetworkIndex chain{chain3()};
  CHECK(chain.path(0).empty());
  CHECK(chain.path(1) == std::vector<int>{1});
  CHECK(chain.path(2) == std::vector<int>{1, 2});

  NetworkIndex star{star3()};
  CHECK(star.downstream_buses(1) == std::vector<int>{1});
  CHECK(star.downstream_buses(2) == std::vector<int>{2});
  CHECK(chain.downstream_buses(1) == std::vector<int>{1, 2});
}

TEST_CASE("incidence convention and matrix values") {
  NetworkIndex two{two_bus()};
  CHECK(two.incidence()(0, 0) == -1.0);
  CHECK(two.substation_column()[0] == 1.0);

  NetworkIndex chain{chain3()};
  Mat a = chain.incidence();
  CHECK(a(0, 0) == -1.0);
  CHECK(a(0, 1) == 0.0);
  CHECK(a(1, 0) == 1.0);
  CHECK(a(1, 1) == -1.0);
}

TEST_CASE("A^{-T} carries downstream injections onto branch flows") {
  NetworkIndex chain{chain3()};
  Vec p(2);
  p << -0.1, -0.2;
  // Solve A^T f = p explicitly and compare with the traversal kernel.
  Mat a = chain.incidence();
  Vec f = a.transpose().partialPivLu().solve(p);
  CHECK(f[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(f[1] == doctest::Approx(0.2).epsilon(1e-12));
  Vec acc = chain.accumulate_downstream(p);
  CHECK((f + acc).lpNorm<Eigen::Infinity>() < 1e-14);  // kernel is -A^{-T}
}

TEST_CASE("traversal kernels match dense LU on random trees") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int buses = 3 + static_cast<int>(seed % 10) * 20;
    RadialNetwork net = random_tree(buses, seed);
    NetworkIndex index(net);
    Mat a = index.incidence();
    Eigen::PartialPivLU<Mat> lu(a);
    Eigen::PartialPivLU<Mat> lut(a.transpose());

    const InjectionScenario sc = testing::random_injections(buses, seed + 1000);
    const Vec acc = index.accumulate_downstream(sc.p);
    const Vec dense_acc = -lut.solve(sc.p);
    CHECK((acc - dense_acc).lpNorm<Eigen::Infinity>() < 1e-12);

    const Vec w = index.sum_along_paths(acc);
    const Vec dense_w = -lu.solve(acc);
    CHECK((w - dense_w).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("apply_topology swaps switch states and revalidates") {
  // 4-bus loop candidate: 0-1-2-3 chain plus a tie 3, switchable {2, 4}.
  RadialNetwork net;
  net.bus_count = 4;
  net.branches.push_back({1, 0, 1, 0.01, 0.01});
  net.branches.push_back({2, 1, 2, 0.01, 0.01});
  net.branches.push_back({3, 2, 3, 0.01, 0.01});
  net.branches.push_back({4, 1, 3, 0.02, 0.02});  // tie, normally open
  net.open_ids = {4};
  net.switchable_ids = {2, 3, 4};
  REQUIRE(validate_radial(net).ok);

  SUBCASE("valid swap") {
    RadialNetwork swapped = apply_topology(net, {{3}, {4}});
    CHECK(validate_radial(swapped).ok);
    // Branch 3 keeps its id but is now open; 4 is closed and reoriented.
    CHECK(swapped.is_open(3));
    CHECK_FALSE(swapped.is_open(4));
    const Branch* tie = swapped.find_branch(4);
    REQUIRE(tie);
    CHECK(tie->from == 1);
    CHECK(tie->to == 3);
  }
  SUBCASE("closing without opening creates a cycle") {
    CHECK_THROWS_AS(apply_topology(net, {{}, {4}}), InputError);
  }
  SUBCASE("opening without closing islands a bus") {
    CHECK_THROWS_AS(apply_topology(net, {{3}, {}}), InputError);
  }
  SUBCASE("non-switchable id is rejected") {
    CHECK_THROWS_AS(apply_topology(net, {{1}, {4}}), InputError);
  }
  SUBCASE("re-applying the inverse restores the incidence matrix") {
    RadialNetwork swapped = apply_topology(net, {{3}, {4}});
    RadialNetwork restored = apply_topology(swapped, {{4}, {3}});
    NetworkIndex before(net);
    NetworkIndex after(restored);
    CHECK((before.incidence() - after.incidence()).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("branch identity survives reorientation") {
  // Reconfiguring can flip a branch's direction; parameters keyed on id must
  // still find it.
  RadialNetwork net;
  net.bus_count = 3;
  net.branches.push_back({1, 0, 1, 0.01, 0.01});
  net.branches.push_back({2, 1, 2, 0.02, 0.02});
  net.branches.push_back({3, 0, 2, 0.03, 0.03});
  net.open_ids = {3};
  net.switchable_ids = {1, 3};
  RadialNetwork swapped = apply_topology(net, {{1}, {3}});
  NetworkIndex index(swapped);
  const int slot = index.branch_slot(2);
  REQUIRE(slot >= 0);
  // Branch 2 now feeds bus 1 from bus 2.
  CHECK(index.closed_branches()[slot].from == 2);
  CHECK(index.closed_branches()[slot].to == 1);
  CHECK(index.closed_branches()[slot].r == 0.02);
}

TEST_CASE("multi-feeder substation is supported") {
  NetworkIndex star{star3()};
  CHECK(star.substation_column().sum() == 2.0);
  Mat a = star.incidence();
  CHECK(std::abs(a.determinant()) == 1.0);
}

// ---------------------------------------------------------------------------
// Three-phase structure
// ---------------------------------------------------------------------------

TEST_CASE("three-phase validation enforces phase containment") {
  ThreePhaseNetwork net;
  net.bus_count = 3;
  net.bus_phases = {0b111, 0b011, 0b001};
  net.v0 = Vec3::Ones();
  Branch3 b1{1, 0, 1, 0b011, Mat3c::Zero()};
  b1.z(0, 0) = Complex(0.01, 0.02);
  b1.z(1, 1) = Complex(0.01, 0.02);
  Branch3 b2{2, 1, 2, 0b001, Mat3c::Zero()};
  b2.z(0, 0) = Complex(0.01, 0.02);
  net.branches = {b1, b2};
  CHECK(validate_radial3(net).ok);

  SUBCASE("branch phases exceeding the parent mask fail") {
    net.branches[1].phases = 0b101;  // phase c not at bus 1
    net.branches[1].z(2, 2) = Complex(0.01, 0.02);
    net.bus_phases[2] = 0b101;
    CHECK_FALSE(validate_radial3(net).ok);
  }
  SUBCASE("bus mask must match its feeding branch") {
    net.bus_phases[2] = 0b011;
    CHECK_FALSE(validate_radial3(net).ok);
  }
}

TEST_CASE("stacked layout indexes present phases only") {
  ThreePhaseNetwork net = testing::random_tree3(6, 42);
  NetworkIndex3 index(net);
  int expected = 0;
  for (int bus = 1; bus < net.bus_count; ++bus) expected += phase_count(net.bus_phases[bus]);
  CHECK(index.stacked_size() == expected);
  for (int bus = 1; bus < net.bus_count; ++bus)
    for (int phi = 0; phi < 3; ++phi)
      CHECK((index.stacked_offset(bus, phi) >= 0) == has_phase(net.bus_phases[bus], phi));
}

TEST_CASE("phase-expanded incidence matches traversal kernels") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ThreePhaseNetwork net = testing::random_tree3(4 + seed % 6, seed);
    NetworkIndex3 index(net);
    Mat a = index.incidence();
    REQUIRE(a.rows() == a.cols());
    Eigen::PartialPivLU<Mat> lut(a.transpose());
    InjectionScenario3 sc = testing::random_injections3(index, seed + 99);
    const Vec dense = -lut.solve(sc.p);
    const auto acc = index.accumulate_downstream(sc.p);
    // Flatten the per-branch blocks into incidence row order for comparison.
    Vec flat(a.rows());
    int row = 0;
    for (int s = 0; s < index.branch_count(); ++s)
      for (int phi = 0; phi < 3; ++phi)
        if (has_phase(index.branches()[s].phases, phi)) flat[row++] = acc[s][phi];
    CHECK((flat - dense).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}
