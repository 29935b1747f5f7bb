#pragma once

// Shared fixtures: hand-built feeders and random radial tree generators used
// across the test suites.

#include <random>

#include "oldf/network.hpp"
#include "oldf/scenario.hpp"

namespace oldf::testing {

inline RadialNetwork two_bus(double r = 0.01, double x = 0.02, double v0 = 1.0) {
  RadialNetwork net;
  net.bus_count = 2;
  net.branches.push_back({1, 0, 1, r, x});
  net.v0 = v0;
  return net;
}

inline RadialNetwork chain3() {
  RadialNetwork net;
  net.bus_count = 3;
  net.branches.push_back({1, 0, 1, 0.01, 0.02});
  net.branches.push_back({2, 1, 2, 0.03, 0.01});
  net.v0 = 1.0;
  return net;
}

inline RadialNetwork star3() {
  RadialNetwork net;
  net.bus_count = 3;
  net.branches.push_back({1, 0, 1, 0.01, 0.02});
  net.branches.push_back({2, 0, 2, 0.03, 0.01});
  net.v0 = 1.0;
  return net;
}

// Random rooted tree: bus i attaches to a uniformly chosen earlier bus.
inline RadialNetwork random_tree(int bus_count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> impedance(0.005, 0.06);
  RadialNetwork net;
  net.bus_count = bus_count;
  net.v0 = 1.0;
  for (int bus = 1; bus < bus_count; ++bus) {
    std::uniform_int_distribution<int> pick(0, bus - 1);
    net.branches.push_back({bus, pick(rng), bus, impedance(rng), impedance(rng)});
  }
  return net;
}

// All-load scenario with per-bus consumption in [lo, hi] p.u.
inline InjectionScenario random_loads(int bus_count, std::uint64_t seed, double lo = 0.0,
                                      double hi = 0.02) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> load(lo, hi);
  InjectionScenario sc;
  sc.p = Vec(bus_count - 1);
  sc.q = Vec(bus_count - 1);
  for (int i = 0; i < bus_count - 1; ++i) {
    sc.p[i] = -load(rng);
    sc.q[i] = -0.5 * load(rng);
  }
  return sc;
}

// Mixed-sign injections for gradient and linearity checks.
inline InjectionScenario random_injections(int bus_count, std::uint64_t seed, double scale = 0.02) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> draw(-scale, scale);
  InjectionScenario sc;
  sc.p = Vec(bus_count - 1);
  sc.q = Vec(bus_count - 1);
  for (int i = 0; i < bus_count - 1; ++i) {
    sc.p[i] = draw(rng);
    sc.q[i] = draw(rng);
  }
  return sc;
}

// Random three-phase tree with phase-narrowing laterals: each bus carries a
// random nonempty subset of its parent's phases (the root is abc).
inline ThreePhaseNetwork random_tree3(int bus_count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> self_r(0.01, 0.05);
  std::uniform_real_distribution<double> mutual(0.002, 0.012);
  ThreePhaseNetwork net;
  net.bus_count = bus_count;
  net.bus_phases.assign(bus_count, 0);
  net.bus_phases[0] = 0b111;
  net.v0 = Vec3::Ones();
  for (int bus = 1; bus < bus_count; ++bus) {
    std::uniform_int_distribution<int> pick(0, bus - 1);
    const int parent = pick(rng);
    const PhaseMask parent_mask = net.bus_phases[parent];
    PhaseMask mask = 0;
    std::uniform_int_distribution<int> coin(0, 3);
    while (mask == 0) {
      mask = 0;
      for (int phi = 0; phi < 3; ++phi)
        if (has_phase(parent_mask, phi) && coin(rng) > 0) mask |= 1 << phi;
    }
    Branch3 b;
    b.id = bus;
    b.from = parent;
    b.to = bus;
    b.phases = mask;
    b.z = Mat3c::Zero();
    for (int phi = 0; phi < 3; ++phi) {
      if (!has_phase(mask, phi)) continue;
      b.z(phi, phi) = Complex(self_r(rng), 2.0 * self_r(rng));
      for (int psi = 0; psi < 3; ++psi) {
        if (psi == phi || !has_phase(mask, psi)) continue;
        b.z(phi, psi) = Complex(mutual(rng), 2.0 * mutual(rng));
      }
    }
    net.bus_phases[bus] = mask;
    net.branches.push_back(b);
  }
  return net;
}

inline InjectionScenario3 random_injections3(const NetworkIndex3& index, std::uint64_t seed,
                                             double scale = 0.01) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> draw(-scale, scale);
  InjectionScenario3 sc;
  sc.p = Vec(index.stacked_size());
  sc.q = Vec(index.stacked_size());
  for (Eigen::Index i = 0; i < index.stacked_size(); ++i) {
    sc.p[i] = draw(rng);
    sc.q[i] = draw(rng);
  }
  return sc;
}

}  // namespace oldf::testing
