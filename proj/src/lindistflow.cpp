#include "oldf/lindistflow.hpp"

#include <cmath>

namespace oldf {

Vec LdfParams::pack() const {
  Vec x(size());
  Eigen::Index at = 0;
  x.segment(at, dr.size()) = dr; at += dr.size();
  x.segment(at, dx.size()) = dx; at += dx.size();
  x.segment(at, gamma.size()) = gamma; at += gamma.size();
  x.segment(at, rho.size()) = rho; at += rho.size();
  x.segment(at, varrho.size()) = varrho;
  return x;
}

LdfParams LdfParams::unpack(const Vec& x, Eigen::Index branch_count, Eigen::Index bus_count) {
  if (x.size() != 2 * branch_count + 3 * bus_count)
    throw InputError("parameter vector length does not match network");
  LdfParams p;
  Eigen::Index at = 0;
  p.dr = x.segment(at, branch_count); at += branch_count;
  p.dx = x.segment(at, branch_count); at += branch_count;
  p.gamma = x.segment(at, bus_count); at += bus_count;
  p.rho = x.segment(at, bus_count); at += bus_count;
  p.varrho = x.segment(at, bus_count);
  return p;
}

LdfParams nominal_params(const NetworkIndex& index) {
  const int m = index.branch_count();
  const int n = index.bus_count() - 1;
  LdfParams p;
  p.dr = Vec(m);
  p.dx = Vec(m);
  for (int s = 0; s < m; ++s) {
    p.dr[s] = index.closed_branches()[s].r;
    p.dx[s] = index.closed_branches()[s].x;
  }
  p.gamma = Vec::Zero(n);
  p.rho = Vec::Zero(n);
  p.varrho = Vec::Zero(n);
  return p;
}

Vec oldf_voltages(const NetworkIndex& index, const LdfParams& params,
                  const InjectionScenario& scenario, double v0) {
  const int n = index.bus_count() - 1;
  if (params.dr.size() != index.branch_count() || params.gamma.size() != n)
    throw InputError("parameters are bound to a different network");
  if (scenario.p.size() != n || scenario.q.size() != n)
    throw InputError("scenario length does not match network");
  const Vec acc_p = index.accumulate_downstream(scenario.p + params.rho);
  const Vec acc_q = index.accumulate_downstream(scenario.q + params.varrho);
  const Vec drop = index.sum_along_paths(params.dr.cwiseProduct(acc_p) +
                                         params.dx.cwiseProduct(acc_q));
  return Vec::Constant(n, v0) + 2.0 * drop + params.gamma;
}

Vec ldf_voltages(const NetworkIndex& index, const InjectionScenario& scenario, double v0) {
  return oldf_voltages(index, nominal_params(index), scenario, v0);
}

void ldf_flows(const NetworkIndex& index, const InjectionScenario& scenario, Vec* flow_p,
               Vec* flow_q) {
  // Lossless balance: the sending-end flow on a branch carries the whole
  // downstream consumption, so flipping the sign of the injection
  // accumulation matches the DistFlow orientation.
  if (flow_p) *flow_p = -index.accumulate_downstream(scenario.p);
  if (flow_q) *flow_q = -index.accumulate_downstream(scenario.q);
}

// ---------------------------------------------------------------------------
// Three-phase
// ---------------------------------------------------------------------------

Eigen::Index Ldf3Params::packed_size(const NetworkIndex3& index) {
  Eigen::Index block_entries = 0;
  for (const auto& b : index.branches()) {
    const Eigen::Index k = phase_count(b.phases);
    block_entries += k * k;
  }
  return 2 * block_entries + 3 * index.stacked_size();
}

Vec Ldf3Params::pack(const NetworkIndex3& index) const {
  Vec x(packed_size(index));
  Eigen::Index at = 0;
  auto put_blocks = [&](const std::vector<Mat3>& blocks) {
    for (int s = 0; s < index.branch_count(); ++s) {
      const PhaseMask mask = index.branches()[s].phases;
      for (int phi = 0; phi < 3; ++phi) {
        if (!has_phase(mask, phi)) continue;
        for (int psi = 0; psi < 3; ++psi) {
          if (!has_phase(mask, psi)) continue;
          x[at++] = blocks[s](phi, psi);
        }
      }
    }
  };
  put_blocks(hp);
  put_blocks(hq);
  x.segment(at, gamma3.size()) = gamma3; at += gamma3.size();
  x.segment(at, rho3.size()) = rho3; at += rho3.size();
  x.segment(at, varrho3.size()) = varrho3;
  return x;
}

Ldf3Params Ldf3Params::unpack(const Vec& x, const NetworkIndex3& index) {
  if (x.size() != packed_size(index))
    throw InputError("three-phase parameter vector length does not match network");
  Ldf3Params p;
  p.hp.assign(index.branch_count(), Mat3::Zero());
  p.hq.assign(index.branch_count(), Mat3::Zero());
  Eigen::Index at = 0;
  auto get_blocks = [&](std::vector<Mat3>& blocks) {
    for (int s = 0; s < index.branch_count(); ++s) {
      const PhaseMask mask = index.branches()[s].phases;
      for (int phi = 0; phi < 3; ++phi) {
        if (!has_phase(mask, phi)) continue;
        for (int psi = 0; psi < 3; ++psi) {
          if (!has_phase(mask, psi)) continue;
          blocks[s](phi, psi) = x[at++];
        }
      }
    }
  };
  get_blocks(p.hp);
  get_blocks(p.hq);
  const Eigen::Index n = index.stacked_size();
  p.gamma3 = x.segment(at, n); at += n;
  p.rho3 = x.segment(at, n); at += n;
  p.varrho3 = x.segment(at, n);
  return p;
}

Ldf3Params nominal_h_blocks(const NetworkIndex3& index) {
  const double s3 = std::sqrt(3.0);
  Ldf3Params p;
  p.hp.assign(index.branch_count(), Mat3::Zero());
  p.hq.assign(index.branch_count(), Mat3::Zero());
  for (int s = 0; s < index.branch_count(); ++s) {
    const Branch3& b = index.branches()[s];
    for (int phi = 0; phi < 3; ++phi) {
      if (!has_phase(b.phases, phi)) continue;
      for (int psi = 0; psi < 3; ++psi) {
        if (!has_phase(b.phases, psi)) continue;
        const double r = b.z(phi, psi).real();
        const double x = b.z(phi, psi).imag();
        if (phi == psi) {
          p.hp[s](phi, psi) = -2.0 * r;
          p.hq[s](phi, psi) = -2.0 * x;
        } else if ((psi - phi + 3) % 3 == 1) {
          // 120-degree lead between the coupled phases.
          p.hp[s](phi, psi) = r - s3 * x;
          p.hq[s](phi, psi) = x + s3 * r;
        } else {
          p.hp[s](phi, psi) = r + s3 * x;
          p.hq[s](phi, psi) = x - s3 * r;
        }
      }
    }
  }
  p.gamma3 = Vec::Zero(index.stacked_size());
  p.rho3 = Vec::Zero(index.stacked_size());
  p.varrho3 = Vec::Zero(index.stacked_size());
  return p;
}

Vec ldf3_voltages(const NetworkIndex3& index, const Ldf3Params& params,
                  const InjectionScenario3& scenario) {
  const Eigen::Index n = index.stacked_size();
  if (params.gamma3.size() != n || static_cast<int>(params.hp.size()) != index.branch_count())
    throw InputError("three-phase parameters are bound to a different network");
  if (scenario.p.size() != n || scenario.q.size() != n)
    throw InputError("three-phase scenario length does not match network");

  // Load-positive accumulated flows, per branch and phase.
  const std::vector<Vec3> acc_p = index.accumulate_downstream(scenario.p + params.rho3);
  const std::vector<Vec3> acc_q = index.accumulate_downstream(scenario.q + params.varrho3);
  std::vector<Vec3> drop(index.branch_count());
  for (int s = 0; s < index.branch_count(); ++s)
    drop[s] = params.hp[s] * (-acc_p[s]) + params.hq[s] * (-acc_q[s]);
  Vec v = index.sum_along_paths(drop);

  const ThreePhaseNetwork& net = index.network();
  for (int bus = 1; bus < index.bus_count(); ++bus) {
    for (int phi = 0; phi < 3; ++phi) {
      const int off = index.stacked_offset(bus, phi);
      if (off >= 0) v[off] += net.v0[phi];
    }
  }
  return v + params.gamma3;
}

}  // namespace oldf
