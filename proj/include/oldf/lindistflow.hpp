#pragma once

#include <vector>

#include "oldf/network.hpp"
#include "oldf/scenario.hpp"
#include "oldf/types.hpp"

namespace oldf {

// Coefficient and bias parameters of the single-phase linear voltage model
//   v = v0*1 + 2 A^{-1} D_r A^{-T} (p + rho) + 2 A^{-1} D_x A^{-T} (q + varrho) + gamma.
// dr/dx follow NetworkIndex branch slots; bias vectors are bus-1 indexed.
// dr/dx are unconstrained reals: training may move them away from the
// physical impedances.
struct LdfParams {
  Vec dr;
  Vec dx;
  Vec gamma;
  Vec rho;
  Vec varrho;

  Eigen::Index size() const {
    return dr.size() + dx.size() + gamma.size() + rho.size() + varrho.size();
  }
  Vec pack() const;
  static LdfParams unpack(const Vec& x, Eigen::Index branch_count, Eigen::Index bus_count);
};

// Traditional LinDistFlow: dr = r, dx = x, zero biases.
LdfParams nominal_params(const NetworkIndex& index);

// Voltage vector of the parameterized model (bus-1 indexed, p.u.^2).
Vec oldf_voltages(const NetworkIndex& index, const LdfParams& params,
                  const InjectionScenario& scenario, double v0);

// Traditional LinDistFlow voltages (nominal parameters).
Vec ldf_voltages(const NetworkIndex& index, const InjectionScenario& scenario, double v0);

// Lossless linear branch flows implied by the injections, sending-end
// oriented parent -> child (positive when serving downstream load). Branch
// slots follow NetworkIndex order.
void ldf_flows(const NetworkIndex& index, const InjectionScenario& scenario, Vec* flow_p,
               Vec* flow_q);

// ---------------------------------------------------------------------------
// Three-phase (LinDist3Flow)
// ---------------------------------------------------------------------------

// Per-branch voltage-drop blocks plus stacked bias vectors. HP/HQ rows and
// columns outside a branch's phase set are zero. The voltage recursion is
//   V_child = V_parent + HP * F_p + HQ * F_q
// with F the accumulated downstream flows of (P + rho3, Q + varrho3); the
// nominal blocks carry -2r / -2x diagonals so this is a drop under load.
struct Ldf3Params {
  std::vector<Mat3> hp;
  std::vector<Mat3> hq;
  Vec gamma3;
  Vec rho3;
  Vec varrho3;

  Vec pack(const NetworkIndex3& index) const;
  static Ldf3Params unpack(const Vec& x, const NetworkIndex3& index);
  static Eigen::Index packed_size(const NetworkIndex3& index);
};

// Blocks built entrywise from the phase impedance matrices: diagonals
// -2 r^{pp} / -2 x^{pp}, off-diagonals mixing r and sqrt(3) x according to
// the 120-degree phasor-ratio pattern. Biases zero.
Ldf3Params nominal_h_blocks(const NetworkIndex3& index);

// Stacked per-(bus, phase) squared voltages of the linear model, p.u.^2.
Vec ldf3_voltages(const NetworkIndex3& index, const Ldf3Params& params,
                  const InjectionScenario3& scenario);

}  // namespace oldf
