#include "oldf/qp.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace oldf {

namespace {

Vec clamp(const Vec& v, const Vec& lower, const Vec& upper) {
  return v.cwiseMax(lower).cwiseMin(upper);
}

// Equality-constrained re-solve on the active rows, for a machine-precision
// answer once ADMM has identified the active set.
bool polish_solution(const QpProblem& qp, QpResult& result) {
  const Eigen::Index n = qp.c.size();
  const Eigen::Index m = qp.g.rows();
  const double gap = 1e-6;

  std::vector<Eigen::Index> active;
  std::vector<double> target;
  for (Eigen::Index i = 0; i < m; ++i) {
    const bool at_lower = std::isfinite(qp.lower[i]) && result.z[i] - qp.lower[i] < gap &&
                          result.y[i] < 0;
    const bool at_upper = std::isfinite(qp.upper[i]) && qp.upper[i] - result.z[i] < gap &&
                          result.y[i] > 0;
    if (at_lower) {
      active.push_back(i);
      target.push_back(qp.lower[i]);
    } else if (at_upper) {
      active.push_back(i);
      target.push_back(qp.upper[i]);
    }
  }
  const Eigen::Index k = static_cast<Eigen::Index>(active.size());
  if (k == 0) {
    // Unconstrained minimum over the quadratic.
    Vec x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (qp.p_diag[i] <= 0) return false;
      x[i] = -qp.c[i] / qp.p_diag[i];
    }
    result.x = x;
    result.z = qp.g * x;
    result.y.setZero();
    return true;
  }

  Mat kkt = Mat::Zero(n + k, n + k);
  for (Eigen::Index i = 0; i < n; ++i) kkt(i, i) = qp.p_diag[i] + 1e-12;
  for (Eigen::Index a = 0; a < k; ++a) {
    kkt.block(n + a, 0, 1, n) = qp.g.row(active[a]);
    kkt.block(0, n + a, n, 1) = qp.g.row(active[a]).transpose();
    kkt(n + a, n + a) = -1e-12;
  }
  Vec rhs(n + k);
  rhs.head(n) = -qp.c;
  for (Eigen::Index a = 0; a < k; ++a) rhs[n + a] = target[a];

  Eigen::LDLT<Mat> ldlt(kkt);
  if (ldlt.info() != Eigen::Success) return false;
  Vec sol = ldlt.solve(rhs);
  // One round of iterative refinement.
  sol += ldlt.solve(rhs - kkt * sol);

  QpResult candidate = result;
  candidate.x = sol.head(n);
  candidate.y.setZero();
  for (Eigen::Index a = 0; a < k; ++a) candidate.y[active[a]] = sol[n + a];
  candidate.z = qp.g * candidate.x;

  // Accept only if the polished point is feasible and stationary.
  const Vec slack_low = candidate.z - qp.lower;
  const Vec slack_high = qp.upper - candidate.z;
  double worst_violation = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::isfinite(qp.lower[i])) worst_violation = std::max(worst_violation, -slack_low[i]);
    if (std::isfinite(qp.upper[i])) worst_violation = std::max(worst_violation, -slack_high[i]);
  }
  const Vec stationarity =
      qp.p_diag.cwiseProduct(candidate.x) + qp.c + qp.g.transpose() * candidate.y;
  const double dual_res = stationarity.lpNorm<Eigen::Infinity>();
  if (worst_violation > 1e-9 || dual_res > result.dual_residual) return false;
  candidate.primal_residual = worst_violation;
  candidate.dual_residual = dual_res;
  result = candidate;
  return true;
}

}  // namespace

QpResult solve_qp(const QpProblem& qp, const QpOptions& opts, const Vec* warm_x,
                  const Vec* warm_y) {
  const Eigen::Index n = qp.c.size();
  const Eigen::Index m = qp.g.rows();
  if (qp.p_diag.size() != n || qp.lower.size() != m || qp.upper.size() != m)
    throw InputError("qp: inconsistent problem dimensions");

  QpResult result;
  result.x = warm_x && warm_x->size() == n ? *warm_x : Vec::Zero(n);
  result.y = warm_y && warm_y->size() == m ? *warm_y : Vec::Zero(m);
  result.z = clamp(qp.g * result.x, qp.lower, qp.upper);

  const Mat gtg = qp.g.transpose() * qp.g;
  double rho = opts.rho;
  Mat kkt = Mat::Zero(n, n);
  Eigen::LLT<Mat> llt;
  auto refactor = [&] {
    kkt = rho * gtg;
    kkt.diagonal() += qp.p_diag;
    kkt.diagonal().array() += opts.sigma;
    llt.compute(kkt);
    if (llt.info() != Eigen::Success) throw NumericalError("qp: KKT factorization failed");
  };
  refactor();

  Vec y_prev = result.y;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    const Vec rhs = opts.sigma * result.x - qp.c + qp.g.transpose() * (rho * result.z - result.y);
    const Vec x_tilde = llt.solve(rhs);
    const Vec z_tilde = qp.g * x_tilde;
    const Vec x_next = opts.relax * x_tilde + (1.0 - opts.relax) * result.x;
    const Vec z_relaxed = opts.relax * z_tilde + (1.0 - opts.relax) * result.z;
    const Vec z_next = clamp(z_relaxed + result.y / rho, qp.lower, qp.upper);
    y_prev = result.y;
    result.y += rho * (z_relaxed - z_next);
    result.x = x_next;
    result.z = z_next;
    result.iterations = iter;

    if (iter % 25 == 0 || iter == opts.max_iter) {
      const Vec gx = qp.g * result.x;
      result.primal_residual = (gx - result.z).lpNorm<Eigen::Infinity>();
      const Vec stationarity =
          qp.p_diag.cwiseProduct(result.x) + qp.c + qp.g.transpose() * result.y;
      result.dual_residual = stationarity.lpNorm<Eigen::Infinity>();
      if (result.primal_residual <= opts.eps_primal && result.dual_residual <= opts.eps_dual) {
        result.status = QpStatus::kOptimal;
        break;
      }

      // Primal infeasibility certificate in the multiplier direction.
      const Vec dy = result.y - y_prev;
      const double dy_norm = dy.lpNorm<Eigen::Infinity>();
      if (dy_norm > 1e-12) {
        const double gt_dy = (qp.g.transpose() * dy).lpNorm<Eigen::Infinity>() / dy_norm;
        double support = 0.0;
        bool valid = gt_dy < 1e-10;
        for (Eigen::Index i = 0; i < m && valid; ++i) {
          const double d = dy[i] / dy_norm;
          if (d > 1e-12) {
            if (!std::isfinite(qp.upper[i])) valid = false;
            else support += qp.upper[i] * d;
          } else if (d < -1e-12) {
            if (!std::isfinite(qp.lower[i])) valid = false;
            else support += qp.lower[i] * d;
          }
        }
        if (valid && support < -1e-10) {
          result.status = QpStatus::kPrimalInfeasible;
          Eigen::Index worst;
          dy.cwiseAbs().maxCoeff(&worst);
          result.most_violated_row = static_cast<int>(worst);
          return result;
        }
      }

      // Penalty adaptation keeps primal and dual progress balanced.
      if (iter % 200 == 0) {
        const double prim_scale =
            std::max({(qp.g * result.x).lpNorm<Eigen::Infinity>(),
                      result.z.lpNorm<Eigen::Infinity>(), 1e-6});
        const double dual_scale = std::max(
            {qp.p_diag.cwiseProduct(result.x).lpNorm<Eigen::Infinity>(),
             (qp.g.transpose() * result.y).lpNorm<Eigen::Infinity>(),
             qp.c.lpNorm<Eigen::Infinity>(), 1e-6});
        const double ratio = (result.primal_residual / prim_scale) /
                             std::max(result.dual_residual / dual_scale, 1e-16);
        const double factor = std::sqrt(ratio);
        if (factor > 5.0 || factor < 0.2) {
          rho = std::clamp(rho * std::clamp(factor, 1e-3, 1e3), 1e-6, 1e6);
          refactor();
        }
      }
    }
  }

  if (result.status != QpStatus::kOptimal) {
    const Vec gx = qp.g * result.x;
    result.primal_residual = (gx - result.z).lpNorm<Eigen::Infinity>();
    result.dual_residual = (qp.p_diag.cwiseProduct(result.x) + qp.c +
                            qp.g.transpose() * result.y)
                               .lpNorm<Eigen::Infinity>();
  }
  if (result.status == QpStatus::kOptimal && opts.polish) polish_solution(qp, result);
  result.objective = 0.5 * result.x.dot(qp.p_diag.cwiseProduct(result.x)) + qp.c.dot(result.x);
  return result;
}

}  // namespace oldf
