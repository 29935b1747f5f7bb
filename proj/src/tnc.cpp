#include "oldf/tnc.hpp"

#include <cmath>
#include <limits>

#include "oldf/log.hpp"

namespace oldf {

namespace {

bool has_nan(const Vec& v) { return !v.allFinite(); }

}  // namespace

TncResult tnc_minimize(const Objective& objective, const Gradient& gradient, const Vec& x0,
                       const TncOptions& opts) {
  const Eigen::Index dim = x0.size();
  const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());

  TncResult result;
  result.x = x0;
  result.f = objective(x0);
  result.function_evals = 1;

  Vec grad = gradient(result.x);
  ++result.gradient_evals;
  if (has_nan(grad)) throw NumericalError("tnc: gradient is not finite at the initial point");

  if (opts.check_gradient) {
    // Central-difference audit of a few coordinates; debugging aid only.
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(dim, 8); ++i) {
      Vec xp = result.x, xm = result.x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (objective(xp) - objective(xm)) / (2 * h);
      result.function_evals += 2;
      if (std::abs(fd - grad[i]) > 1e-4 * std::max(1.0, std::abs(fd)))
        log_warn("tnc: gradient component " + std::to_string(i) + " disagrees with differences");
    }
  }

  auto hess_vec = [&](const Vec& x, const Vec& g_at_x, const Vec& p) -> Vec {
    const double pnorm = p.norm();
    if (pnorm == 0.0) return Vec::Zero(dim);
    const double delta = sqrt_eps * (1.0 + x.norm()) / pnorm;
    Vec g_shift = gradient(x + delta * p);
    ++result.gradient_evals;
    return (g_shift - g_at_x) / delta;
  };

  const int cg_cap = opts.max_cg_iter > 0 ? opts.max_cg_iter : static_cast<int>(dim);

  for (int k = 0; k < opts.max_iter; ++k) {
    result.grad_norm = grad.lpNorm<Eigen::Infinity>();
    if (result.grad_norm <= opts.grad_tol) {
      result.exit = TncExit::kConverged;
      return result;
    }

    // Inner CG on the Newton system H d = -g, truncated by the standard
    // forcing sequence and by negative curvature.
    Vec direction = Vec::Zero(dim);
    {
      Vec residual = grad;  // residual of H d + g at d = 0
      Vec p = -grad;
      double rr = residual.squaredNorm();
      const double g2 = grad.norm();
      const double forcing = std::min(0.5, std::sqrt(g2)) * g2;
      for (int j = 0; j < cg_cap; ++j) {
        const Vec hp = hess_vec(result.x, grad, p);
        const double curvature = p.dot(hp);
        if (curvature <= 0) {
          if (j == 0) direction = -grad;
          break;
        }
        const double alpha = rr / curvature;
        direction += alpha * p;
        residual += alpha * hp;
        const double rr_new = residual.squaredNorm();
        if (std::sqrt(rr_new) <= forcing) break;
        p = -residual + (rr_new / rr) * p;
        rr = rr_new;
      }
      if (direction.isZero(0.0)) direction = -grad;
    }

    const double slope = grad.dot(direction);
    Vec search = direction;
    double used_slope = slope;
    if (slope >= 0) {
      // CG returned an ascent direction (can happen with inexact Hessian
      // products); fall back to steepest descent.
      search = -grad;
      used_slope = grad.dot(search);
    }

    // Halving line search: accept when both the Armijo decrease and the
    // curvature condition hold.
    double beta = 1.0;
    bool accepted = false;
    Vec x_next;
    double f_next = 0.0;
    Vec grad_next;
    for (int h = 0; h <= opts.max_halvings; ++h) {
      x_next = result.x + beta * search;
      f_next = objective(x_next);
      ++result.function_evals;
      if (std::isfinite(f_next) &&
          f_next <= result.f + opts.armijo_c * beta * used_slope) {
        grad_next = gradient(x_next);
        ++result.gradient_evals;
        if (has_nan(grad_next)) throw NumericalError("tnc: gradient is not finite");
        if (std::abs(grad_next.dot(search)) <= opts.curvature_c * std::abs(used_slope)) {
          accepted = true;
          break;
        }
      }
      beta *= 0.5;
    }
    if (!accepted) {
      result.exit = TncExit::kLineSearchFailed;
      result.iterations = k;
      return result;
    }
    result.x = x_next;
    result.f = f_next;
    grad = grad_next;
    result.iterations = k + 1;
  }
  result.grad_norm = grad.lpNorm<Eigen::Infinity>();
  result.exit = result.grad_norm <= opts.grad_tol ? TncExit::kConverged : TncExit::kMaxIterations;
  return result;
}

}  // namespace oldf
