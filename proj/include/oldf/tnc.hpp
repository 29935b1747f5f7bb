#pragma once

#include <functional>
#include <string>

#include "oldf/types.hpp"

namespace oldf {

struct TncOptions {
  double grad_tol = 1e-6;  // infinity norm of the full gradient
  int max_iter = 100;      // outer Newton iterations
  int max_cg_iter = 0;     // inner CG cap; 0 means problem dimension
  int max_halvings = 60;   // line search budget
  double armijo_c = 1e-4;
  double curvature_c = 0.9;
  bool check_gradient = false;  // finite-difference audit of grad at x0
};

enum class TncExit { kConverged, kMaxIterations, kLineSearchFailed };

inline const char* to_string(TncExit reason) {
  switch (reason) {
    case TncExit::kConverged: return "converged";
    case TncExit::kMaxIterations: return "max-iterations";
    case TncExit::kLineSearchFailed: return "line-search-failed";
  }
  return "unknown";
}

struct TncResult {
  Vec x;
  double f = 0.0;
  double grad_norm = 0.0;  // infinity norm at exit
  int iterations = 0;
  int function_evals = 0;
  int gradient_evals = 0;
  TncExit exit = TncExit::kMaxIterations;
};

using Objective = std::function<double(const Vec&)>;
using Gradient = std::function<Vec(const Vec&)>;

// Truncated Newton with an inner conjugate-gradient solve of the Newton
// system. Hessian-vector products use forward differences of the analytic
// gradient; the step is accepted by a halving line search requiring both the
// Armijo and curvature conditions. Descent is monotone: a step is only taken
// when it decreases the objective. Throws NumericalError on NaN gradients.
TncResult tnc_minimize(const Objective& objective, const Gradient& gradient, const Vec& x0,
                       const TncOptions& opts = {});

}  // namespace oldf
