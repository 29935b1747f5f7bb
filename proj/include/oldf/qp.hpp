#pragma once

#include <string>
#include <vector>

#include "oldf/types.hpp"

namespace oldf {

// Convex quadratic program
//   minimize    1/2 x' P x + c' x
//   subject to  l <= G x <= u
// with P diagonal positive semidefinite. Rows may use -inf / +inf bounds.
struct QpProblem {
  Vec p_diag;
  Vec c;
  Mat g;
  Vec lower;
  Vec upper;
  std::vector<std::string> row_labels;  // for diagnostics; may be empty
};

enum class QpStatus { kOptimal, kMaxIterations, kPrimalInfeasible };

inline const char* to_string(QpStatus status) {
  switch (status) {
    case QpStatus::kOptimal: return "optimal";
    case QpStatus::kMaxIterations: return "max-iterations";
    case QpStatus::kPrimalInfeasible: return "infeasible";
  }
  return "unknown";
}

struct QpOptions {
  double eps_primal = 1e-8;
  double eps_dual = 1e-8;
  int max_iter = 200000;
  double sigma = 1e-6;
  double rho = 0.1;
  double relax = 1.6;
  bool polish = true;
};

struct QpResult {
  QpStatus status = QpStatus::kMaxIterations;
  Vec x;
  Vec z;  // constraint values at the solution
  Vec y;  // multipliers, one per row
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  int most_violated_row = -1;  // set when infeasible
};

// Operator-splitting (ADMM) solver with over-relaxation, adaptive penalty
// and an active-set polish step. Warm starting: pass the previous result's
// x/y via the optional arguments (used across polygon refinements).
QpResult solve_qp(const QpProblem& problem, const QpOptions& opts = {},
                  const Vec* warm_x = nullptr, const Vec* warm_y = nullptr);

}  // namespace oldf
