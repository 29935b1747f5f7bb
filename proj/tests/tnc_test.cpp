#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Cholesky>
#include <random>

#include "oldf/tnc.hpp"

using namespace oldf;

TEST_CASE("convex quadratic converges to the closed-form solution") {
  const int n = 10;
  std::mt19937_64 rng(17);
  std::normal_distribution<double> draw(0.0, 1.0);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = draw(rng);
  const Mat q = m.transpose() * m + Mat::Identity(n, n);  // SPD
  Vec b(n);
  for (int i = 0; i < n; ++i) b[i] = draw(rng);

  auto objective = [&](const Vec& x) { return 0.5 * x.dot(q * x) - b.dot(x); };
  auto gradient = [&](const Vec& x) -> Vec { return q * x - b; };

  TncOptions opts;
  opts.grad_tol = 1e-8;
  TncResult result = tnc_minimize(objective, gradient, Vec::Zero(n), opts);
  CHECK(result.exit == TncExit::kConverged);
  CHECK(result.iterations <= 15);
  const Vec expected = q.ldlt().solve(b);
  CHECK((result.x - expected).lpNorm<Eigen::Infinity>() < 1e-6);
  CHECK(result.grad_norm <= 1e-8);
}

TEST_CASE("rosenbrock from the classic start") {
  auto objective = [](const Vec& x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  auto gradient = [](const Vec& x) -> Vec {
    Vec g(2);
    const double b = x[1] - x[0] * x[0];
    g[0] = -2.0 * (1.0 - x[0]) - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
    return g;
  };
  Vec x0(2);
  x0 << -1.2, 1.0;
  TncOptions opts;
  opts.grad_tol = 1e-10;
  opts.max_iter = 200;
  TncResult result = tnc_minimize(objective, gradient, x0, opts);
  CHECK(result.f < 1e-8);
  CHECK(std::abs(result.x[0] - 1.0) < 1e-3);
  CHECK(std::abs(result.x[1] - 1.0) < 1e-3);
}

TEST_CASE("stationary start returns immediately") {
  auto objective = [](const Vec& x) { return x.squaredNorm(); };
  auto gradient = [](const Vec& x) -> Vec { return 2.0 * x; };
  TncResult result = tnc_minimize(objective, gradient, Vec::Zero(4));
  CHECK(result.exit == TncExit::kConverged);
  CHECK(result.iterations == 0);
  CHECK(result.f == 0.0);
}

TEST_CASE("descent is monotone across iterations") {
  // A stiff quartic bowl; every accepted step must decrease f.
  auto objective = [](const Vec& x) {
    return std::pow(x[0] - 2, 4) + 50.0 * std::pow(x[1] + 1, 2) + 0.5 * x[0] * x[1];
  };
  auto gradient = [](const Vec& x) -> Vec {
    Vec g(2);
    g[0] = 4 * std::pow(x[0] - 2, 3) + 0.5 * x[1];
    g[1] = 100.0 * (x[1] + 1) + 0.5 * x[0];
    return g;
  };
  Vec x0(2);
  x0 << 10.0, 10.0;
  const double f0 = objective(x0);
  TncResult result = tnc_minimize(objective, gradient, x0);
  CHECK(result.f <= f0);
  CHECK(result.grad_norm < 1e-4);
}

TEST_CASE("nan gradient is a hard error") {
  auto objective = [](const Vec& x) { return x.squaredNorm(); };
  auto gradient = [](const Vec& x) -> Vec {
    Vec g = 2.0 * x;
    g[0] = std::numeric_limits<double>::quiet_NaN();
    return g;
  };
  CHECK_THROWS_AS(tnc_minimize(objective, gradient, Vec::Ones(2)), NumericalError);
}

TEST_CASE("iterate sequence is deterministic") {
  auto objective = [](const Vec& x) { return std::pow(x[0] - 3, 2) * (1 + x[1] * x[1]) + x[1] * x[1]; };
  auto gradient = [](const Vec& x) -> Vec {
    Vec g(2);
    g[0] = 2 * (x[0] - 3) * (1 + x[1] * x[1]);
    g[1] = 2 * x[1] * std::pow(x[0] - 3, 2) + 2 * x[1];
    return g;
  };
  Vec x0(2);
  x0 << -4.0, 2.0;
  TncResult a = tnc_minimize(objective, gradient, x0);
  TncResult b = tnc_minimize(objective, gradient, x0);
  CHECK(a.x == b.x);
  CHECK(a.f == b.f);
  CHECK(a.iterations == b.iterations);
}
