#pragma once

#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "mossp/harness.hpp"

namespace mossp::testing {

/// argmin over a uniform grid on [lo, hi].
inline double grid_argmin_1d(const std::function<double(double)>& fn, double lo, double hi,
                             double step) {
  double best_x = lo, best = fn(lo);
  const auto n = static_cast<long>(std::floor((hi - lo) / step));
  for (long i = 1; i <= n; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    const double v = fn(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  return best_x;
}

/// Central differences with h = 1e-6·(1 + ‖x‖) unless given.
inline Vector fd_gradient(const std::function<double(const Vector&)>& fn, const Vector& x,
                          double h = -1.0) {
  if (h <= 0.0) h = 1e-6 * (1.0 + x.norm());
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (fn(xp) - fn(xm)) / (2.0 * h);
  }
  return g;
}

inline double rel_err(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

/// f(x) = ½xᵀAx − bᵀx with exact gradients, h = g = 0, no constraints.
inline ProblemInstance quadratic_problem(const Eigen::MatrixXd& A, const Vector& b) {
  ProblemInstance p;
  p.name = "quadratic";
  p.n = static_cast<std::size_t>(b.size());
  GradientOracle o;
  o.draw = [](Rng&, std::size_t count) {
    Sample s;
    s.count = count;
    return s;
  };
  o.full_grad = [A, b](const Vector& x) -> Vector { return A * x - b; };
  o.grad_at = [A, b](const Vector& x, const Sample&) -> Vector { return A * x - b; };
  o.full_value = [A, b](const Vector& x) { return 0.5 * x.dot(A * x) - b.dot(x); };
  o.batch_size = 1;
  o.sigma_bound = 0.0;
  p.oracle = o;
  p.prox_h = zero_oracle();
  p.prox_g = zero_oracle();
  p.constraints = no_constraints();
  const double L = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues().cwiseAbs().maxCoeff();
  p.constants = PenaltyConstants::make(0.0, 0.0, L, 0.0, 1.0);
  p.initializer = [n = p.n](Rng&) { return Vector::Zero(static_cast<Eigen::Index>(n)); };
  return p;
}

/// Random symmetric positive definite matrix with eigenvalues in [lo, hi].
inline Eigen::MatrixXd random_spd(int n, double lo, double hi, Rng& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = nd(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  const Eigen::MatrixXd Q = qr.householderQ();
  std::uniform_real_distribution<double> ud(lo, hi);
  Vector ev(n);
  for (int i = 0; i < n; ++i) ev[i] = ud(rng);
  ev[0] = lo;
  ev[n - 1] = hi;
  return Q * ev.asDiagonal() * Q.transpose();
}

inline Vector random_vector(Eigen::Index n, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

/// The 10-dimensional sphere-constrained logistic problem used by the
/// descent and rate checks.
inline ProblemInstance small_sphere_problem(bool exact, double lambda = 0.05,
                                            std::size_t batch = 8) {
  const Dataset d = normalize_rows(synthetic_dataset(200, 10, 3));
  ProblemInstance p = logistic_problem(d, lambda, batch, 1.0);
  if (exact) p.oracle = deterministic(p.oracle);
  return p;
}

// Grid argmin of τ‖x‖₂ + ½‖x − z‖² over R²: coarse pass over a box, then a
// 1e-4 grid on a window around the coarse minimizer (the objective is strongly
// convex, so the window contains the true minimizer).
inline Vector grid_prox_l2_2d(const Vector& z, double tau) {
  auto obj = [&](double a, double b) {
    return tau * std::hypot(a, b) + 0.5 * ((a - z[0]) * (a - z[0]) + (b - z[1]) * (b - z[1]));
  };
  double best = INFINITY, ba = 0, bb = 0;
  const double R = z.norm() + 1.0;
  for (double a = -R; a <= R; a += 1e-2)
    for (double b = -R; b <= R; b += 1e-2)
      if (const double v = obj(a, b); v < best) best = v, ba = a, bb = b;
  const double ca = ba, cb = bb;
  best = INFINITY;
  for (int i = -200; i <= 200; ++i)
    for (int j = -200; j <= 200; ++j) {
      const double a = ca + 1e-4 * i, b = cb + 1e-4 * j;
      if (const double v = obj(a, b); v < best) best = v, ba = a, bb = b;
    }
  Vector x(2);
  x << ba, bb;
  return x;
}

inline std::string source_dir() { return MOSSP_SOURCE_DIR; }

}  // namespace mossp::testing
