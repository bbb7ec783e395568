#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "mossp/problem.hpp"

namespace mossp {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Binary classification samples. Rows of X are the feature vectors Xᵢ.
struct Dataset {
  SparseRows X;
  Vector y;                ///< labels in {−1, +1}
  std::string label_note;  ///< non-empty when labels were remapped on load

  std::size_t N() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t n() const { return static_cast<std::size_t>(X.cols()); }
  /// Throws InvalidArgument unless labels are ±1 and the shapes agree.
  void validate() const;
  double max_row_norm() const;
};

/// Scales every nonzero row to unit ℓ2 norm.
Dataset normalize_rows(Dataset data);

/// Dense Gaussian features with labels drawn from a logistic model around a
/// random unit direction. Deterministic in `seed`.
Dataset synthetic_dataset(std::size_t N, std::size_t n, std::uint64_t seed);

/// c(x) = ‖x‖² − 1.
ConstraintMap sphere_constraint();

/// ∇c(x)·c(x) = 2x(‖x‖² − 1) for the unit-sphere constraint.
Vector sphere_gradc_c(const Vector& x);

/// M diagonal quadratic equalities cⱼ(x) = ½Σ_ℓ q_{jℓ}x_ℓ² + aⱼᵀx − bⱼ.
struct QuadEqInstance {
  std::size_t n = 0;
  std::size_t M = 0;
  Eigen::MatrixXd q;  ///< M×n, entries in [0.5/n, 1/n]
  Eigen::MatrixXd a;  ///< M×n
  Vector b;           ///< length M
  Vector x_star;      ///< feasible unit vector (empty when unknown)
  std::uint64_t seed = 0;
  bool seeded = false;

  Vector eval(const Vector& x) const;
};

inline constexpr std::size_t kDefaultQuadEqM = 20;

QuadEqInstance gen_quadeq(std::size_t n, std::size_t M, Rng& rng);
/// Seeded convenience overload; records the seed for provenance.
QuadEqInstance gen_quadeq(std::size_t n, std::size_t M, std::uint64_t seed);

ConstraintMap quadeq_constraints(const QuadEqInstance& inst);

enum class ProblemKind { logistic_sphere, logistic_quadeq };

/// Bounds over the ball ‖x‖ ≤ 2 for the constraint terms and per-sample
/// bounds for the logistic loss; assembles L̃ = ρ₀⁻¹L_f + G² + C·L_c.
PenaltyConstants estimate_constants(ProblemKind kind, const Dataset& data, double lambda,
                                    double rho0, const QuadEqInstance* inst = nullptr);

/// Sphere-constrained logistic regression with the λ(‖x‖₁ − ‖x‖₂) regularizer.
/// The initializer draws a random unit vector.
ProblemInstance logistic_problem(const Dataset& data, double lambda, std::size_t batch,
                                 double rho0 = 1.0);

/// Logistic loss with the same regularizer under the quadratic equalities of
/// `inst`. Starts from x_star when `start_at_x_star` and x_star is known,
/// otherwise from a random unit vector.
ProblemInstance quadeq_problem(const Dataset& data, const QuadEqInstance& inst, double lambda,
                               std::size_t batch, double rho0 = 1.0, bool start_at_x_star = true);

/// Random unit vector (standard normal draw, normalized).
Vector random_unit_vector(std::size_t n, Rng& rng);

}  // namespace mossp
