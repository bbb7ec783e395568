#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "mossp/common.hpp"

namespace mossp {

struct ProblemInstance;

enum class ConstraintKind { equality, mixed };

/// Row layout of a constraint vector. In the mixed case rows
/// [0, num_equality) are equalities c_E = 0 and the remaining rows are
/// inequalities c_I ≤ 0.
struct ConstraintLayout {
  ConstraintKind kind = ConstraintKind::equality;
  std::size_t num_equality = 0;

  static ConstraintLayout equality() { return {}; }
  static ConstraintLayout mixed(std::size_t num_equality) {
    return {ConstraintKind::mixed, num_equality};
  }
};

/// Smooth constraint map c: Rⁿ → Rᵐ with the transposed-Jacobian product.
/// m = 0 represents an unconstrained problem.
struct ConstraintMap {
  std::size_t m = 0;
  ConstraintLayout layout;
  std::function<Vector(const Vector&)> eval;
  /// jt_apply(x, v) = ∇c(x)·v, with ∇c(x) the n×m transposed Jacobian.
  std::function<Vector(const Vector&, const Vector&)> jt_apply;

  /// c(x) with inequality rows replaced by [c_I]₊.
  Vector active_residual(const Vector& x) const;
  /// ∇c(x)·[c(x)] on the active residual.
  Vector grad_c_c(const Vector& x) const;
};

ConstraintMap no_constraints();

/// Replaces inequality rows of c by max(c, 0).
Vector clamp_inequalities(const Vector& c, const ConstraintLayout& layout);

/// Assumption-level constants of the penalized problem.
struct PenaltyConstants {
  double G = 0.0;
  double C = 0.0;
  double L_f = 0.0;
  double L_c = 0.0;
  double rho0 = 1.0;
  double L_tilde = 0.0;  ///< ρ₀⁻¹L_f + G² + C·L_c
  std::optional<double> delta;

  static PenaltyConstants make(double G, double C, double L_f, double L_c, double rho0,
                               std::optional<double> delta = std::nullopt);
  double recompute_L_tilde() const { return L_f / rho0 + G * G + C * L_c; }
  double max_L() const { return L_f > L_tilde ? L_f : L_tilde; }
};

/// Q_ρ = f + (ρ/2)(‖c_E‖² + ‖[c_I]₊‖²).
double penalty_value(double f_val, const Vector& c, double rho, const ConstraintLayout& layout);

/// ∇Q_ρ(x) = ∇f(x) + ρ∇c(x)[c(x)].
Vector penalty_gradient(const Vector& grad_f, const Vector& x, double rho,
                        const ConstraintMap& constraints);

/// L_ρ = ρ·L̃. Throws InvalidArgument when ρ < ρ₀.
double lipschitz_bound(double rho, const PenaltyConstants& constants);

/// Potential Q_ρ(x) + h(x) + ‖x − z‖²/(2μ) − M_{μg}(z) evaluated with the full objective.
double potential(const Vector& x, const Vector& z, double rho, double mu,
                 const ProblemInstance& problem);

}  // namespace mossp
