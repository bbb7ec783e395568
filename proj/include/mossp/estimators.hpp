#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "mossp/common.hpp"
#include "mossp/penalty.hpp"

namespace mossp {

/// One draw of the randomness ξ. Finite-sum oracles use `indices`; oracles with
/// additive noise use `noise`. A sample can be evaluated at several points,
/// which is what the recursive estimator needs.
struct Sample {
  std::vector<std::size_t> indices;
  std::vector<double> noise;
  std::size_t count = 0;  ///< number of per-sample gradients one evaluation costs
};

/// Stochastic first-order oracle for the smooth part f.
struct GradientOracle {
  /// Draws `count` i.i.d. samples.
  std::function<Sample(Rng&, std::size_t count)> draw;
  /// Averaged sample gradient at x over the drawn sample.
  std::function<Vector(const Vector&, const Sample&)> grad_at;
  std::function<Vector(const Vector&)> full_grad;
  std::function<double(const Vector&)> full_value;
  std::size_t batch_size = 1;
  std::optional<double> sigma_bound;

  Vector sample_grad(const Vector& x, Rng& rng) const { return grad_at(x, draw(rng, batch_size)); }
};

/// Wraps an oracle so that every sample gradient is the exact gradient (σ = 0).
GradientOracle deterministic(GradientOracle oracle);

enum class MomentumVariant { polyak, storm };

struct MomentumState {
  MomentumVariant variant = MomentumVariant::polyak;
  Vector buffer;
  std::optional<Vector> x_prev;  ///< present iff variant == storm
};

/// (1 − α)·s_prev + α·g_new.
Vector polyak_step(const Vector& s_prev, const Vector& g_new, double alpha);

/// g(x, ξ) + (1 − α)(d_prev − g(x_prev, ξ)); both gradients must share ξ.
Vector storm_step(const Vector& d_prev, const Vector& g_new_at_x, const Vector& g_new_at_xprev,
                  double alpha);

/// Average of b0 independent sample gradients at x0.
Vector storm_init(const GradientOracle& oracle, const Vector& x0, std::size_t b0, Rng& rng);

/// buffer + ρ∇c(x)c(x).
Vector full_estimate(const Vector& buffer, const Vector& x, double rho,
                     const ConstraintMap& constraints);

/// ‖estimate − ∇Q_ρ(x)‖ with ∇Q_ρ built from the full gradient.
double error_diagnostic(const Vector& estimate, const Vector& x, double rho,
                        const GradientOracle& oracle, const ConstraintMap& constraints);

}  // namespace mossp
