#include "mossp/estimators.hpp"

#include <string>

namespace mossp {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw InvalidArgument("momentum parameter alpha must lie in (0, 1], got " +
                          std::to_string(alpha));
}

}  // namespace

GradientOracle deterministic(GradientOracle oracle) {
  GradientOracle d = oracle;
  d.draw = [](Rng&, std::size_t count) {
    Sample s;
    s.count = count;
    return s;
  };
  d.grad_at = [full = oracle.full_grad](const Vector& x, const Sample&) { return full(x); };
  d.sigma_bound = 0.0;
  return d;
}

Vector polyak_step(const Vector& s_prev, const Vector& g_new, double alpha) {
  require_alpha(alpha);
  require_same_size(s_prev, g_new, "polyak_step");
  return (1.0 - alpha) * s_prev + alpha * g_new;
}

Vector storm_step(const Vector& d_prev, const Vector& g_new_at_x, const Vector& g_new_at_xprev,
                  double alpha) {
  require_alpha(alpha);
  require_same_size(d_prev, g_new_at_x, "storm_step");
  require_same_size(d_prev, g_new_at_xprev, "storm_step");
  return g_new_at_x + (1.0 - alpha) * (d_prev - g_new_at_xprev);
}

Vector storm_init(const GradientOracle& oracle, const Vector& x0, std::size_t b0, Rng& rng) {
  if (b0 == 0) throw InvalidArgument("initial batch size b0 must be positive");
  return oracle.grad_at(x0, oracle.draw(rng, b0));
}

Vector full_estimate(const Vector& buffer, const Vector& x, double rho,
                     const ConstraintMap& constraints) {
  require_same_size(buffer, x, "full_estimate");
  return buffer + rho * constraints.grad_c_c(x);
}

double error_diagnostic(const Vector& estimate, const Vector& x, double rho,
                        const GradientOracle& oracle, const ConstraintMap& constraints) {
  return (estimate - penalty_gradient(oracle.full_grad(x), x, rho, constraints)).norm();
}

}  // namespace mossp
