#include "mossp/penalty.hpp"

#include <cmath>
#include <string>

#include "mossp/problem.hpp"
#include "mossp/prox.hpp"

namespace mossp {

Vector clamp_inequalities(const Vector& c, const ConstraintLayout& layout) {
  if (layout.kind == ConstraintKind::equality) return c;
  Vector out = c;
  for (Eigen::Index i = static_cast<Eigen::Index>(layout.num_equality); i < out.size(); ++i)
    out[i] = std::max(out[i], 0.0);
  return out;
}

Vector ConstraintMap::active_residual(const Vector& x) const {
  if (m == 0) return Vector::Zero(0);
  return clamp_inequalities(eval(x), layout);
}

Vector ConstraintMap::grad_c_c(const Vector& x) const {
  if (m == 0) return Vector::Zero(x.size());
  return jt_apply(x, active_residual(x));
}

ConstraintMap no_constraints() {
  ConstraintMap cm;
  cm.m = 0;
  cm.eval = [](const Vector&) { return Vector::Zero(0); };
  cm.jt_apply = [](const Vector& x, const Vector&) -> Vector { return Vector::Zero(x.size()); };
  return cm;
}

PenaltyConstants PenaltyConstants::make(double G, double C, double L_f, double L_c, double rho0,
                                        std::optional<double> delta) {
  if (!(rho0 > 0.0)) throw InvalidArgument("rho0 must be positive");
  if (G < 0.0 || C < 0.0 || L_f < 0.0 || L_c < 0.0)
    throw InvalidArgument("penalty constants must be nonnegative");
  if (delta && !(*delta > 0.0)) throw InvalidArgument("delta must be positive when given");
  PenaltyConstants pc;
  pc.G = G;
  pc.C = C;
  pc.L_f = L_f;
  pc.L_c = L_c;
  pc.rho0 = rho0;
  pc.delta = delta;
  pc.L_tilde = pc.recompute_L_tilde();
  return pc;
}

double penalty_value(double f_val, const Vector& c, double rho, const ConstraintLayout& layout) {
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  if (!std::isfinite(f_val)) throw InvalidArgument("objective value is not finite");
  require_finite(c, "constraint value");
  return f_val + 0.5 * rho * clamp_inequalities(c, layout).squaredNorm();
}

Vector penalty_gradient(const Vector& grad_f, const Vector& x, double rho,
                        const ConstraintMap& constraints) {
  require_same_size(grad_f, x, "penalty_gradient");
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  return grad_f + rho * constraints.grad_c_c(x);
}

double lipschitz_bound(double rho, const PenaltyConstants& constants) {
  if (rho < constants.rho0)
    throw InvalidArgument("lipschitz_bound requires rho >= rho0 (rho=" + std::to_string(rho) +
                          ", rho0=" + std::to_string(constants.rho0) + ")");
  return rho * constants.L_tilde;
}

double potential(const Vector& x, const Vector& z, double rho, double mu,
                 const ProblemInstance& problem) {
  require_same_size(x, z, "potential");
  const double q = penalty_value(problem.oracle.full_value(x), problem.constraints.active_residual(x),
                                 rho, problem.constraints.layout);
  const MoreauPoint env_g = moreau_eval(problem.prox_g, z, mu);
  return q + problem.prox_h.value(x) + (x - z).squaredNorm() / (2.0 * mu) - env_g.envelope;
}

}  // namespace mossp
