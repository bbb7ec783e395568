#include "mossp/baselines.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "mossp/problems.hpp"

namespace mossp {

namespace {

enum class Kind { spdc, salm };

}  // namespace

void check_baseline_config(const BaselineConfig& cfg) {
  if (cfg.outer_K == 0 && cfg.time_budget_s <= 0.0) throw InvalidArgument("outer_K must be positive");
  if (cfg.inner_iters == 0) throw InvalidArgument("inner_iters must be positive");
  if (!(cfg.rho > 0.0)) throw InvalidArgument("rho must be positive");
  if (!(cfg.prox_weight > 0.0)) throw InvalidArgument("prox_weight must be positive");
  if (!(cfg.inner_step > 0.0)) throw InvalidArgument("inner_step must be positive");
  if (!(cfg.effective_dual_step() > 0.0)) throw InvalidArgument("dual_step must be positive");
  if (cfg.batch == 0 || cfg.b0 == 0) throw InvalidArgument("batch sizes must be positive");
  if (cfg.diag_stride == 0) throw InvalidArgument("diag_stride must be positive");
  const double a = cfg.effective_alpha();
  if (!(a > 0.0 && a <= 1.0)) throw InvalidArgument("alpha must lie in (0, 1]");
}

namespace {

// Gradient of the smooth part of the outer model, minus the linearization of g.
Vector smooth_gradient(Kind kind, const ProblemInstance& p, const Vector& grad_f, const Vector& x,
                       const Vector& x_anchor, const Vector& xi_g, const Vector& multipliers,
                       const BaselineConfig& cfg) {
  Vector g = grad_f - xi_g;
  if (p.constraints.m > 0) {
    const Vector c = p.constraints.active_residual(x);
    if (kind == Kind::spdc) {
      g += cfg.rho * p.constraints.jt_apply(x, c);
    } else {
      g += p.constraints.jt_apply(x, multipliers + cfg.rho * c);
    }
  }
  if (kind == Kind::spdc) g += (x - x_anchor) / cfg.prox_weight;
  return g;
}

RunResult run_double_loop(Kind kind, const ProblemInstance& p, const BaselineConfig& cfg) {
  check_baseline_config(cfg);
  if (kind == Kind::salm && p.constraints.layout.kind != ConstraintKind::equality)
    throw InvalidArgument("the SALM comparator supports equality constraints only");
  if (!p.prox_g.subgradient) throw InvalidArgument("baselines need a subgradient oracle for g");

  RunResult out;
  out.schedule.rho = cfg.rho;
  out.schedule.mu = cfg.prox_weight;
  out.schedule.alpha = cfg.effective_alpha();
  out.schedule.b0_effective = cfg.b0;

  Rng rng(cfg.seed);
  Vector x = cfg.feasible_init ? p.initializer(rng) : random_unit_vector(p.n, rng);
  Vector multipliers = Vector::Zero(static_cast<Eigen::Index>(p.constraints.m));
  const double eta = cfg.inner_step;
  const double alpha = cfg.effective_alpha();

  MomentumState mom;
  mom.variant = cfg.momentum;
  bool have_buffer = false;

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  std::optional<IterationRecord> last_record;
  out.best_criticality = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0;; ++k) {
    const Vector xi_g = p.prox_g.subgradient(x);
    // g is λ-Lipschitz (λ‖·‖₂ or 0), so every subgradient has norm at most λ.
    if (xi_g.norm() > p.lambda * (1.0 + 1e-12) + 1e-300)
      throw Error("subgradient of g has norm " + std::to_string(xi_g.norm()) + " > lambda");
    Vector y = x;
    for (std::size_t t = 0; t < cfg.inner_iters; ++t) {
      if (!have_buffer) {
        if (mom.variant == MomentumVariant::storm) {
          mom.buffer = storm_init(p.oracle, y, cfg.b0, rng);
          out.oracle_calls += cfg.b0;
        } else {
          const Sample s = p.oracle.draw(rng, cfg.batch);
          mom.buffer = p.oracle.grad_at(y, s);
          out.oracle_calls += s.count;
        }
        have_buffer = true;
      } else if (mom.variant == MomentumVariant::polyak) {
        const Sample s = p.oracle.draw(rng, cfg.batch);
        mom.buffer = polyak_step(mom.buffer, p.oracle.grad_at(y, s), alpha);
        out.oracle_calls += s.count;
      } else {
        const Sample s = p.oracle.draw(rng, cfg.batch);
        const Vector g_y = p.oracle.grad_at(y, s);
        const Vector g_prev = p.oracle.grad_at(*mom.x_prev, s);
        mom.buffer = storm_step(mom.buffer, g_y, g_prev, alpha);
        out.oracle_calls += 2 * s.count;
      }
      const Vector grad = smooth_gradient(kind, p, mom.buffer, y, x, xi_g, multipliers, cfg);
      mom.x_prev = y;
      y = p.prox_h.prox(y - eta * grad, eta);
    }

    if (!y.allFinite() || y.norm() > kDivergenceNorm) throw DivergedError(k, last_record);

    if (kind == Kind::salm && p.constraints.m > 0)
      multipliers += cfg.effective_dual_step() * p.constraints.eval(y);

    const double t_now = elapsed();
    const bool stop = cfg.time_budget_s > 0.0 ? t_now >= cfg.time_budget_s : k + 1 >= cfg.outer_K;
    if (k % cfg.diag_stride == 0 || stop) {
      // Prox-gradient mapping of the outer model at the new point with exact gradients.
      const Vector xi_new = p.prox_g.subgradient(y);
      const Vector full = smooth_gradient(kind, p, p.oracle.full_grad(y), y, y, xi_new, multipliers, cfg);
      const Vector mapping = (y - p.prox_h.prox(y - eta * full, eta)) / eta;
      IterationRecord rec;
      rec.k = k;
      rec.oracle_calls = out.oracle_calls;
      rec.objective = p.objective(y);
      const Vector c = p.constraints.active_residual(y);
      rec.feas = c.norm();
      rec.infeas_stat = p.constraints.grad_c_c(y).norm();
      rec.crit_u = mapping.norm();
      rec.crit_gap = (y - x).norm();
      rec.potential = std::numeric_limits<double>::quiet_NaN();
      if (cfg.record_time) rec.elapsed_s = t_now;
      const double crit = std::max(rec.crit_u * rec.crit_u, rec.crit_gap * rec.crit_gap);
      if (crit < out.best_criticality) {
        out.best_criticality = crit;
        out.x_best = y;
      }
      out.records.push_back(rec);
      last_record = rec;
    }
    x = std::move(y);
    if (stop) {
      out.R = k;
      break;
    }
  }

  out.x_final = x;
  out.z_final = x;
  out.x_out = x;
  out.final_objective = p.objective(x);
  const Vector c = p.constraints.active_residual(x);
  out.final_feas = c.norm();
  out.final_violation_l1 = c.lpNorm<1>();
  KKTCertificate& cert = out.certificate;
  cert.x_bar = x;
  cert.y_bar = x;
  cert.lambda_bar = kind == Kind::salm ? multipliers : Vector(cfg.rho * p.constraints.eval(x));
  if (last_record) {
    cert.crit_u = last_record->crit_u;
    cert.crit_gap = last_record->crit_gap;
    cert.feas = last_record->feas;
    cert.infeas_stat = last_record->infeas_stat;
  }
  return out;
}

}  // namespace

RunResult run_spdc(const ProblemInstance& problem, const BaselineConfig& config) {
  return run_double_loop(Kind::spdc, problem, config);
}

RunResult run_salm(const ProblemInstance& problem, const BaselineConfig& config) {
  return run_double_loop(Kind::salm, problem, config);
}

}  // namespace mossp
