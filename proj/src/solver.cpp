#include "mossp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "mossp/problems.hpp"

namespace mossp {

namespace {

constexpr double kRelSlack = 1e-12;

bool leq(double lhs, double rhs) { return lhs <= rhs + kRelSlack * std::abs(rhs); }

struct Exponents {
  double rho;
  double mu;
  double alpha;
};

bool is_polyak_preset(Preset p) { return p == Preset::thm31 || p == Preset::cor31; }
bool is_storm_preset(Preset p) { return p == Preset::thm32 || p == Preset::cor32; }

Exponents exponents_of(Preset p) {
  switch (p) {
    case Preset::thm31: return {1.0 / 4.0, 1.0 / 2.0, 1.0 / 2.0};
    case Preset::cor31: return {1.0 / 5.0, 2.0 / 5.0, 2.0 / 5.0};
    case Preset::thm32: return {1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0};
    case Preset::cor32: return {1.0 / 4.0, 1.0 / 4.0, 1.0 / 2.0};
    case Preset::manual: break;
  }
  return {0.0, 0.0, 0.0};
}

void add(ScheduleReport& rep, std::string name, double lhs, double rhs) {
  rep.checks.push_back({std::move(name), lhs, rhs, leq(lhs, rhs)});
}

double criticality(double u, double gap) { return std::max(u * u, gap * gap); }

}  // namespace

const char* to_string(Variant v) { return v == Variant::mossp_p ? "mossp_p" : "mossp_r"; }

const char* to_string(Preset p) {
  switch (p) {
    case Preset::thm31: return "thm31";
    case Preset::thm32: return "thm32";
    case Preset::cor31: return "cor31";
    case Preset::cor32: return "cor32";
    case Preset::manual: return "manual";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "mossp_p") return Variant::mossp_p;
  if (s == "mossp_r") return Variant::mossp_r;
  throw InvalidArgument("unknown solver variant '" + s + "'");
}

Preset parse_preset(const std::string& s) {
  if (s == "thm31") return Preset::thm31;
  if (s == "thm32") return Preset::thm32;
  if (s == "cor31") return Preset::cor31;
  if (s == "cor32") return Preset::cor32;
  if (s == "manual") return Preset::manual;
  throw InvalidArgument("unknown preset '" + s + "'");
}

bool ScheduleReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.ok; });
}

const InequalityCheck* ScheduleReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.ok) return &c;
  return nullptr;
}

ScheduleReport check_schedule(const SolverConfig& cfg, const PenaltyConstants& constants_in) {
  if (cfg.K == 0) throw InvalidArgument("K must be positive");
  if (cfg.batch == 0) throw InvalidArgument("batch must be positive");
  if (cfg.b0 == 0) throw InvalidArgument("b0 must be positive");
  if (cfg.diag_stride == 0) throw InvalidArgument("diag_stride must be positive");
  if (!(cfg.rho0 > 0.0)) throw InvalidArgument("rho0 must be positive");
  if (!(cfg.mu0 > 0.0)) throw InvalidArgument("mu0 must be positive");
  if (is_polyak_preset(cfg.preset) && cfg.variant != Variant::mossp_p)
    throw InvalidArgument(std::string("preset ") + to_string(cfg.preset) + " requires mossp_p");
  if (is_storm_preset(cfg.preset) && cfg.variant != Variant::mossp_r)
    throw InvalidArgument(std::string("preset ") + to_string(cfg.preset) + " requires mossp_r");

  PenaltyConstants c = constants_in;
  c.rho0 = cfg.rho0;
  c.L_tilde = c.recompute_L_tilde();
  const double L_f = c.L_f;
  const double max_L = c.max_L();
  const double K = static_cast<double>(cfg.K);
  const double mu0 = cfg.mu0;
  const double rho0 = cfg.rho0;

  ScheduleReport rep;
  ScheduleParams& p = rep.params;
  p.L_tilde = c.L_tilde;
  p.max_L = max_L;
  p.beta = cfg.beta;
  p.b0_effective = cfg.b0;

  rep.checks.push_back({"0 < β ≤ 1", cfg.beta, 1.0, cfg.beta > 0.0 && cfg.beta <= 1.0});

  if (cfg.preset == Preset::manual) {
    p.rho = rho0;
    p.mu = mu0;
    p.alpha0 = cfg.alpha0.value_or(cfg.variant == Variant::mossp_p ? 0.905 : 0.9);
    p.alpha = p.alpha0;
  } else if (max_L <= 0.0) {
    throw InvalidArgument("theorem presets need max{L_f, L̃} > 0");
  } else if (is_polyak_preset(cfg.preset)) {
    const Exponents e = exponents_of(cfg.preset);
    add(rep, "μ₀ ≤ 1/(4ρ₀)", mu0, 1.0 / (4.0 * rho0));
    add(rep, "μ₀ ≤ 1/(4L_f)", mu0,
        L_f > 0.0 ? 1.0 / (4.0 * L_f) : std::numeric_limits<double>::infinity());
    const double gamma_min = std::max(1.0, 8.0 * L_f * L_f);
    const double gamma = cfg.gamma.value_or(gamma_min);
    add(rep, "γ ≥ max{1, 8L_f²}", gamma_min, gamma);
    p.alpha0 = 2.0 * gamma / max_L;
    if (cfg.alpha0) {
      const double diff = std::abs(*cfg.alpha0 - p.alpha0);
      rep.checks.push_back({"α₀ = 2γ/max{L_f, L̃}", *cfg.alpha0, p.alpha0,
                            diff <= kRelSlack * std::max(1.0, p.alpha0)});
    }
    p.rho = rho0 * std::pow(K, e.rho);
    p.mu = mu0 / (std::pow(K, e.mu) * max_L);
    p.alpha = p.alpha0 * mu0 / std::pow(K, e.alpha);
  } else {
    const Exponents e = exponents_of(cfg.preset);
    add(rep, "μ₀ ≤ 1/(4ρ₀)", mu0, 1.0 / (4.0 * rho0));
    add(rep, "μ₀ ≤ max{L_f, L̃}/(4√2·L_f)", mu0,
        L_f > 0.0 ? max_L / (4.0 * std::sqrt(2.0) * L_f) : std::numeric_limits<double>::infinity());
    const double alpha0_hi = 1.0 / (16.0 * mu0 * mu0);
    p.alpha0 = cfg.alpha0.value_or(alpha0_hi);
    add(rep, "α₀ ≥ 2L_f²/max{L_f, L̃}²", 2.0 * L_f * L_f / (max_L * max_L), p.alpha0);
    add(rep, "α₀ ≤ 1/(16μ₀²)", p.alpha0, alpha0_hi);
    p.rho = rho0 * std::pow(K, e.rho);
    p.mu = mu0 / (std::pow(K, e.mu) * max_L);
    p.alpha = 16.0 * p.alpha0 * mu0 * mu0 / std::pow(K, e.alpha);
    if (cfg.preset == Preset::thm32) {
      const auto grown = static_cast<std::size_t>(std::ceil(cfg.b0_scale * std::cbrt(K)));
      p.b0_effective = std::max(cfg.b0, grown);
    }
  }

  p.L_rho = p.rho * c.L_tilde;
  add(rep, "μL_ρ ≤ 1/4", p.mu * p.L_rho, 0.25);
  rep.checks.push_back({"0 < α ≤ 1", p.alpha, 1.0, p.alpha > 0.0 && leq(p.alpha, 1.0)});
  if (cfg.variant == Variant::mossp_p) {
    add(rep, "1/α ≤ 1/(2μ)", 1.0 / p.alpha, 1.0 / (2.0 * p.mu));
    add(rep, "L_ρ + 2L_f²/α ≤ (3/4)·1/(2μ)", p.L_rho + 2.0 * L_f * L_f / p.alpha,
        0.75 / (2.0 * p.mu));
  } else {
    add(rep, "32μ²L_f² ≤ α", 32.0 * p.mu * p.mu * L_f * L_f, p.alpha);
  }
  return rep;
}

ScheduleParams make_schedule(const SolverConfig& config, const PenaltyConstants& constants) {
  ScheduleReport rep = check_schedule(config, constants);
  if (const InequalityCheck* bad = rep.first_failure()) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "lhs = %.6g, rhs = %.6g", bad->lhs, bad->rhs);
    throw ScheduleError(bad->name, buf);
  }
  return rep.params;
}

Vector x_update(const Vector& z, const Vector& estimate, double mu, const ProxOracle& prox_h) {
  require_same_size(z, estimate, "x_update");
  return prox_h.prox(z - mu * estimate, mu);
}

Vector z_update(const Vector& z, const Vector& prox_g_z, const Vector& x_new, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw InvalidArgument("beta must lie in (0, 1]");
  require_same_size(z, prox_g_z, "z_update");
  require_same_size(z, x_new, "z_update");
  return z - beta * (prox_g_z - x_new);
}

Vector residual_u(const Vector& x_new, const Vector& z, const Vector& estimate, double mu,
                  double rho, const ProblemInstance& problem) {
  const Vector grad_q =
      penalty_gradient(problem.oracle.full_grad(x_new), x_new, rho, problem.constraints);
  return grad_q - estimate + (problem.prox_g.prox(z, mu) - x_new) / mu;
}

Vector h_subgradient(const Vector& x_new, const Vector& z, const Vector& estimate, double mu) {
  return (z - x_new) / mu - estimate;
}

KKTMeasures kkt_measures(const KKTCertificate& cert) {
  return {criticality(cert.crit_u, cert.crit_gap), cert.feas * cert.feas,
          cert.infeas_stat * cert.infeas_stat};
}

RunResult run(const ProblemInstance& problem, const SolverConfig& config) {
  RunResult out;
  out.schedule = make_schedule(config, problem.constants);
  const ScheduleParams& sp = out.schedule;
  const double rho = sp.rho, mu = sp.mu, alpha = sp.alpha, beta = sp.beta;
  const std::size_t K = config.K;

  Rng rng(config.seed);
  out.R = std::uniform_int_distribution<std::size_t>(0, K - 1)(rng);

  Vector x = config.feasible_init ? problem.initializer(rng)
                                  : random_unit_vector(problem.n, rng);
  if (static_cast<std::size_t>(x.size()) != problem.n)
    throw InvalidArgument("initializer returned a vector of the wrong length");
  Vector z = x;
  out.initial_potential = potential(x, z, rho, mu, problem);

  MomentumState mom;
  mom.variant = config.variant == Variant::mossp_p ? MomentumVariant::polyak : MomentumVariant::storm;
  if (mom.variant == MomentumVariant::storm) mom.x_prev = x;

  const auto t0 = std::chrono::steady_clock::now();
  std::optional<IterationRecord> last_record;
  out.best_criticality = std::numeric_limits<double>::infinity();
  bool warned_ball = false;

  for (std::size_t k = 0; k < K; ++k) {
    // Momentum buffer update (s^k or d^k).
    if (mom.variant == MomentumVariant::polyak) {
      Sample s = problem.oracle.draw(rng, config.batch);
      Vector g = problem.oracle.grad_at(x, s);
      out.oracle_calls += s.count;
      mom.buffer = k == 0 ? g : polyak_step(mom.buffer, g, alpha);
    } else if (k == 0) {
      mom.buffer = storm_init(problem.oracle, x, sp.b0_effective, rng);
      out.oracle_calls += sp.b0_effective;
    } else {
      Sample s = problem.oracle.draw(rng, config.batch);
      Vector g_x = problem.oracle.grad_at(x, s);
      Vector g_prev = problem.oracle.grad_at(*mom.x_prev, s);
      out.oracle_calls += 2 * s.count;
      mom.buffer = storm_step(mom.buffer, g_x, g_prev, alpha);
    }

    const Vector estimate = full_estimate(mom.buffer, x, rho, problem.constraints);
    const Vector y = problem.prox_g.prox(z, mu);
    Vector x_new = x_update(z, estimate, mu, problem.prox_h);
    Vector z_new = z_update(z, y, x_new, beta);

    if (!x_new.allFinite() || !z_new.allFinite() || x_new.norm() > kDivergenceNorm)
      throw DivergedError(k, last_record);
    if (!warned_ball && x_new.norm() > 2.0) {
      out.warnings.push_back("iterate left the ball ||x|| <= 2 used for the penalty constants at k = " +
                             std::to_string(k));
      warned_ball = true;
    }

    const bool at_stride = k % config.diag_stride == 0 || k + 1 == K;
    if (at_stride || k == out.R) {
      const Vector u = residual_u(x_new, z, estimate, mu, rho, problem);
      const Vector v_h = h_subgradient(x_new, z, estimate, mu);
      if (problem.prox_h.subgradient_gap) {
        const double gap = problem.prox_h.subgradient_gap(x_new, v_h);
        out.max_membership_gap = std::max(out.max_membership_gap, gap);
      }
      const Vector c = problem.constraints.active_residual(x_new);
      IterationRecord rec;
      rec.k = k;
      rec.oracle_calls = out.oracle_calls;
      rec.objective = problem.objective(x_new);
      rec.feas = c.norm();
      rec.infeas_stat = problem.constraints.grad_c_c(x_new).norm();
      rec.crit_u = u.norm();
      rec.crit_gap = (x_new - y).norm();
      rec.potential = potential(x_new, z_new, rho, mu, problem);
      if (config.record_time)
        rec.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      const double crit = criticality(rec.crit_u, rec.crit_gap);
      if (crit < out.best_criticality) {
        out.best_criticality = crit;
        out.x_best = x_new;
      }
      if (k == out.R) {
        KKTCertificate& cert = out.certificate;
        cert.x_bar = x_new;
        cert.y_bar = y;
        cert.u_bar = u;
        cert.lambda_bar = rho * problem.constraints.eval(x_new);
        cert.crit_u = rec.crit_u;
        cert.crit_gap = rec.crit_gap;
        cert.feas = rec.feas;
        cert.infeas_stat = rec.infeas_stat;
        out.x_out = x_new;
      }
      if (at_stride) {
        out.records.push_back(rec);
        last_record = rec;
      }
    }

    if (mom.variant == MomentumVariant::storm) mom.x_prev = x;
    x = std::move(x_new);
    z = std::move(z_new);
  }

  out.x_final = x;
  out.z_final = z;
  out.final_objective = problem.objective(x);
  const Vector c = problem.constraints.active_residual(x);
  out.final_feas = c.norm();
  out.final_violation_l1 = c.lpNorm<1>();
  return out;
}

}  // namespace mossp
