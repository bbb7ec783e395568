#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mossp/common.hpp"
#include "mossp/estimators.hpp"
#include "mossp/penalty.hpp"
#include "mossp/problem.hpp"

namespace mossp {

enum class Variant { mossp_p, mossp_r };

/// How (ρ, μ, α) are derived from K and the base constants.
///  - thm31 / cor31: Polyak schedules with exponents (1/4, 1/2, 1/2) and (1/5, 2/5, 2/5)
///  - thm32 / cor32: recursive-momentum schedules with (1/3, 1/3, 2/3) and (1/4, 1/4, 1/2)
///  - manual: ρ = ρ₀, μ = μ₀, α = α₀ used as given
enum class Preset { thm31, thm32, cor31, cor32, manual };

struct SolverConfig {
  Variant variant = Variant::mossp_p;
  std::size_t K = 25000;
  Preset preset = Preset::thm31;
  double rho0 = 1.0;
  double mu0 = 0.25;
  /// Empty selects the preset default (see make_schedule).
  std::optional<double> alpha0;
  /// Polyak presets only; empty selects max{1, 8L_f²}.
  std::optional<double> gamma;
  double beta = 1.0;
  std::size_t batch = 32;
  std::size_t b0 = 1;
  /// Constant in front of K^{1/3} for the thm32 initial batch.
  double b0_scale = 1.0;
  std::uint64_t seed = 0;
  std::size_t diag_stride = 50;
  bool feasible_init = true;
  /// Store wall-clock time in records. Off keeps metric files bit-reproducible.
  bool record_time = false;
};

/// Constant per-run parameters.
struct ScheduleParams {
  double rho = 0.0;
  double mu = 0.0;
  double alpha = 0.0;
  double beta = 1.0;
  double L_rho = 0.0;
  double L_tilde = 0.0;
  double max_L = 0.0;
  double alpha0 = 0.0;  ///< the α₀ actually used
  std::size_t b0_effective = 1;
};

/// One named parameter inequality, evaluated as lhs ≤ rhs.
struct InequalityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = true;
};

struct ScheduleReport {
  ScheduleParams params;
  std::vector<InequalityCheck> checks;
  bool ok() const;
  /// First failing check, if any.
  const InequalityCheck* first_failure() const;
};

/// Evaluates the schedule and every inequality without throwing on violations.
/// Structural errors (K = 0, preset/variant mismatch) still throw.
ScheduleReport check_schedule(const SolverConfig& config, const PenaltyConstants& constants);

/// Throws ScheduleError naming the first violated inequality.
ScheduleParams make_schedule(const SolverConfig& config, const PenaltyConstants& constants);

/// prox_{μh}(z − μ·estimate).
Vector x_update(const Vector& z, const Vector& estimate, double mu, const ProxOracle& prox_h);

/// z − β(prox_{μg}(z) − x_new).
Vector z_update(const Vector& z, const Vector& prox_g_z, const Vector& x_new, double beta);

/// ∇Q_ρ(x_new) − estimate + (prox_{μg}(z) − x_new)/μ with the full gradient.
Vector residual_u(const Vector& x_new, const Vector& z, const Vector& estimate, double mu,
                  double rho, const ProblemInstance& problem);

/// v_h = (z − x_new)/μ − estimate, the element of ∂h(x_new) certified by the x-update.
Vector h_subgradient(const Vector& x_new, const Vector& z, const Vector& estimate, double mu);

struct KKTCertificate {
  Vector x_bar;
  Vector y_bar;
  Vector u_bar;
  Vector lambda_bar;  ///< ρ·c(x̄)
  double crit_u = 0.0;
  double crit_gap = 0.0;
  double feas = 0.0;
  double infeas_stat = 0.0;
};

struct KKTMeasures {
  double criticality = 0.0;           ///< max{‖ū‖², ‖x̄ − ȳ‖²}
  double feasibility = 0.0;           ///< ‖c(x̄)‖²
  double infeasible_stationarity = 0.0;  ///< ‖∇c(x̄)c(x̄)‖²
};

KKTMeasures kkt_measures(const KKTCertificate& cert);

struct IterationRecord {
  std::size_t k = 0;
  std::uint64_t oracle_calls = 0;
  double elapsed_s = 0.0;
  double objective = 0.0;
  double feas = 0.0;
  double infeas_stat = 0.0;
  double crit_u = 0.0;
  double crit_gap = 0.0;
  double potential = 0.0;
};

struct RunResult {
  ScheduleParams schedule;
  std::vector<IterationRecord> records;
  std::size_t R = 0;
  Vector x_out;  ///< x^{R+1}
  KKTCertificate certificate;
  Vector x_final;
  Vector z_final;
  Vector x_best;  ///< diagnostic iterate with the smallest criticality
  double best_criticality = 0.0;
  double initial_potential = 0.0;
  /// Largest dist(v_h, ∂h(x^{k+1})) seen across diagnostic iterations.
  double max_membership_gap = 0.0;
  std::uint64_t oracle_calls = 0;
  double final_objective = 0.0;
  double final_feas = 0.0;          ///< ‖c(x_final)‖₂
  double final_violation_l1 = 0.0;  ///< Σⱼ|cⱼ(x_final)|
  std::vector<std::string> warnings;
};

/// NaN/Inf or runaway iterate. Carries the last valid record.
class DivergedError : public Error {
 public:
  DivergedError(std::size_t k, std::optional<IterationRecord> last)
      : Error("iterate diverged at iteration " + std::to_string(k)), k_(k), last_(std::move(last)) {}
  std::size_t iteration() const { return k_; }
  const std::optional<IterationRecord>& last_record() const { return last_; }

 private:
  std::size_t k_;
  std::optional<IterationRecord> last_;
};

inline constexpr double kDivergenceNorm = 1e6;

/// Runs MoSSP-P or MoSSP-R for config.K iterations.
RunResult run(const ProblemInstance& problem, const SolverConfig& config);

/// Tolerance for the ∂h membership check: 1e−8·(1 + λ).
inline double membership_tolerance(double lambda) { return 1e-8 * (1.0 + lambda); }

const char* to_string(Variant v);
const char* to_string(Preset p);
Variant parse_variant(const std::string& s);
Preset parse_preset(const std::string& s);

}  // namespace mossp
