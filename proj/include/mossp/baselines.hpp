#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "mossp/estimators.hpp"
#include "mossp/problem.hpp"
#include "mossp/solver.hpp"

namespace mossp {

/// Settings for the double-loop comparators. These are simplified
/// comparators: inner loops run a fixed number of steps, g is linearized at
/// the outer iterate, and constraints enter through the same quadratic penalty
/// used by the single-loop solver.
struct BaselineConfig {
  std::size_t outer_K = 1000;
  std::size_t inner_iters = 5;
  double rho = 1.0;
  double prox_weight = 0.2;  ///< μ of the proximal term ‖x − x^k‖²/(2μ) (SPDC)
  double inner_step = 0.01;
  std::optional<double> dual_step;  ///< SALM; defaults to rho
  MomentumVariant momentum = MomentumVariant::polyak;
  std::optional<double> alpha;  ///< defaults to 0.905 (Polyak) / 0.9 (recursive)
  std::size_t batch = 32;
  std::size_t b0 = 1;
  std::uint64_t seed = 0;
  std::size_t diag_stride = 1;  ///< in outer iterations
  bool feasible_init = true;
  bool record_time = false;
  /// When positive, outer iterations continue until this much wall-clock time
  /// has elapsed and outer_K is ignored.
  double time_budget_s = 0.0;

  double effective_alpha() const {
    return alpha.value_or(momentum == MomentumVariant::polyak ? 0.905 : 0.9);
  }
  double effective_dual_step() const { return dual_step.value_or(rho); }
};

/// Throws InvalidArgument on nonpositive sizes or steps and α outside (0, 1].
void check_baseline_config(const BaselineConfig& config);

/// Stochastic proximal DC comparator.
RunResult run_spdc(const ProblemInstance& problem, const BaselineConfig& config);

/// Stochastic linearized augmented-Lagrangian comparator. Equality constraints
/// only. The final multiplier estimate is returned in certificate.lambda_bar.
RunResult run_salm(const ProblemInstance& problem, const BaselineConfig& config);

}  // namespace mossp
