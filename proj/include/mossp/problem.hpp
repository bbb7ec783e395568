#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "mossp/common.hpp"
#include "mossp/estimators.hpp"
#include "mossp/penalty.hpp"
#include "mossp/prox.hpp"

namespace mossp {

/// min F(x) = f(x) + h(x) − g(x) subject to c(x) = 0, with f accessed through a
/// stochastic gradient oracle and h, g through their proximal maps.
struct ProblemInstance {
  std::string name;
  std::size_t n = 0;
  GradientOracle oracle;
  ProxOracle prox_h;
  ProxOracle prox_g;
  ConstraintMap constraints;
  PenaltyConstants constants;
  double lambda = 0.0;
  /// Initial point x⁰ = z⁰, drawn from the run's generator.
  std::function<Vector(Rng&)> initializer;

  /// F(x) with the full (deterministic) f.
  double objective(const Vector& x) const {
    return oracle.full_value(x) + prox_h.value(x) - prox_g.value(x);
  }
};

}  // namespace mossp
