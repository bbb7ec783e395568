#pragma once

#include <functional>

#include "mossp/common.hpp"

namespace mossp {

/// A closed convex (or weakly convex) function exposed through its value and
/// its proximal map prox(z, μ) = argmin_x φ(x) + ‖x − z‖²/(2μ).
///
/// Oracles are pure: the same oracle may be evaluated from several threads.
struct ProxOracle {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&, double)> prox;
  /// Some element of ∂φ(x). Optional; used by the double-loop baselines.
  std::function<Vector(const Vector&)> subgradient;
  /// Largest componentwise distance from v to ∂φ(x). Optional; zero means v ∈ ∂φ(x).
  std::function<double(const Vector&, const Vector&)> subgradient_gap;
};

/// Closed-form prox of τ‖·‖₁. Ties |zᵢ| = τ go to zero.
Vector soft_threshold(const Vector& z, double tau);

/// Closed-form prox of τ‖·‖₂ (block soft thresholding). ‖z‖ = τ maps to zero.
Vector prox_l2_norm(const Vector& z, double tau);

ProxOracle zero_oracle();
ProxOracle l1_oracle(double lambda);
ProxOracle l2_norm_oracle(double lambda);

/// Prox, envelope value and envelope gradient at one point.
struct MoreauPoint {
  Vector z;
  Vector p;
  double mu = 0.0;
  double envelope = 0.0;
  Vector gradient;
};

MoreauPoint moreau_eval(const ProxOracle& oracle, const Vector& z, double mu);

/// Gradient of the difference of envelopes M_{μφ} − M_{μg}: (prox_g(z) − prox_φ(z))/μ.
Vector dme_gradient(const ProxOracle& prox_phi, const ProxOracle& prox_g, const Vector& z,
                    double mu);

/// Two-point criticality certificate built from a near-stationary point of the
/// envelope difference.
struct DmeCertificate {
  Vector x_bar;  ///< prox_φ(z̄)
  Vector y_bar;  ///< prox_g(z̄)
  Vector u_bar;  ///< (ȳ − x̄)/μ, an element of ∂φ(x̄) − ∂g(ȳ)
};

DmeCertificate dme_certificate(const Vector& z_bar, double mu, const ProxOracle& prox_phi,
                               const ProxOracle& prox_g);

}  // namespace mossp
