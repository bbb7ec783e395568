#include "mossp/prox.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mossp {

namespace {

void require_tau(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau))
    throw InvalidArgument("prox threshold must be finite and nonnegative, got " + std::to_string(tau));
}

void require_mu(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw InvalidArgument("smoothing parameter mu must be positive, got " + std::to_string(mu));
}

}  // namespace

Vector soft_threshold(const Vector& z, double tau) {
  require_finite(z, "soft_threshold input");
  require_tau(tau);
  Vector out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double mag = std::abs(z[i]) - tau;
    out[i] = mag > 0.0 ? std::copysign(mag, z[i]) : 0.0;
  }
  return out;
}

Vector prox_l2_norm(const Vector& z, double tau) {
  require_finite(z, "prox_l2_norm input");
  require_tau(tau);
  const double norm = z.norm();
  if (norm <= tau) return Vector::Zero(z.size());
  return (1.0 - tau / norm) * z;
}

ProxOracle zero_oracle() {
  ProxOracle o;
  o.value = [](const Vector&) { return 0.0; };
  o.prox = [](const Vector& z, double mu) {
    require_finite(z, "prox input");
    require_mu(mu);
    return z;
  };
  o.subgradient = [](const Vector& x) -> Vector { return Vector::Zero(x.size()); };
  o.subgradient_gap = [](const Vector&, const Vector& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
  };
  return o;
}

ProxOracle l1_oracle(double lambda) {
  require_tau(lambda);
  ProxOracle o;
  o.value = [lambda](const Vector& x) { return lambda * x.lpNorm<1>(); };
  o.prox = [lambda](const Vector& z, double mu) {
    require_mu(mu);
    return soft_threshold(z, mu * lambda);
  };
  o.subgradient = [lambda](const Vector& x) -> Vector {
    Vector v(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
      v[i] = x[i] > 0.0 ? lambda : (x[i] < 0.0 ? -lambda : 0.0);
    return v;
  };
  // ∂(λ|·|)(t) is {λ·sign t} off zero and [−λ, λ] at zero.
  o.subgradient_gap = [lambda](const Vector& x, const Vector& v) {
    double gap = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double d = x[i] != 0.0 ? std::abs(v[i] - std::copysign(lambda, x[i]))
                                   : std::max(0.0, std::abs(v[i]) - lambda);
      gap = std::max(gap, d);
    }
    return gap;
  };
  return o;
}

ProxOracle l2_norm_oracle(double lambda) {
  require_tau(lambda);
  ProxOracle o;
  o.value = [lambda](const Vector& x) { return lambda * x.norm(); };
  o.prox = [lambda](const Vector& z, double mu) {
    require_mu(mu);
    return prox_l2_norm(z, mu * lambda);
  };
  // λx/‖x‖ off the origin, 0 at the origin (a valid element of the λ-ball).
  o.subgradient = [lambda](const Vector& x) -> Vector {
    const double norm = x.norm();
    if (norm == 0.0) return Vector::Zero(x.size());
    return (lambda / norm) * x;
  };
  o.subgradient_gap = [lambda](const Vector& x, const Vector& v) {
    const double norm = x.norm();
    if (norm == 0.0) return std::max(0.0, v.norm() - lambda);
    return (v - (lambda / norm) * x).cwiseAbs().maxCoeff();
  };
  return o;
}

MoreauPoint moreau_eval(const ProxOracle& oracle, const Vector& z, double mu) {
  require_mu(mu);
  MoreauPoint mp;
  mp.z = z;
  mp.mu = mu;
  mp.p = oracle.prox(z, mu);
  mp.envelope = oracle.value(mp.p) + (mp.p - z).squaredNorm() / (2.0 * mu);
  mp.gradient = (z - mp.p) / mu;
  return mp;
}

Vector dme_gradient(const ProxOracle& prox_phi, const ProxOracle& prox_g, const Vector& z,
                    double mu) {
  require_mu(mu);
  return (prox_g.prox(z, mu) - prox_phi.prox(z, mu)) / mu;
}

DmeCertificate dme_certificate(const Vector& z_bar, double mu, const ProxOracle& prox_phi,
                               const ProxOracle& prox_g) {
  require_mu(mu);
  DmeCertificate c;
  c.x_bar = prox_phi.prox(z_bar, mu);
  c.y_bar = prox_g.prox(z_bar, mu);
  c.u_bar = (c.y_bar - c.x_bar) / mu;
  return c;
}

}  // namespace mossp
