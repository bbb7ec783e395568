#include "mossp/problems.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace mossp {

namespace {

// log(1 + e^{-m}) without overflow.
double logistic_loss(double margin) {
  return margin > 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

// 1/(1 + e^{m}), the magnitude of d/dm log(1 + e^{-m}).
double logistic_weight(double margin) {
  if (margin >= 0.0) {
    const double e = std::exp(-margin);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(margin));
}

double row_dot(const SparseRows& X, Eigen::Index i, const Vector& x) {
  double s = 0.0;
  for (SparseRows::InnerIterator it(X, i); it; ++it) s += it.value() * x[it.index()];
  return s;
}

void add_row(const SparseRows& X, Eigen::Index i, double scale, Vector& out) {
  for (SparseRows::InnerIterator it(X, i); it; ++it) out[it.index()] += scale * it.value();
}

GradientOracle logistic_oracle(std::shared_ptr<const Dataset> data, std::size_t batch) {
  if (batch == 0) throw InvalidArgument("batch size must be positive");
  GradientOracle o;
  o.batch_size = batch;
  o.draw = [N = data->N()](Rng& rng, std::size_t count) {
    Sample s;
    s.count = count;
    s.indices.resize(count);
    std::uniform_int_distribution<std::size_t> pick(0, N - 1);
    for (auto& idx : s.indices) idx = pick(rng);
    return s;
  };
  o.grad_at = [data](const Vector& x, const Sample& s) {
    Vector g = Vector::Zero(x.size());
    if (s.indices.empty()) return g;
    for (std::size_t idx : s.indices) {
      const auto i = static_cast<Eigen::Index>(idx);
      const double yi = data->y[i];
      add_row(data->X, i, -yi * logistic_weight(yi * row_dot(data->X, i, x)), g);
    }
    return Vector(g / static_cast<double>(s.indices.size()));
  };
  o.full_grad = [data](const Vector& x) {
    Vector g = Vector::Zero(x.size());
    const Vector margins = data->y.cwiseProduct(data->X * x);
    for (Eigen::Index i = 0; i < data->X.rows(); ++i)
      add_row(data->X, i, -data->y[i] * logistic_weight(margins[i]), g);
    return Vector(g / static_cast<double>(data->N()));
  };
  o.full_value = [data](const Vector& x) {
    const Vector margins = data->y.cwiseProduct(data->X * x);
    double s = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i) s += logistic_loss(margins[i]);
    return s / static_cast<double>(data->N());
  };
  return o;
}

void require_dataset(const Dataset& data) {
  data.validate();
  if (data.N() == 0) throw InvalidArgument("dataset is empty");
  if (data.n() == 0) throw InvalidArgument("dataset has no features");
}

}  // namespace

void Dataset::validate() const {
  if (static_cast<std::size_t>(y.size()) != N())
    throw InvalidArgument("label count does not match row count");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 1.0 && y[i] != -1.0)
      throw InvalidArgument("label at row " + std::to_string(i + 1) + " is not -1 or +1");
}

double Dataset::max_row_norm() const {
  double best = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double s = 0.0;
    for (SparseRows::InnerIterator it(X, i); it; ++it) s += it.value() * it.value();
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

Dataset normalize_rows(Dataset data) {
  for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
    double s = 0.0;
    for (SparseRows::InnerIterator it(data.X, i); it; ++it) s += it.value() * it.value();
    if (s == 0.0) continue;
    const double inv = 1.0 / std::sqrt(s);
    for (SparseRows::InnerIterator it(data.X, i); it; ++it) it.valueRef() *= inv;
  }
  return data;
}

Dataset synthetic_dataset(std::size_t N, std::size_t n, std::uint64_t seed) {
  if (N == 0 || n == 0) throw InvalidArgument("synthetic dataset needs N >= 1 and n >= 1");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Vector w = random_unit_vector(n, rng);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(N * n);
  Dataset d;
  d.y.resize(static_cast<Eigen::Index>(N));
  Vector row(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < N; ++i) {
    for (auto& v : row) v = normal(rng);
    // Margin scale 3 keeps the classes separable only in part.
    const double p = 1.0 / (1.0 + std::exp(-3.0 * w.dot(row) / std::sqrt(static_cast<double>(n))));
    d.y[static_cast<Eigen::Index>(i)] = unif(rng) < p ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n; ++j)
      trips.emplace_back(static_cast<int>(i), static_cast<int>(j), row[static_cast<Eigen::Index>(j)]);
  }
  d.X.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(n));
  d.X.setFromTriplets(trips.begin(), trips.end());
  d.X.makeCompressed();
  return d;
}

Vector random_unit_vector(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(static_cast<Eigen::Index>(n));
  do {
    for (auto& e : v) e = normal(rng);
  } while (v.norm() == 0.0);
  return v / v.norm();
}

Vector sphere_gradc_c(const Vector& x) { return 2.0 * (x.squaredNorm() - 1.0) * x; }

ConstraintMap sphere_constraint() {
  ConstraintMap cm;
  cm.m = 1;
  cm.eval = [](const Vector& x) {
    Vector c(1);
    c[0] = x.squaredNorm() - 1.0;
    return c;
  };
  cm.jt_apply = [](const Vector& x, const Vector& v) -> Vector {
    if (v.size() != 1) throw InvalidArgument("sphere constraint: multiplier must have length 1");
    return 2.0 * v[0] * x;
  };
  return cm;
}

Vector QuadEqInstance::eval(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != n)
    throw InvalidArgument("quadratic constraints: expected x of length " + std::to_string(n));
  const Vector x2 = x.cwiseAbs2();
  return 0.5 * (q * x2) + a * x - b;
}

QuadEqInstance gen_quadeq(std::size_t n, std::size_t M, Rng& rng) {
  if (n == 0 || M == 0) throw InvalidArgument("gen_quadeq needs n >= 1 and M >= 1");
  const double dn = static_cast<double>(n);
  std::uniform_real_distribution<double> unif(0.5 / dn, 1.0 / dn);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(dn));
  QuadEqInstance inst;
  inst.n = n;
  inst.M = M;
  const auto rows = static_cast<Eigen::Index>(M);
  const auto cols = static_cast<Eigen::Index>(n);
  inst.q.resize(rows, cols);
  inst.a.resize(rows, cols);
  for (Eigen::Index j = 0; j < rows; ++j)
    for (Eigen::Index l = 0; l < cols; ++l) inst.q(j, l) = unif(rng);
  for (Eigen::Index j = 0; j < rows; ++j)
    for (Eigen::Index l = 0; l < cols; ++l) inst.a(j, l) = normal(rng);
  inst.x_star = random_unit_vector(n, rng);
  inst.b = 0.5 * (inst.q * inst.x_star.cwiseAbs2()) + inst.a * inst.x_star;
  return inst;
}

QuadEqInstance gen_quadeq(std::size_t n, std::size_t M, std::uint64_t seed) {
  Rng rng(seed);
  QuadEqInstance inst = gen_quadeq(n, M, rng);
  inst.seed = seed;
  inst.seeded = true;
  return inst;
}

ConstraintMap quadeq_constraints(const QuadEqInstance& inst) {
  auto shared = std::make_shared<const QuadEqInstance>(inst);
  ConstraintMap cm;
  cm.m = inst.M;
  cm.eval = [shared](const Vector& x) { return shared->eval(x); };
  // Σⱼ vⱼ(Qⱼx + aⱼ) = x ⊙ (qᵀv) + aᵀv
  cm.jt_apply = [shared](const Vector& x, const Vector& v) -> Vector {
    if (static_cast<std::size_t>(x.size()) != shared->n ||
        static_cast<std::size_t>(v.size()) != shared->M)
      throw InvalidArgument("quadratic constraints: dimension mismatch in jt_apply");
    return x.cwiseProduct(shared->q.transpose() * v) + shared->a.transpose() * v;
  };
  return cm;
}

PenaltyConstants estimate_constants(ProblemKind kind, const Dataset& data, double lambda,
                                    double rho0, const QuadEqInstance* inst) {
  const double row_max = data.max_row_norm();
  const double L_f = row_max * row_max / 4.0;
  double G_c = 0.0, C = 0.0, L_c = 0.0;
  constexpr double radius = 2.0;
  if (kind == ProblemKind::logistic_sphere) {
    G_c = 2.0 * radius;            // ‖2x‖
    C = radius * radius - 1.0;     // |‖x‖² − 1|
    L_c = 2.0;
  } else {
    if (inst == nullptr) throw InvalidArgument("quadratic constraint constants need an instance");
    double g2 = 0.0, c2 = 0.0, l2 = 0.0;
    for (Eigen::Index j = 0; j < inst->q.rows(); ++j) {
      const double qmax = inst->q.row(j).maxCoeff();
      const double anorm = inst->a.row(j).norm();
      g2 += std::pow(radius * qmax + anorm, 2);
      c2 += std::pow(0.5 * qmax * radius * radius + radius * anorm + std::abs(inst->b[j]), 2);
      l2 += qmax * qmax;
    }
    G_c = std::sqrt(g2);
    C = std::sqrt(c2);
    L_c = std::sqrt(l2);
  }
  const double n = static_cast<double>(data.n());
  const double G = std::max({row_max, lambda * std::sqrt(n), lambda, G_c});
  return PenaltyConstants::make(G, C, L_f, L_c, rho0);
}

ProblemInstance logistic_problem(const Dataset& data, double lambda, std::size_t batch,
                                 double rho0) {
  require_dataset(data);
  auto shared = std::make_shared<const Dataset>(data);
  ProblemInstance p;
  p.name = "logistic_sphere";
  p.n = data.n();
  p.lambda = lambda;
  p.oracle = logistic_oracle(shared, batch);
  p.prox_h = l1_oracle(lambda);
  p.prox_g = l2_norm_oracle(lambda);
  p.constraints = sphere_constraint();
  p.constants = estimate_constants(ProblemKind::logistic_sphere, data, lambda, rho0);
  p.initializer = [n = p.n](Rng& rng) { return random_unit_vector(n, rng); };
  return p;
}

ProblemInstance quadeq_problem(const Dataset& data, const QuadEqInstance& inst, double lambda,
                               std::size_t batch, double rho0, bool start_at_x_star) {
  require_dataset(data);
  if (inst.n != data.n())
    throw InvalidArgument("quadratic instance dimension " + std::to_string(inst.n) +
                          " does not match dataset dimension " + std::to_string(data.n()));
  auto shared = std::make_shared<const Dataset>(data);
  ProblemInstance p;
  p.name = "logistic_quadeq";
  p.n = data.n();
  p.lambda = lambda;
  p.oracle = logistic_oracle(shared, batch);
  p.prox_h = l1_oracle(lambda);
  p.prox_g = l2_norm_oracle(lambda);
  p.constraints = quadeq_constraints(inst);
  p.constants = estimate_constants(ProblemKind::logistic_quadeq, data, lambda, rho0, &inst);
  if (start_at_x_star && inst.x_star.size() == static_cast<Eigen::Index>(inst.n)) {
    p.initializer = [x = inst.x_star](Rng&) { return x; };
  } else {
    p.initializer = [n = p.n](Rng& rng) { return random_unit_vector(n, rng); };
  }
  return p;
}

}  // namespace mossp
