#include "btq/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

namespace btq::quad {

namespace {

// p_cur and p_prev share one scale factor exp(log_scale).
struct ScaledPair {
  double cur = 0.0;
  double prev = 0.0;
  double log_scale = 0.0;

  void rescale() {
    const double a = std::abs(cur);
    if (a > 1e150 || (a < 1e-150 && a > 0.0)) {
      const double l = std::log(a);
      cur /= a;
      prev /= a;
      log_scale += l;
    }
  }
};

// Orthonormal Hermite polynomials for weight exp(-x^2): returns (p_n, p_{n-1}).
ScaledPair hermite_orthonormal(int n, double x) {
  ScaledPair p;
  p.prev = 0.0;
  p.cur = std::pow(std::numbers::pi, -0.25);
  for (int k = 0; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * x * p.cur - std::sqrt(static_cast<double>(k) / (k + 1)) * p.prev;
    p.prev = p.cur;
    p.cur = next;
    p.rescale();
  }
  return p;
}

// Laguerre polynomials (orthonormal for exp(-x)): returns (L_n, L_{n-1}).
ScaledPair laguerre(int n, double x) {
  ScaledPair p;
  p.prev = 0.0;
  p.cur = 1.0;
  for (int k = 0; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * p.cur - k * p.prev) / (k + 1.0);
    p.prev = p.cur;
    p.cur = next;
    p.rescale();
  }
  return p;
}

std::vector<double> jacobi_eigenvalues(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, ErrorKind::Accuracy, "Golub-Welsch eigen solve failed");
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

GaussRule build_hermite(int n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(k / 2.0);
  GaussRule r;
  r.nodes = jacobi_eigenvalues(diag, sub);
  r.weights.resize(n);
  r.log_weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = r.nodes[i];
    for (int it = 0; it < 4; ++it) {
      const auto p = hermite_orthonormal(n, x);
      const double deriv = std::sqrt(2.0 * n) * p.prev;
      if (deriv == 0.0) break;
      const double dx = p.cur / deriv;
      x -= dx;
      if (std::abs(dx) < 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    r.nodes[i] = x;
    const auto p = hermite_orthonormal(n, x);
    // w = 2 / (sqrt(2n) p_{n-1})^2
    const double log_pp = std::log(std::sqrt(2.0 * n) * std::abs(p.prev)) + p.log_scale;
    r.log_weights[i] = std::log(2.0) - 2.0 * log_pp;
    r.weights[i] = std::exp(r.log_weights[i]);
  }
  // symmetric rule: enforce exact antisymmetry of nodes
  for (int i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (r.nodes[n - 1 - i] - r.nodes[i]);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    const double lw = 0.5 * (r.log_weights[i] + r.log_weights[n - 1 - i]);
    r.log_weights[i] = r.log_weights[n - 1 - i] = lw;
    r.weights[i] = r.weights[n - 1 - i] = std::exp(lw);
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

GaussRule build_laguerre(int n) {
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag[k] = 2.0 * k + 1.0;
  for (int k = 1; k < n; ++k) sub[k - 1] = k;
  GaussRule r;
  r.nodes = jacobi_eigenvalues(diag, sub);
  r.weights.resize(n);
  r.log_weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = r.nodes[i];
    for (int it = 0; it < 4; ++it) {
      const auto p = laguerre(n, x);
      const double deriv = n * (p.cur - p.prev) / x;
      if (deriv == 0.0) break;
      const double dx = p.cur / deriv;
      x -= dx;
      if (std::abs(dx) < 1e-16 * std::max(1.0, x)) break;
    }
    r.nodes[i] = x;
    const auto p = laguerre(n, x);
    // w = x / (n L_{n-1}(x))^2
    r.log_weights[i] = std::log(x) - 2.0 * (std::log(n * std::abs(p.prev)) + p.log_scale);
    r.weights[i] = std::exp(r.log_weights[i]);
  }
  return r;
}

template <GaussRule (*Build)(int)>
const GaussRule& cached(int n, const char* name) {
  require(n >= 1 && n <= kNodeCap, ErrorKind::Parameter,
          std::string(name) + " node count out of range: " + std::to_string(n));
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(Build(n));
  return *slot;
}

}  // namespace

const GaussRule& gauss_hermite(int n) { return cached<build_hermite>(n, "Gauss-Hermite"); }
const GaussRule& gauss_laguerre(int n) { return cached<build_laguerre>(n, "Gauss-Laguerre"); }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

int tensor_node_cap(int dim) {
  constexpr double kBudget = 1 << 20;
  int cap = 1;
  while (std::pow(2.0 * cap, dim) <= kBudget && 2 * cap <= kNodeCap) cap *= 2;
  return cap;
}

Matrix gaussian_expectation(int dim, int nodes_per_dim, const std::vector<double>& mean, double sigma,
                            const std::function<Matrix(const std::vector<double>&)>& fn) {
  require(static_cast<int>(mean.size()) == dim, ErrorKind::Parameter, "mean has wrong dimension");
  const GaussRule& rule = gauss_hermite(nodes_per_dim);
  const double scale = std::sqrt(2.0) * sigma;
  const double norm = std::pow(std::numbers::pi, -0.5 * dim);
  std::vector<int> idx(static_cast<size_t>(dim), 0);
  std::vector<double> x(static_cast<size_t>(dim));
  Matrix acc;
  for (;;) {
    double w = norm;
    for (int k = 0; k < dim; ++k) {
      x[k] = mean[k] + scale * rule.nodes[idx[k]];
      w *= rule.weights[idx[k]];
    }
    if (w > 0.0) {
      Matrix v = fn(x);
      if (acc.size() == 0) acc = Matrix::Zero(v.rows(), v.cols());
      acc += w * v;
    }
    int k = dim - 1;
    while (k >= 0 && ++idx[k] == nodes_per_dim) idx[k--] = 0;
    if (k < 0) break;
  }
  return acc;
}

Matrix integrate_mu_polar(double t, int angular_nodes, int radial_nodes, const std::function<Matrix(cplx)>& fn) {
  const GaussRule& rule = gauss_laguerre(radial_nodes);
  Matrix acc;
  for (int j = 0; j < radial_nodes; ++j) {
    const double w = rule.weights[j];
    if (w == 0.0) continue;
    const double r = std::sqrt(2.0 * t * rule.nodes[j]);
    Matrix ring;
    for (int l = 0; l < angular_nodes; ++l) {
      const double th = 2.0 * std::numbers::pi * l / angular_nodes;
      Matrix v = fn(std::polar(r, th));
      if (ring.size() == 0) ring = Matrix::Zero(v.rows(), v.cols());
      ring += v;
    }
    if (acc.size() == 0) acc = Matrix::Zero(ring.rows(), ring.cols());
    acc += (w / angular_nodes) * ring;
  }
  return acc;
}

Converged converge_nodes(int start, int cap, double tol, const std::function<Matrix(int)>& compute,
                         const char* what) {
  require(start >= 1 && start <= cap, ErrorKind::Parameter, std::string(what) + ": bad starting node count");
  Converged c;
  c.nodes = start;
  c.value = compute(start);
  for (int nodes = 2 * start; nodes <= cap; nodes *= 2) {
    Matrix next = compute(nodes);
    c.change = max_abs(next - c.value) / std::max(1.0, max_abs(next));
    c.value = std::move(next);
    c.nodes = nodes;
    if (c.change < tol) return c;
  }
  fail(ErrorKind::Accuracy, std::string(what) + ": quadrature did not converge below tolerance " +
                                std::to_string(tol) + " (last change " + std::to_string(c.change) + ")");
}

}  // namespace btq::quad
