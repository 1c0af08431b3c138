#pragma once

// One-dimensional Gauss rules and the tensorized Gaussian/polar quadratures
// built from them. Rules are computed with Golub-Welsch, polished by Newton
// iteration on scaled three-term recurrences, and cached per node count.

#include <functional>
#include <vector>

#include "btq/core.hpp"

namespace btq::quad {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  // log of the weights; stays finite where the weights underflow
  std::vector<double> log_weights;

  int size() const { return static_cast<int>(nodes.size()); }
};

constexpr int kNodeCap = 1 << 14;

// weight exp(-x^2) on R
const GaussRule& gauss_hermite(int n);
// weight exp(-x) on [0, inf)
const GaussRule& gauss_laguerre(int n);

// E[fn(X)] for X ~ N(mean, sigma^2 I) on R^dim, nodes_per_dim Gauss-Hermite
// nodes per axis. Summation runs in lexicographic node order.
Matrix gaussian_expectation(int dim, int nodes_per_dim, const std::vector<double>& mean, double sigma,
                            const std::function<Matrix(const std::vector<double>&)>& fn);

// Integral against mu on C (n = 1) via the polar rule: uniform trapezoid in
// angle and Gauss-Laguerre in u = r^2 / 2t.
Matrix integrate_mu_polar(double t, int angular_nodes, int radial_nodes,
                          const std::function<Matrix(cplx)>& fn);

// Repeatedly doubles the node count until successive results differ by less
// than tol relative to max(1, |result|_max). Throws Accuracy past the cap.
struct Converged {
  Matrix value;
  int nodes = 0;
  double change = 0.0;
};

Converged converge_nodes(int start, int cap, double tol, const std::function<Matrix(int)>& compute,
                         const char* what);

double max_abs(const Matrix& m);

// Largest power-of-two nodes per axis keeping a dim-fold tensor rule within
// 2^20 evaluation points (and each axis within kNodeCap).
int tensor_node_cap(int dim);

}  // namespace btq::quad
