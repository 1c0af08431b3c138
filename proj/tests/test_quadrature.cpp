#include <cmath>
#include <numbers>

#include "btq/core.hpp"
#include "btq/quadrature.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace btq;

TEST_CASE("three-point Gauss-Hermite matches the tabulated rule") {
  const auto& r = quad::gauss_hermite(3);
  const double x = std::sqrt(1.5);
  CHECK(r.nodes[0] == doctest::Approx(-x).epsilon(1e-15));
  CHECK(r.nodes[1] == doctest::Approx(0.0));
  CHECK(r.nodes[2] == doctest::Approx(x).epsilon(1e-15));
  const double sp = std::sqrt(std::numbers::pi);
  CHECK(r.weights[0] == doctest::Approx(sp / 6.0).epsilon(1e-14));
  CHECK(r.weights[1] == doctest::Approx(2.0 * sp / 3.0).epsilon(1e-14));
}

TEST_CASE("Gauss-Hermite integrates even moments exactly") {
  for (int n : {5, 20, 64, 200}) {
    const auto& r = quad::gauss_hermite(n);
    for (int k = 0; k < std::min(2 * n, 40); k += 2) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += r.weights[i] * std::pow(r.nodes[i], k);
      // int x^k e^{-x^2} = Gamma((k+1)/2)
      CHECK(acc == doctest::Approx(std::tgamma((k + 1) / 2.0)).epsilon(1e-11));
    }
  }
}

TEST_CASE("Gauss-Laguerre integrates moments exactly") {
  for (int n : {4, 30, 120}) {
    const auto& r = quad::gauss_laguerre(n);
    for (int k = 0; k < std::min(2 * n, 30); ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += r.weights[i] * std::pow(r.nodes[i], k);
      CHECK(acc == doctest::Approx(std::tgamma(k + 1.0)).epsilon(1e-11));
    }
  }
}

TEST_CASE("large rules keep finite log weights") {
  const auto& r = quad::gauss_hermite(2048);
  for (double lw : r.log_weights) CHECK(std::isfinite(lw));
  double sum = 0.0;
  for (double w : r.weights) sum += w;
  CHECK(sum == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("gaussian expectation of a quadratic") {
  const Matrix v = quad::gaussian_expectation(2, 8, {1.0, -2.0}, 0.5, [](const std::vector<double>& x) {
    return Matrix::Constant(1, 1, x[0] * x[0] + x[1] * x[1]);
  });
  CHECK(v(0, 0).real() == doctest::Approx(5.0 + 2 * 0.25).epsilon(1e-14));
}

TEST_CASE("polar mu-integral agrees with the trapezoid oracle") {
  const double t = 0.7;
  auto g = [](cplx z) { return std::exp(cplx{0.3, 0.1} * z) * std::conj(z) * std::conj(z) + std::cos(z.real()); };
  const Matrix v = quad::integrate_mu_polar(t, 64, 60, [&](cplx z) { return Matrix::Constant(1, 1, g(z)); });
  const cplx ref = oracle::mu_integral(t, g);
  CHECK(std::abs(v(0, 0) - ref) < 1e-10);
}

TEST_CASE("node doubling reports non-convergence") {
  int calls = 0;
  CHECK_THROWS_AS(quad::converge_nodes(2, 16, 1e-10,
                                       [&](int n) {
                                         ++calls;
                                         return Matrix::Constant(1, 1, static_cast<double>(n));
                                       },
                                       "divergent"),
                  Error);
  CHECK(calls == 4);
}
