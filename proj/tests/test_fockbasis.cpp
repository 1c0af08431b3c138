#include <cmath>
#include <numbers>
#include <random>

#include "btq/core.hpp"
#include "btq/fockbasis.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace btq;

TEST_CASE("kernel values") {
  QuantizationContext ctx(1, 0.5);
  CHECK(std::abs(reproducing_kernel(ctx, PhasePoint{{0.3, 2.0}}, PhasePoint{{0.0, 0.0}}) - 1.0) < 1e-15);
  CHECK(reproducing_kernel(ctx, PhasePoint{1.0}, PhasePoint{1.0}).real() == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  const PhasePoint w{{0.4, -1.2}};
  CHECK(std::abs(normalized_kernel(ctx, PhasePoint{0.0}, w) - std::exp(-w.norm2() / 2.0)) < 1e-15);
  CHECK(std::abs(normalized_kernel(ctx, w, w)) == doctest::Approx(std::exp(w.norm2() / 2.0)));
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  for (int i = 0; i < 10; ++i) {
    const PhasePoint z{{g(rng), g(rng)}, {g(rng), g(rng)}};
    const PhasePoint v{{g(rng), g(rng)}, {g(rng), g(rng)}};
    QuantizationContext c2(2, 0.8);
    CHECK(std::abs(reproducing_kernel(c2, z, v) - std::conj(reproducing_kernel(c2, v, z))) < 1e-12);
    CHECK(std::norm(reproducing_kernel(c2, z, v)) ==
          doctest::Approx(std::exp(dot(v.conj(), z).real() / 0.8)).epsilon(1e-12));
    CHECK(symplectic_form(z, v) + symplectic_form(v, z) == doctest::Approx(0.0));
  }
}

TEST_CASE("normalized kernel has unit norm") {
  const double t = 0.5;
  const cplx w{1.0, 1.0};
  const cplx v = oracle::mu_integral(t, [&](cplx z) {
    return std::norm(std::exp(-std::norm(w) / (4 * t) + std::conj(w) * z / (2 * t)));
  });
  CHECK(std::abs(v - 1.0) < 1e-10);
}

TEST_CASE("symplectic form and density") {
  CHECK(symplectic_form(PhasePoint{{0.0, 1.0}}, PhasePoint{1.0}) == doctest::Approx(-1.0));
  QuantizationContext ctx(1, 0.5);
  CHECK(gaussian_density(ctx, PhasePoint{0.0}) == doctest::Approx(1.0 / std::numbers::pi));
  const cplx mass = oracle::mu_integral(0.5, [](cplx) { return cplx{1.0, 0.0}; });
  CHECK(std::abs(mass - 1.0) < 1e-10);
}

TEST_CASE("kernel reproduces analytic polynomials") {
  const double t = 0.5;
  const cplx z{0.3, -0.8};
  auto p = [](cplx u) { return 1.0 + 2.0 * u - cplx{0.0, 1.0} * u * u * u; };
  const cplx v = oracle::mu_integral(t, [&](cplx u) { return p(u) * std::conj(std::exp(std::conj(z) * u / (2 * t))); });
  CHECK(std::abs(v - p(z)) < 1e-10);
}

TEST_CASE("basis enumeration") {
  QuantizationContext c1(1, 0.5), c2(2, 0.5);
  const auto b1 = enumerate_basis(TruncationSpec(c1, 3));
  REQUIRE(b1.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(b1[k] == MultiIndex{k});
  const auto b2 = enumerate_basis(TruncationSpec(c2, 1));
  REQUIRE(b2.size() == 3);
  CHECK(b2[0] == MultiIndex{0, 0});
  CHECK(b2[1] == MultiIndex{1, 0});
  CHECK(b2[2] == MultiIndex{0, 1});
  CHECK(TruncationSpec(c2, 10).size() == 66);
  CHECK(TruncationSpec(QuantizationContext(3, 1.0), 7).size() == 120);
  const TruncationSpec a(c2, 6), b(c2, 6);
  CHECK(a.order() == b.order());
  for (int i = 0; i < a.size(); ++i) CHECK(a.position(a.index(i)) == i);
  CHECK_THROWS_AS(TruncationSpec(QuantizationContext(5, 1.0), 2), Error);
}

TEST_CASE("monomials") {
  QuantizationContext ctx(1, 0.5);
  CHECK(std::abs(monomial_eval(ctx, MultiIndex{0}, PhasePoint{{3.0, 1.0}}) - 1.0) < 1e-15);
  CHECK(monomial_eval(ctx, MultiIndex{2}, PhasePoint{1.0}).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  // log-space branch agrees with the direct product near the switch-over
  const cplx z{1.1, 0.4};
  const cplx hi = monomial_eval(ctx, MultiIndex{160}, PhasePoint{z});
  const double ref = 160 * std::log(std::abs(z)) - 0.5 * std::lgamma(161.0);
  CHECK(std::log(std::abs(hi)) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("monomials are orthonormal") {
  const double t = 0.5;
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; b <= 5; ++b) {
      const cplx g = oracle::mu_integral(t, [&](cplx z) { return oracle::e1(t, a, z) * std::conj(oracle::e1(t, b, z)); });
      CHECK(std::abs(g - (a == b ? 1.0 : 0.0)) < 1e-10);
    }
  // oracle basis matches the library basis
  QuantizationContext ctx(1, t);
  for (int k = 0; k < 6; ++k)
    CHECK(std::abs(monomial_eval(ctx, MultiIndex{k}, PhasePoint{{0.7, 0.2}}) - oracle::e1(t, k, {0.7, 0.2})) < 1e-14);
}

TEST_CASE("coherent coefficients") {
  QuantizationContext ctx(1, 0.5);
  const auto c0 = coherent_coefficients(TruncationSpec(ctx, 5), PhasePoint{0.0});
  CHECK(std::abs(c0.coeffs[0] - 1.0) < 1e-15);
  CHECK(c0.coeffs.tail(5).norm() == 0.0);

  const auto c = coherent_coefficients(TruncationSpec(ctx, 40), PhasePoint{1.0});
  CHECK(std::abs(c.coeffs.squaredNorm() + c.tail_mass - 1.0) < 1e-14);
  CHECK(std::abs(c.coeffs.squaredNorm() - 1.0) < 1e-12);

  double prev = 0.0;
  for (int M = 0; M <= 30; M += 3) {
    const double m = coherent_coefficients(TruncationSpec(ctx, M), PhasePoint{{1.5, -0.5}}).coeffs.squaredNorm();
    CHECK(m >= prev);
    prev = m;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-9));

  QuantizationContext c2(2, 0.7);
  const TruncationSpec s2(c2, 30);
  const PhasePoint w{{0.3, 0.2}, {-0.5, 0.1}};
  const auto cw = coherent_coefficients(s2, w);
  const PhasePoint z{{-0.4, 0.6}, {0.2, 0.2}};
  CHECK(std::abs(evaluate_series(s2, cw.coeffs, z) - normalized_kernel(c2, z, w)) < 1e-10);
}

TEST_CASE("Bargmann images of monomials are scaled Hermite functions") {
  auto r = bargmann_hermite_check(QuantizationContext(1, 1.0), 0, {0.0});
  CHECK(r.scaled == doctest::Approx(std::pow(std::numbers::pi, -0.25)));
  CHECK(r.recurrence == doctest::Approx(r.scaled));
  r = bargmann_hermite_check(QuantizationContext(1, 0.5), 1, {0.0});
  CHECK(r.scaled == doctest::Approx(0.0));
  r = bargmann_hermite_check(QuantizationContext(1, 0.5), 0, {0.0});
  CHECK(r.scaled == doctest::Approx(std::pow(0.5, -0.25) * std::pow(std::numbers::pi, -0.25)));
  for (int nu : {2, 5, 11}) {
    r = bargmann_hermite_check(QuantizationContext(1, 0.8), nu, {0.37});
    CHECK(r.scaled == doctest::Approx(r.recurrence).epsilon(1e-12));
  }
  CHECK_THROWS_AS(bargmann_hermite_check(QuantizationContext(2, 0.8), 1, {0.1, 0.2}), Error);
}

TEST_CASE("decay diagnostic") {
  QuantizationContext ctx(1, 0.5);
  const TruncationSpec spec(ctx, 40);
  CHECK(decay_diagnostic(spec, coherent_coefficients(spec, PhasePoint{1.0}).coeffs).verdict ==
        DecayVerdict::SuperPolynomial);
  CHECK(decay_diagnostic(spec, Vector::Ones(spec.size())).verdict == DecayVerdict::PolynomialOrSlower);
  Vector e3 = Vector::Zero(spec.size());
  e3[3] = 1.0;
  const auto rep = decay_diagnostic(spec, e3);
  CHECK(rep.verdict == DecayVerdict::FiniteSupport);
  CHECK(rep.last_nonzero_degree == 3);
  Vector slow(spec.size());
  for (int k = 0; k < spec.size(); ++k) slow[k] = std::pow(1.0 + k, -2.0);
  CHECK(decay_diagnostic(spec, slow).verdict == DecayVerdict::PolynomialOrSlower);
  CHECK_THROWS_AS(decay_diagnostic(spec, Vector::Zero(spec.size())), Error);
  CHECK_THROWS_AS(decay_diagnostic(TruncationSpec(ctx, 5), Vector::Ones(6)), Error);
}
