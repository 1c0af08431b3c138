#include <chrono>
#include <cmath>

#include "btq/criteria.hpp"
#include "doctest.h"

using namespace btq;

namespace {

const QuantizationContext kCtx(1, 0.5);

Symbol magnetic() {
  // |xi - sin x|^2
  return Symbol::callable(
      1, 1,
      [](const PhasePoint& z) {
        const double v = z[0].imag() - std::sin(z[0].real());
        return Matrix::Constant(1, 1, v * v);
      },
      true, "magnetic",
      [](const PhasePoint& z) {
        const double x = z[0].real();
        const double v = z[0].imag() - std::sin(x);
        return std::vector<Matrix>{Matrix::Constant(1, 1, -2.0 * v * std::cos(x)), Matrix::Constant(1, 1, 2.0 * v)};
      });
}

Symbol linear(cplx a) {
  Polynomial p(1, 1);
  p.add_term(MultiIndex{1}, MultiIndex{0}, a);
  p.add_term(MultiIndex{0}, MultiIndex{1}, std::conj(a));
  return Symbol::polynomial(p, "linear");
}

}  // namespace

TEST_CASE("oscillation estimates") {
  const auto c = oscillation_estimate(Symbol::identity(), 4.0);
  CHECK(c.sup_statistic == 0.0);
  CHECK(c.verdict);
  const auto zbar = oscillation_estimate(symbol_derivative(builtin::abs_squared(), 0, false), 4.0);
  CHECK(zbar.sup_statistic == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(zbar.verdict);
  CHECK(zbar.linear_constant <= 1.0 + 1e-12);
  const auto quad = oscillation_estimate(symbol_derivative(builtin::re_z_cubed(), 0, false), 4.0);
  CHECK_FALSE(quad.verdict);
  CHECK(quad.refined_statistic > 1.5 * quad.sup_statistic);
  CHECK_THROWS_AS(oscillation_estimate(Symbol::identity(), 1.0), Error);
}

TEST_CASE("heat smoothing does not increase oscillation") {
  for (const Symbol& f : {builtin::sine_re(), linear({0.3, 0.4}), magnetic()}) {
    const double before = oscillation_estimate(f, 3.0, 64).sup_statistic;
    const double after = oscillation_estimate(heat_transform(f, {0.1}), 3.0, 64).sup_statistic;
    CHECK(after <= 1.05 * before);
  }
}

TEST_CASE("main theorem hypothesis discrimination") {
  for (double s : {0.0, 0.125}) {
    CAPTURE(s);
    CHECK(main_theorem_hypothesis_check(builtin::abs_squared(), s, kCtx).verdict);
    CHECK(main_theorem_hypothesis_check(builtin::sine_re(), s, kCtx).verdict);
    CHECK(main_theorem_hypothesis_check(builtin::relativistic_kinetic(1.0, 1.0), s, kCtx).verdict);
    const auto bad = main_theorem_hypothesis_check(builtin::re_z_cubed(), s, kCtx);
    CHECK_FALSE(bad.verdict);
    CHECK(bad.derivatives.size() == 2);
    CHECK_FALSE(bad.derivatives[0].oscillation.verdict);
  }
  CHECK(main_theorem_hypothesis_check(builtin::abs_squared(), 0.0, kCtx).derivative_method == "closed-form");
  CHECK(main_theorem_hypothesis_check(builtin::sine_re(), 0.125, kCtx).derivative_method == "gradient");
  const Symbol no_grad = Symbol::callable(1, 1, [](const PhasePoint& z) { return Matrix::Constant(1, 1, std::cos(z[0].imag())); },
                                          true, "cos xi");
  const auto fd = main_theorem_hypothesis_check(no_grad, 0.0, kCtx);
  CHECK(fd.derivative_method == "finite-difference");
  CHECK(fd.verdict);
  CHECK_THROWS_AS(main_theorem_hypothesis_check(builtin::abs_squared(), 0.25, kCtx), Error);
  CHECK(main_theorem_hypothesis_check(builtin::shift_interaction(1.0, 0.5, 3), 0.0, kCtx).verdict);
}

TEST_CASE("Berger-Coburn constant") {
  CHECK(bc_constant(0.125, 0.5, 1) == 6.0);
  CHECK(bc_constant(0.2, 0.5, 1) == doctest::Approx(12.0).epsilon(1e-14));
  CHECK(bc_constant(1e-9, 0.5, 2) == doctest::Approx(16.0).epsilon(1e-7));
  double prev = 0.0;
  for (double s = 0.01; s < 0.25; s += 0.01) {
    const double c = bc_constant(s, 0.5, 1);
    CHECK(c > prev);
    prev = c;
  }
  CHECK(bc_constant(0.25 - 1e-9, 0.5, 1) > 1e8);
  CHECK_THROWS_AS(bc_constant(0.25, 0.5, 1), Error);
  CHECK_THROWS_AS(bc_constant(0.0, 0.5, 1), Error);
}

TEST_CASE("Berger-Coburn inequality") {
  const TruncationSpec spec(kCtx, 40);
  const auto one = bc_verify(Symbol::identity(), 0.0625, spec);
  CHECK(one.lhs == doctest::Approx(1.0));
  CHECK(one.holds);
  const auto sine = bc_verify(builtin::sine_re(), 0.125, spec);
  CHECK(sine.holds);
  CHECK(sine.lhs <= 1.0);
  CHECK(sine.rhs == doctest::Approx(6.0 * std::exp(-0.0625)).epsilon(0.02));
  Matrix c = Matrix::Zero(2, 2);
  c(0, 0) = 1.0;
  c(1, 1) = -1.0;
  const auto cm = bc_verify(Symbol::constant(c), 0.125, TruncationSpec(QuantizationContext(1, 0.5, 2), 20));
  CHECK(cm.lhs == doctest::Approx(1.0));
  CHECK(cm.slack > 0.0);
  CHECK_THROWS_AS(bc_verify(builtin::abs_squared(), 0.125, spec), Error);
}

TEST_CASE("perturbation bound") {
  const TruncationSpec spec(kCtx, 40);
  const auto flat = perturbation_bound_check(Symbol::identity(), 0.125, spec);
  CHECK(flat.lhs == doctest::Approx(0.0));
  const auto sq = perturbation_bound_check(builtin::abs_squared(), 0.125, spec);
  CHECK(sq.lhs == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(sq.rhs == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(sq.holds);
  const auto sine = perturbation_bound_check(builtin::sine_re(), 0.125, TruncationSpec(kCtx, 20));
  CHECK(sine.holds);
  CHECK(sine.slack > 0.0);
}

TEST_CASE("Taylor remainder") {
  const double xs[] = {0.3, -0.4};
  const std::vector<double> x(xs, xs + 2);
  const auto q = taylor_remainder_check(builtin::abs_squared(), x);
  CHECK(q.sup_remainder == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(q.holds);
  const auto l = taylor_remainder_check(linear({0.2, 0.7}), x);
  CHECK(l.sup_remainder < 1e-12);
  const auto s = taylor_remainder_check(builtin::sine_re(), x);
  CHECK(s.constant <= 1.0);
  CHECK(s.holds);
  CHECK(s.sup_remainder <= 0.5 + 0.25);
  const Symbol no_grad = Symbol::callable(1, 1, [](const PhasePoint&) { return Matrix::Constant(1, 1, 1.0); }, true, "c");
  CHECK_THROWS_AS(taylor_remainder_check(no_grad, x), Error);
}

TEST_CASE("commutator diagnostics") {
  std::vector<int> cutoffs;
  for (int m = 10; m <= 200; m += 10) cutoffs.push_back(m);
  const auto t0 = std::chrono::steady_clock::now();
  const auto sq = commutator_diagnostics(builtin::abs_squared(), kCtx, cutoffs);
  CHECK(sq.rows.size() == cutoffs.size());
  CHECK(sq.c1_exponent <= 0.05);
  for (const auto& r : sq.rows) {
    CHECK(r.c1 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.c2 < 1e-12);
  }
  const auto cube = commutator_diagnostics(builtin::re_z_cubed(), kCtx, cutoffs);
  CHECK(cube.c1_exponent == doctest::Approx(0.5).epsilon(0.2));
  CHECK(cube.c1_exponent >= 0.4);
  CHECK(cube.c1_exponent <= 0.6);
  const auto sine = commutator_diagnostics(builtin::sine_re(), kCtx, cutoffs);
  CHECK(sine.c1_exponent <= 0.05);
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 60.0);
  CHECK_THROWS_AS(commutator_diagnostics(builtin::abs_squared(), kCtx, {20, 10}), Error);

  // symbols with bounded-oscillation derivatives keep both exponents small
  const auto lin = commutator_diagnostics(linear({0.5, -0.2}), kCtx, cutoffs);
  CHECK(lin.c1_exponent <= 0.1);
  CHECK(lin.c2_exponent <= 0.1);
}

TEST_CASE("theta derivative bound") {
  const auto sq = theta_derivative_bound(builtin::abs_squared());
  CHECK(sq.verdict);
  CHECK(sq.theta_growth.constant == 0.0);
  const auto mag = theta_derivative_bound(magnetic());
  CHECK(mag.verdict);
  CHECK(mag.theta_growth.degree == 2);
  const auto cube = theta_derivative_bound(builtin::re_z_cubed());
  CHECK_FALSE(cube.verdict);
  CHECK(cube.theta_growth.degree == 3);
  // closed-form, gradient and finite-difference routes agree
  const Symbol dth = theta_derivative(magnetic());
  const Symbol fd = theta_derivative(Symbol::callable(1, 1, [](const PhasePoint& z) {
    const double v = z[0].imag() - std::sin(z[0].real());
    return Matrix::Constant(1, 1, v * v);
  }, true, "magnetic-fd"));
  for (const auto& z : phase_grid(1, 2.0, 20)) CHECK(std::abs(dth.eval(z)(0, 0) - fd.eval(z)(0, 0)) < 1e-6);
  const Symbol cube_wrapped = Symbol::callable(1, 1, [](const PhasePoint& z) { return builtin::re_z_cubed().eval(z); },
                                               true, "cube-fd");
  const Symbol a = theta_derivative(builtin::re_z_cubed()), b = theta_derivative(cube_wrapped);
  for (const auto& z : phase_grid(1, 2.0, 20)) CHECK(std::abs(a.eval(z)(0, 0) - b.eval(z)(0, 0)) < 1e-6);
}
