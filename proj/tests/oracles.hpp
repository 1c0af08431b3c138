#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's quadrature code.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// int_C g(z) dmu_t(z) for n = 1 by the trapezoid rule on a square grid;
// spectrally accurate for smooth integrands with Gaussian decay.
inline cplx mu_integral(double t, const std::function<cplx(cplx)>& g, int points = 241, double half_width = 0.0) {
  const double L = half_width > 0.0 ? half_width : 12.0 * std::sqrt(t);
  const double h = 2.0 * L / (points - 1);
  cplx acc{0.0, 0.0};
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < points; ++j) {
      const cplx z{-L + i * h, -L + j * h};
      acc += g(z) * std::exp(-std::norm(z) / (2.0 * t));
    }
  return acc * h * h / (2.0 * std::numbers::pi * t);
}

inline double factorial(int k) { return std::tgamma(k + 1.0); }

// n = 1 monomial basis element e_k(z)
inline cplx e1(double t, int k, cplx z) { return std::pow(z, k) / std::sqrt(factorial(k) * std::pow(2.0 * t, k)); }

}  // namespace oracle

#include <Eigen/Dense>

namespace oracle {

// largest |eigenvalue| of a hermitian matrix by power iteration on A^2
inline double power_norm(const Eigen::MatrixXcd& a, int iters = 5000) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(a.rows());
  for (int i = 0; i < a.rows(); ++i) v[i] += cplx{0.01 * i, -0.003 * i * i};
  v.normalize();
  double est = 0.0;
  for (int k = 0; k < iters; ++k) {
    Eigen::VectorXcd w = a * (a * v);
    const double nrm = w.norm();
    if (nrm == 0.0) return 0.0;
    const double next = std::sqrt(nrm);
    v = w / nrm;
    if (std::abs(next - est) < 1e-15 * next) return next;
    est = next;
  }
  return est;
}

}  // namespace oracle
