#pragma once

// Phase-space primitives on C^n with the Gaussian measure
//   dmu(z) = (2 pi t)^{-n} exp(-|z|^2 / 2t) dz.
// C^n is identified with R^{2n} through z_j = x_j + i xi_j; |z|^2 is the
// squared Euclidean norm of the complex vector.

#include <complex>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

#include "btq/errors.hpp"

namespace btq {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct QuantizationContext {
  int n = 1;
  double t = 0.5;
  int d = 1;

  QuantizationContext() = default;
  QuantizationContext(int n_, double t_, int d_ = 1);

  void validate() const;
};

class PhasePoint {
 public:
  PhasePoint() = default;
  explicit PhasePoint(int n) : z_(n, cplx{0.0, 0.0}) {}
  PhasePoint(std::initializer_list<cplx> z) : z_(z) {}
  explicit PhasePoint(std::vector<cplx> z) : z_(std::move(z)) {}

  static PhasePoint from_real(const std::vector<double>& x, const std::vector<double>& xi);

  int dim() const { return static_cast<int>(z_.size()); }
  const cplx& operator[](int j) const { return z_[static_cast<size_t>(j)]; }
  cplx& operator[](int j) { return z_[static_cast<size_t>(j)]; }
  const std::vector<cplx>& coords() const { return z_; }

  double norm2() const;
  double norm() const;
  bool finite() const;

  // (x_1..x_n, xi_1..xi_n)
  std::vector<double> to_real() const;

  PhasePoint conj() const;
  PhasePoint operator+(const PhasePoint& o) const;
  PhasePoint operator-(const PhasePoint& o) const;
  PhasePoint operator-() const;
  PhasePoint operator*(cplx a) const;

 private:
  std::vector<cplx> z_;
};

// sum_j a_j * b_j, no conjugation
cplx dot(const PhasePoint& a, const PhasePoint& b);

cplx reproducing_kernel(const QuantizationContext& ctx, const PhasePoint& z, const PhasePoint& w);
cplx normalized_kernel(const QuantizationContext& ctx, const PhasePoint& z, const PhasePoint& w);
double symplectic_form(const PhasePoint& z, const PhasePoint& w);
double gaussian_density(const QuantizationContext& ctx, const PhasePoint& z);

}  // namespace btq
