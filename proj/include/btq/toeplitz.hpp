#pragma once

// Compressions P_M T_f P_M of Toeplitz operators onto the truncated Fock
// basis, plus the operators and identity checks built on them.
//
// Matrix convention: entry (nu, mu) is <T_f e_mu, e_nu>; for d > 1 the
// (nu, mu) block is d x d (basis index major, internal index minor).

#include <string>

#include "btq/fockbasis.hpp"
#include "btq/symbol.hpp"

namespace btq {

enum class AssemblyMethod { Auto, ClosedForm, Quadrature };

struct QuadratureSpec {
  // 0 picks a starting count from the cutoff
  int angular = 0;
  int radial = 0;
  double tolerance = 1e-10;
  int cap = 1 << 14;
  AssemblyMethod method = AssemblyMethod::Auto;
  // rows of the assembled matrix
  int max_dim = 4096;

  void validate() const;
};

struct Provenance {
  std::string symbol;
  std::string method;
  int angular = 0;
  int radial = 0;
  double tolerance = 0.0;
  // max |A - A^*| entry before symmetrization
  double hermitian_deviation = 0.0;
};

class TruncatedOperator {
 public:
  // With hermitian = true, deviations up to 1e-9 are symmetrized away and
  // larger ones raise an Assembly error.
  TruncatedOperator(TruncationSpec spec, Matrix m, bool hermitian, Provenance p = {});

  const TruncationSpec& spec() const { return spec_; }
  const Matrix& matrix() const { return m_; }
  bool hermitian() const { return hermitian_; }
  const Provenance& provenance() const { return prov_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  TruncationSpec spec_;
  Matrix m_;
  bool hermitian_;
  Provenance prov_;
};

constexpr double kHermitianTolerance = 1e-9;

TruncatedOperator assemble_toeplitz(const Symbol& f, const TruncationSpec& spec, const QuadratureSpec& q = {});

// diag t(|nu| + n) tensored with the internal identity
TruncatedOperator harmonic_oscillator(const TruncationSpec& spec);

struct BerezinValue {
  Matrix value;
  double tail_mass = 0.0;
  // non-empty when the coherent tail beyond the cutoff exceeds 1e-8
  std::string warning;
};

BerezinValue berezin_transform(const TruncatedOperator& a, const PhasePoint& z);

// exp of the truncated generator (1/2t)(T_{wbar.z} - T_{w.zbar}); maps e_0
// to the normalized kernel k_w.
TruncatedOperator weyl_matrix(const TruncationSpec& spec, const PhasePoint& w);

// max-entry residual over degrees <= max_degree of two same-basis matrices
double interior_residual(const TruncationSpec& spec, const Matrix& a, const Matrix& b, int max_degree);

// W_w W_z - exp(i sign omega(w,z)/2t) W_{z+w} on degrees <= M/2.
double weyl_relation_check(const TruncationSpec& spec, const PhasePoint& w, const PhasePoint& z, int phase_sign = +1);

// W_{-z} T_f W_z against T_{f(. + z)} on degrees <= M/2; f polynomial.
double covariance_check(const Symbol& f, const TruncationSpec& spec, const PhasePoint& z);

// U T_f U^* against T_{f(e^{i theta} .)} with U = diag(e^{i theta (|nu| + n)}).
double rotation_covariance_check(const Symbol& f, const TruncationSpec& spec, double theta);

// -(1/2t)[A, T_{zbar_j}] or, with conjugate, (1/2t)[A, T_{z_j}]
TruncatedOperator form_derivative(const TruncatedOperator& a, int j, bool conjugate);

struct IntegralRepresentation {
  Vector left;   // (T_f g)(z) from the assembled matrix
  Vector right;  // kernel integral with the off-diagonal heat transform
  double residual = 0.0;
};

// g must be supported in degrees <= M/2.
IntegralRepresentation integral_representation_check(const Symbol& f, const TruncationSpec& spec, const Vector& g,
                                                     const PhasePoint& z);

double operator_norm(const TruncatedOperator& a);
// ascending; requires a hermitian operator
Eigen::VectorXd eigenvalues(const TruncatedOperator& a);

// JSON header at <base>.json and entries (row, col, re, im) at <base>.csv.
void export_operator(const TruncatedOperator& a, const std::string& base);
TruncatedOperator import_operator(const std::string& base);

}  // namespace btq
