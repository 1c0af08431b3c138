#pragma once

// Symbols f : C^n -> d x d complex matrices. Polynomial symbols carry an
// exact coefficient table f(z) = sum c_{a,b} z^a zbar^b; callables are
// deterministic pointwise evaluators. Built-ins are named members of either
// family.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "btq/core.hpp"
#include "btq/fockbasis.hpp"

namespace btq {

struct ExponentPair {
  MultiIndex a;  // power of z
  MultiIndex b;  // power of zbar

  auto operator<=>(const ExponentPair&) const = default;
  bool operator==(const ExponentPair&) const = default;
};

class Polynomial {
 public:
  Polynomial(int n, int d);

  static Polynomial constant(const Matrix& c, int n);
  static Polynomial monomial(const MultiIndex& a, const MultiIndex& b, cplx c, int d = 1);

  int n() const { return n_; }
  int d() const { return d_; }
  const std::map<ExponentPair, Matrix>& terms() const { return terms_; }

  // accumulates into an existing term
  void add_term(const MultiIndex& a, const MultiIndex& b, const Matrix& c);
  void add_term(const MultiIndex& a, const MultiIndex& b, cplx c);

  int degree() const;
  Matrix eval(const PhasePoint& z) const;
  // c_{b,a} == adjoint(c_{a,b}) for every term
  bool is_hermitian(double tol = 1e-12) const;

  Polynomial derivative(int j, bool conjugate) const;
  // Gaussian smoothing with E|w|^2 = 2s per complex coordinate
  Polynomial heat(double s) const;
  // z -> f(z + shift)
  Polynomial translate(const PhasePoint& shift) const;
  // z -> f(e^{i theta} z)
  Polynomial rotate(double theta) const;
  // d/dtheta f(e^{i theta} z) at theta = 0
  Polynomial theta_derivative() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(cplx s) const;

  // drops terms whose coefficients are exactly zero
  void prune();

 private:
  int n_;
  int d_;
  std::map<ExponentPair, Matrix> terms_;
};

enum class SymbolKind { Polynomial, Callable, BuiltIn };
enum class BuiltInName { AbsSquared, ReZCubed, RelativisticKinetic, ShiftInteraction, SineRe };

const char* to_string(SymbolKind k);
const char* to_string(BuiltInName b);
std::optional<BuiltInName> builtin_from_string(const std::string& s);

using Evaluator = std::function<Matrix(const PhasePoint&)>;
// (d/dx_1 .. d/dx_n, d/dxi_1 .. d/dxi_n) at a point
using Gradient = std::function<std::vector<Matrix>(const PhasePoint&)>;

class Symbol {
 public:
  static Symbol polynomial(Polynomial p, std::string label = "polynomial");
  // Throws Parameter when `hermitian` is claimed but fails on the sample grid.
  static Symbol callable(int n, int d, Evaluator f, bool hermitian, std::string label, Gradient g = {});
  static Symbol constant(const Matrix& c, int n = 1);
  static Symbol identity(int n = 1, int d = 1);
  // params as listed in the builtin:: factories below
  static Symbol from_builtin(BuiltInName name, const std::vector<double>& params, int n = 1);

  SymbolKind kind() const { return impl_->kind; }
  int n() const { return impl_->n; }
  int d() const { return impl_->d; }
  bool hermitian() const { return impl_->hermitian; }
  const std::string& label() const { return impl_->label; }
  std::optional<BuiltInName> builtin() const { return impl_->builtin; }
  const std::vector<double>& params() const { return impl_->params; }

  // non-null for Polynomial symbols and polynomial-representable built-ins
  const Polynomial* as_polynomial() const { return impl_->poly ? &*impl_->poly : nullptr; }
  bool has_gradient() const { return static_cast<bool>(impl_->gradient); }

  // Evaluator failures surface as Evaluation errors naming the point.
  Matrix eval(const PhasePoint& z) const;
  std::vector<Matrix> real_gradient(const PhasePoint& z) const;

  Symbol with_label(std::string label) const;
  // trusted flag, no grid check
  Symbol with_hermitian(bool h) const;

 private:
  struct Impl {
    SymbolKind kind = SymbolKind::Callable;
    int n = 1;
    int d = 1;
    bool hermitian = false;
    std::string label;
    std::optional<BuiltInName> builtin;
    std::vector<double> params;
    std::optional<Polynomial> poly;
    Evaluator eval;
    Gradient gradient;
  };
  explicit Symbol(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

namespace builtin {
Symbol abs_squared(int n = 1);
// Re(z_1^3)
Symbol re_z_cubed(int n = 1);
// sqrt(|xi|^2 + m^2) + v * sum_j 1/(1 + x_j^2)
Symbol relativistic_kinetic(double m = 1.0, double v = 1.0, int n = 1);
// gamma |z|^2 1 + alpha (z S + zbar S*) + diag(-1/k^2), S the right shift on C^d
Symbol shift_interaction(double alpha, double gamma, int d);
// sin(Re z_1)
Symbol sine_re(int n = 1);
}  // namespace builtin

// Largest singular value.
double spectral_norm(const Matrix& m);

// Deterministic sample points with |z| <= R, including points on |z| = R.
std::vector<PhasePoint> phase_grid(int n, double radius, int count);

double sup_norm_estimate(const Symbol& f, double radius, int count = 400);

struct PolyBound {
  int degree = 0;
  double constant = 0.0;
};

// Smallest N <= 12 whose constant c_N = max ||f(z)|| / (1 + |z|^N) is stable
// (relative change < 10%) when grids of radius R and 2R are joined by one of
// radius 4R.
PolyBound poly_bound_fit(const Symbol& f, double radius, int samples = 400);

struct HeatParams {
  double s = 0.0;
  int nodes = 16;
  double tolerance = 1e-10;
};

Symbol heat_transform(const Symbol& f, const HeatParams& hp);

// int f(u) k_z(u) conj(k_w(u)) dmu_tau(u) with quantization parameter tau
Matrix off_diagonal_heat(const Symbol& f, double tau, const PhasePoint& z, const PhasePoint& w,
                         int start_nodes = 16, double tol = 1e-10);

struct SemigroupResidual {
  Matrix left;
  Matrix right;
  double residual = 0.0;
};

// Both sides of the two-point semigroup identity at times t and (s, t - s).
SemigroupResidual semigroup_identity_check(const Symbol& f, double t, double s, const PhasePoint& z,
                                           const PhasePoint& w);

// Wirtinger derivative d/dz_j (conjugate = false) or d/dzbar_j.
Symbol symbol_derivative(const Symbol& f, int j, bool conjugate);

}  // namespace btq
