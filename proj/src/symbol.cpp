#include "btq/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "btq/quadrature.hpp"

namespace btq {

namespace {

std::string point_str(const PhasePoint& z) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (int j = 0; j < z.dim(); ++j) os << (j ? ", " : "") << z[j].real() << (z[j].imag() < 0 ? "" : "+") << z[j].imag() << 'i';
  os << ')';
  return os.str();
}

cplx ipow(cplx z, int k) {
  cplx p{1.0, 0.0};
  for (int i = 0; i < k; ++i) p *= z;
  return p;
}

cplx monomial_value(const PhasePoint& z, const ExponentPair& e) {
  cplx v{1.0, 0.0};
  for (int j = 0; j < z.dim(); ++j) v *= ipow(z[j], e.a[j]) * ipow(std::conj(z[j]), e.b[j]);
  return v;
}

}  // namespace

// ---------------------------------------------------------------- Polynomial

Polynomial::Polynomial(int n, int d) : n_(n), d_(d) {
  require(n >= 1 && d >= 1, ErrorKind::Parameter, "polynomial needs n >= 1 and d >= 1");
}

Polynomial Polynomial::constant(const Matrix& c, int n) {
  require(c.rows() == c.cols(), ErrorKind::Parameter, "constant symbol must be square");
  Polynomial p(n, static_cast<int>(c.rows()));
  p.add_term(MultiIndex(n), MultiIndex(n), c);
  return p;
}

Polynomial Polynomial::monomial(const MultiIndex& a, const MultiIndex& b, cplx c, int d) {
  Polynomial p(a.size(), d);
  p.add_term(a, b, c);
  return p;
}

void Polynomial::add_term(const MultiIndex& a, const MultiIndex& b, const Matrix& c) {
  require(a.size() == n_ && b.size() == n_, ErrorKind::Parameter, "exponent length must equal n");
  require(a.valid() && b.valid(), ErrorKind::Parameter, "exponents must be non-negative");
  require(c.rows() == d_ && c.cols() == d_, ErrorKind::Parameter, "coefficient must be d x d");
  auto [it, inserted] = terms_.try_emplace(ExponentPair{a, b}, c);
  if (!inserted) it->second += c;
}

void Polynomial::add_term(const MultiIndex& a, const MultiIndex& b, cplx c) {
  add_term(a, b, Matrix(c * Matrix::Identity(d_, d_)));
}

int Polynomial::degree() const {
  int deg = 0;
  for (const auto& [e, c] : terms_)
    if (c.cwiseAbs().maxCoeff() > 0.0) deg = std::max(deg, e.a.degree() + e.b.degree());
  return deg;
}

Matrix Polynomial::eval(const PhasePoint& z) const {
  require(z.dim() == n_, ErrorKind::Parameter, "phase point dimension differs from symbol dimension");
  Matrix acc = Matrix::Zero(d_, d_);
  for (const auto& [e, c] : terms_) acc += monomial_value(z, e) * c;
  return acc;
}

bool Polynomial::is_hermitian(double tol) const {
  for (const auto& [e, c] : terms_) {
    auto it = terms_.find(ExponentPair{e.b, e.a});
    const Matrix partner = it == terms_.end() ? Matrix::Zero(d_, d_) : it->second;
    if ((partner - c.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

Polynomial Polynomial::derivative(int j, bool conjugate) const {
  require(j >= 0 && j < n_, ErrorKind::Parameter, "derivative coordinate out of range");
  Polynomial out(n_, d_);
  for (const auto& [e, c] : terms_) {
    const int power = conjugate ? e.b[j] : e.a[j];
    if (power == 0) continue;
    if (conjugate)
      out.add_term(e.a, e.b.with(j, power - 1), Matrix(static_cast<double>(power) * c));
    else
      out.add_term(e.a.with(j, power - 1), e.b, Matrix(static_cast<double>(power) * c));
  }
  return out;
}

Polynomial Polynomial::heat(double s) const {
  require(s >= 0.0, ErrorKind::Parameter, "heat time must be >= 0");
  Polynomial out(n_, d_);
  for (const auto& [e, c] : terms_) {
    // enumerate alpha <= min(a, b) componentwise
    std::vector<int> lim(static_cast<size_t>(n_));
    for (int j = 0; j < n_; ++j) lim[j] = std::min(e.a[j], e.b[j]);
    std::vector<int> alpha(static_cast<size_t>(n_), 0);
    for (;;) {
      double factor = 1.0;
      for (int j = 0; j < n_; ++j) {
        const int k = alpha[j];
        factor *= binomial(e.a[j], k) * binomial(e.b[j], k) * std::tgamma(k + 1.0) * std::pow(2.0 * s, k);
      }
      const MultiIndex al(alpha);
      if (factor != 0.0) out.add_term(e.a - al, e.b - al, Matrix(factor * c));
      int j = n_ - 1;
      while (j >= 0 && ++alpha[j] > lim[j]) alpha[j--] = 0;
      if (j < 0) break;
    }
  }
  return out;
}

Polynomial Polynomial::translate(const PhasePoint& shift) const {
  require(shift.dim() == n_, ErrorKind::Parameter, "shift dimension mismatch");
  Polynomial out(n_, d_);
  for (const auto& [e, c] : terms_) {
    std::vector<int> p(static_cast<size_t>(n_), 0), q(static_cast<size_t>(n_), 0);
    for (;;) {
      cplx factor{1.0, 0.0};
      for (int j = 0; j < n_; ++j) {
        factor *= binomial(e.a[j], p[j]) * binomial(e.b[j], q[j]) * ipow(shift[j], e.a[j] - p[j]) *
                  ipow(std::conj(shift[j]), e.b[j] - q[j]);
      }
      if (factor != cplx{0.0, 0.0}) out.add_term(MultiIndex(p), MultiIndex(q), Matrix(factor * c));
      // odometer over (p, q) with p <= a, q <= b
      int k = 2 * n_ - 1;
      for (; k >= 0; --k) {
        int& slot = k < n_ ? p[k] : q[k - n_];
        const int lim = k < n_ ? e.a[k] : e.b[k - n_];
        if (++slot <= lim) break;
        slot = 0;
      }
      if (k < 0) break;
    }
  }
  return out;
}

Polynomial Polynomial::rotate(double theta) const {
  Polynomial out(n_, d_);
  for (const auto& [e, c] : terms_)
    out.add_term(e.a, e.b, Matrix(std::polar(1.0, theta * (e.a.degree() - e.b.degree())) * c));
  return out;
}

Polynomial Polynomial::theta_derivative() const {
  Polynomial out(n_, d_);
  for (const auto& [e, c] : terms_) {
    const int k = e.a.degree() - e.b.degree();
    if (k != 0) out.add_term(e.a, e.b, Matrix(cplx{0.0, static_cast<double>(k)} * c));
  }
  return out;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  require(n_ == o.n_ && d_ == o.d_, ErrorKind::Parameter, "polynomial shape mismatch");
  Polynomial out(*this);
  for (const auto& [e, c] : o.terms_) out.add_term(e.a, e.b, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o.scaled(-1.0); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  require(n_ == o.n_ && d_ == o.d_, ErrorKind::Parameter, "polynomial shape mismatch");
  Polynomial out(n_, d_);
  for (const auto& [e1, c1] : terms_)
    for (const auto& [e2, c2] : o.terms_) out.add_term(e1.a + e2.a, e1.b + e2.b, Matrix(c1 * c2));
  return out;
}

Polynomial Polynomial::scaled(cplx s) const {
  Polynomial out(*this);
  for (auto& [e, c] : out.terms_) c *= s;
  return out;
}

void Polynomial::prune() {
  std::erase_if(terms_, [](const auto& kv) { return kv.second.cwiseAbs().maxCoeff() == 0.0; });
}

// -------------------------------------------------------------------- Symbol

const char* to_string(SymbolKind k) {
  switch (k) {
    case SymbolKind::Polynomial: return "polynomial";
    case SymbolKind::Callable: return "callable";
    case SymbolKind::BuiltIn: return "builtin";
  }
  return "unknown";
}

const char* to_string(BuiltInName b) {
  switch (b) {
    case BuiltInName::AbsSquared: return "AbsSquared";
    case BuiltInName::ReZCubed: return "ReZCubed";
    case BuiltInName::RelativisticKinetic: return "RelativisticKinetic";
    case BuiltInName::ShiftInteraction: return "ShiftInteraction";
    case BuiltInName::SineRe: return "SineRe";
  }
  return "unknown";
}

std::optional<BuiltInName> builtin_from_string(const std::string& s) {
  for (auto b : {BuiltInName::AbsSquared, BuiltInName::ReZCubed, BuiltInName::RelativisticKinetic,
                 BuiltInName::ShiftInteraction, BuiltInName::SineRe})
    if (s == to_string(b)) return b;
  return std::nullopt;
}

namespace {

Gradient polynomial_gradient(const Polynomial& p) {
  std::vector<Polynomial> dz, dzb;
  for (int j = 0; j < p.n(); ++j) {
    dz.push_back(p.derivative(j, false));
    dzb.push_back(p.derivative(j, true));
  }
  return [dz, dzb](const PhasePoint& z) {
    const size_t n = dz.size();
    std::vector<Matrix> g(2 * n);
    for (size_t j = 0; j < n; ++j) {
      const Matrix a = dz[j].eval(z);
      const Matrix b = dzb[j].eval(z);
      g[j] = a + b;                           // d/dx_j
      g[j + n] = cplx{0.0, 1.0} * (a - b);    // d/dxi_j
    }
    return g;
  };
}

bool hermitian_on_grid(int n, const Evaluator& f, double tol) {
  for (const auto& z : phase_grid(n, 3.0, 64)) {
    const Matrix m = f(z);
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol * std::max(1.0, m.cwiseAbs().maxCoeff())) return false;
  }
  return true;
}

}  // namespace

Symbol Symbol::polynomial(Polynomial p, std::string label) {
  auto impl = std::make_shared<Impl>();
  impl->kind = SymbolKind::Polynomial;
  impl->n = p.n();
  impl->d = p.d();
  impl->hermitian = p.is_hermitian();
  impl->label = std::move(label);
  impl->gradient = polynomial_gradient(p);
  impl->poly = std::move(p);
  return Symbol(std::move(impl));
}

Symbol Symbol::callable(int n, int d, Evaluator f, bool hermitian, std::string label, Gradient g) {
  require(n >= 1 && d >= 1, ErrorKind::Parameter, "callable symbol needs n >= 1 and d >= 1");
  require(static_cast<bool>(f), ErrorKind::Parameter, "callable symbol needs an evaluator");
  auto impl = std::make_shared<Impl>();
  impl->kind = SymbolKind::Callable;
  impl->n = n;
  impl->d = d;
  impl->label = std::move(label);
  impl->eval = std::move(f);
  impl->gradient = std::move(g);
  if (hermitian)
    require(hermitian_on_grid(n, impl->eval, 1e-10), ErrorKind::Parameter,
            "symbol '" + impl->label + "' is not hermitian on the sample grid");
  impl->hermitian = hermitian;
  return Symbol(std::move(impl));
}

Symbol Symbol::constant(const Matrix& c, int n) { return polynomial(Polynomial::constant(c, n), "constant"); }

Symbol Symbol::identity(int n, int d) { return constant(Matrix::Identity(d, d), n); }

Symbol Symbol::from_builtin(BuiltInName name, const std::vector<double>& params, int n) {
  auto impl = std::make_shared<Impl>();
  impl->kind = SymbolKind::BuiltIn;
  impl->builtin = name;
  impl->params = params;
  impl->n = n;
  impl->d = 1;
  impl->hermitian = true;
  impl->label = to_string(name);
  auto need = [&](size_t k) {
    require(params.size() == k, ErrorKind::Parameter,
            std::string(to_string(name)) + " expects " + std::to_string(k) + " parameters");
  };
  require(n >= 1, ErrorKind::Parameter, "n must be >= 1");
  switch (name) {
    case BuiltInName::AbsSquared: {
      need(0);
      Polynomial p(n, 1);
      for (int j = 0; j < n; ++j) p.add_term(MultiIndex::unit(n, j), MultiIndex::unit(n, j), 1.0);
      impl->poly = p;
      break;
    }
    case BuiltInName::ReZCubed: {
      need(0);
      Polynomial p(n, 1);
      const MultiIndex three = MultiIndex(n).with(0, 3);
      p.add_term(three, MultiIndex(n), 0.5);
      p.add_term(MultiIndex(n), three, 0.5);
      impl->poly = p;
      break;
    }
    case BuiltInName::ShiftInteraction: {
      need(3);
      require(n == 1, ErrorKind::Parameter, "ShiftInteraction is defined for n = 1");
      const double alpha = params[0];
      const double gamma = params[1];
      const int d = static_cast<int>(std::lround(params[2]));
      require(d >= 1 && static_cast<double>(d) == params[2], ErrorKind::Parameter,
              "ShiftInteraction internal dimension must be a positive integer");
      impl->d = d;
      Matrix shift = Matrix::Zero(d, d);
      for (int k = 0; k + 1 < d; ++k) shift(k + 1, k) = 1.0;
      Matrix levels = Matrix::Zero(d, d);
      for (int k = 0; k < d; ++k) levels(k, k) = -1.0 / ((k + 1.0) * (k + 1.0));
      Polynomial p(1, d);
      p.add_term(MultiIndex{0}, MultiIndex{0}, levels);
      p.add_term(MultiIndex{1}, MultiIndex{1}, Matrix(gamma * Matrix::Identity(d, d)));
      p.add_term(MultiIndex{1}, MultiIndex{0}, Matrix(alpha * shift));
      p.add_term(MultiIndex{0}, MultiIndex{1}, Matrix(alpha * shift.adjoint()));
      p.prune();
      impl->poly = p;
      break;
    }
    case BuiltInName::SineRe: {
      need(0);
      impl->eval = [](const PhasePoint& z) { return Matrix::Constant(1, 1, std::sin(z[0].real())); };
      impl->gradient = [n](const PhasePoint& z) {
        std::vector<Matrix> g(2 * static_cast<size_t>(n), Matrix::Zero(1, 1));
        g[0](0, 0) = std::cos(z[0].real());
        return g;
      };
      break;
    }
    case BuiltInName::RelativisticKinetic: {
      require(params.size() == 1 || params.size() == 2, ErrorKind::Parameter,
              "RelativisticKinetic expects [m] or [m, v]");
      const double m = params[0];
      const double v = params.size() == 2 ? params[1] : 1.0;
      require(m > 0.0, ErrorKind::Parameter, "RelativisticKinetic mass must be > 0");
      impl->eval = [m, v](const PhasePoint& z) {
        double xi2 = 0.0, pot = 0.0;
        for (int j = 0; j < z.dim(); ++j) {
          xi2 += z[j].imag() * z[j].imag();
          pot += 1.0 / (1.0 + z[j].real() * z[j].real());
        }
        return Matrix::Constant(1, 1, std::sqrt(xi2 + m * m) + v * pot);
      };
      impl->gradient = [m, v](const PhasePoint& z) {
        const int nn = z.dim();
        double xi2 = 0.0;
        for (int j = 0; j < nn; ++j) xi2 += z[j].imag() * z[j].imag();
        const double root = std::sqrt(xi2 + m * m);
        std::vector<Matrix> g(2 * static_cast<size_t>(nn), Matrix::Zero(1, 1));
        for (int j = 0; j < nn; ++j) {
          const double x = z[j].real();
          g[j](0, 0) = -2.0 * v * x / ((1.0 + x * x) * (1.0 + x * x));
          g[j + nn](0, 0) = z[j].imag() / root;
        }
        return g;
      };
      break;
    }
  }
  if (impl->poly) {
    impl->gradient = polynomial_gradient(*impl->poly);
    impl->hermitian = impl->poly->is_hermitian();
  }
  return Symbol(std::move(impl));
}

Matrix Symbol::eval(const PhasePoint& z) const {
  require(z.dim() == impl_->n, ErrorKind::Parameter,
          "symbol '" + impl_->label + "' expects phase points of dimension " + std::to_string(impl_->n));
  if (impl_->poly) return impl_->poly->eval(z);
  Matrix m;
  try {
    m = impl_->eval(z);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Evaluation) throw;
    fail(ErrorKind::Evaluation, "symbol '" + impl_->label + "' failed at z=" + point_str(z) + ": " + e.what());
  } catch (const std::exception& e) {
    fail(ErrorKind::Evaluation, "symbol '" + impl_->label + "' failed at z=" + point_str(z) + ": " + e.what());
  }
  if (m.rows() != impl_->d || m.cols() != impl_->d)
    fail(ErrorKind::Evaluation, "symbol '" + impl_->label + "' returned a matrix of the wrong size at z=" + point_str(z));
  if (!m.allFinite())
    fail(ErrorKind::Evaluation, "symbol '" + impl_->label + "' returned a non-finite value at z=" + point_str(z));
  return m;
}

std::vector<Matrix> Symbol::real_gradient(const PhasePoint& z) const {
  require(has_gradient(), ErrorKind::UnsupportedVariant, "symbol '" + impl_->label + "' has no closed-form gradient");
  return impl_->gradient(z);
}

Symbol Symbol::with_hermitian(bool h) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->hermitian = h;
  return Symbol(std::move(impl));
}

Symbol Symbol::with_label(std::string label) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->label = std::move(label);
  return Symbol(std::move(impl));
}

namespace builtin {
Symbol abs_squared(int n) { return Symbol::from_builtin(BuiltInName::AbsSquared, {}, n); }
Symbol re_z_cubed(int n) { return Symbol::from_builtin(BuiltInName::ReZCubed, {}, n); }
Symbol relativistic_kinetic(double m, double v, int n) {
  return Symbol::from_builtin(BuiltInName::RelativisticKinetic, {m, v}, n);
}
Symbol shift_interaction(double alpha, double gamma, int d) {
  return Symbol::from_builtin(BuiltInName::ShiftInteraction, {alpha, gamma, static_cast<double>(d)}, 1);
}
Symbol sine_re(int n) { return Symbol::from_builtin(BuiltInName::SineRe, {}, n); }
}  // namespace builtin

// ------------------------------------------------------------- sampling, fits

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

std::vector<PhasePoint> phase_grid(int n, double radius, int count) {
  require(radius > 0.0 && count >= 1, ErrorKind::Parameter, "phase grid needs R > 0 and count >= 1");
  std::vector<PhasePoint> pts;
  if (n == 1) {
    const int rings = std::max(1, static_cast<int>(std::lround(std::sqrt(count / 4.0))));
    const int angles = std::max(4, count / rings);
    pts.push_back(PhasePoint{cplx{0.0, 0.0}});
    for (int k = 1; k <= rings; ++k) {
      const double r = radius * k / rings;
      for (int l = 0; l < angles; ++l) {
        const double th = 2.0 * M_PI * (l + 0.5 * (k % 2)) / angles;
        pts.push_back(PhasePoint{std::polar(r, th)});
      }
    }
    return pts;
  }
  std::mt19937_64 rng(0x5eedULL + static_cast<unsigned>(n));
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  pts.push_back(PhasePoint(n));
  for (int i = 0; i < count; ++i) {
    std::vector<double> x(2 * static_cast<size_t>(n));
    double norm = 0.0;
    for (auto& v : x) {
      v = gauss(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    // every fourth point sits on the sphere |z| = R
    const double r = (i % 4 == 0) ? radius : radius * std::pow(unif(rng), 1.0 / (2.0 * n));
    PhasePoint p(n);
    for (int j = 0; j < n; ++j) p[j] = cplx{x[j], x[j + n]} * (r / norm);
    pts.push_back(p);
  }
  return pts;
}

double sup_norm_estimate(const Symbol& f, double radius, int count) {
  double sup = 0.0;
  for (const auto& z : phase_grid(f.n(), radius, count)) sup = std::max(sup, spectral_norm(f.eval(z)));
  return sup;
}

PolyBound poly_bound_fit(const Symbol& f, double radius, int samples) {
  require(radius > 0.0, ErrorKind::Parameter, "poly_bound_fit needs R > 0");
  // Nested sample sets keep c_N monotone in the radius. The comparison is
  // 2R against 4R since R is often pre-asymptotic (e.g. xi^2 cos x).
  std::vector<std::pair<double, double>> a, b;  // (|z|, ||f(z)||)
  for (double r : {radius, 2.0 * radius})
    for (const auto& z : phase_grid(f.n(), r, samples)) a.emplace_back(z.norm(), spectral_norm(f.eval(z)));
  b = a;
  for (const auto& z : phase_grid(f.n(), 4.0 * radius, samples)) b.emplace_back(z.norm(), spectral_norm(f.eval(z)));
  auto constant = [](const auto& vals, int N) {
    double c = 0.0;
    for (const auto& [r, v] : vals) c = std::max(c, v / (1.0 + std::pow(r, N)));
    return c;
  };
  double last = 0.0;
  for (int N = 0; N <= 12; ++N) {
    const double ci = constant(a, N);
    const double co = constant(b, N);
    last = co;
    const double hi = std::max(ci, co);
    if (hi == 0.0 || std::abs(co - ci) <= 0.1 * hi) return {N, hi};
  }
  fail(ErrorKind::GrowthExceedsPolynomial, "symbol '" + f.label() + "' grows faster than |z|^12 on the sample grid (c_12 = " +
                                               std::to_string(last) + ")");
}

// --------------------------------------------------------------- heat kernels

namespace {

Matrix heat_at(const Symbol& f, double s, int nodes, const PhasePoint& z) {
  const int n = f.n();
  return quad::gaussian_expectation(2 * n, nodes, z.to_real(), std::sqrt(s), [&](const std::vector<double>& x) {
    return f.eval(PhasePoint::from_real({x.begin(), x.begin() + n}, {x.begin() + n, x.end()}));
  });
}

}  // namespace

Symbol heat_transform(const Symbol& f, const HeatParams& hp) {
  require(hp.s >= 0.0, ErrorKind::Parameter, "heat time s must be >= 0, got " + std::to_string(hp.s));
  if (hp.s == 0.0) return f;
  if (const Polynomial* p = f.as_polynomial()) {
    Polynomial h = p->heat(hp.s);
    h.prune();
    return Symbol::polynomial(std::move(h), "heat(" + f.label() + ")");
  }
  poly_bound_fit(f, 4.0, 200);

  const int n = f.n();
  const double s = hp.s;
  const std::vector<PhasePoint> probes = [&] {
    std::vector<PhasePoint> v{PhasePoint(n), PhasePoint(n), PhasePoint(n)};
    for (int j = 0; j < n; ++j) {
      v[1][j] = cplx{0.7, -0.4};
      v[2][j] = std::polar(2.0 / std::sqrt(static_cast<double>(n)), 1.1);
    }
    return v;
  }();
  const int d = f.d();
  auto stacked = [&](int nodes) {
    Matrix m(d * static_cast<int>(probes.size()), d);
    for (size_t i = 0; i < probes.size(); ++i) m.block(static_cast<int>(i) * d, 0, d, d) = heat_at(f, s, nodes, probes[i]);
    return m;
  };
  const int cap = quad::tensor_node_cap(2 * n);
  const auto conv = quad::converge_nodes(std::min(hp.nodes, cap / 2), cap, hp.tolerance, stacked, "heat transform");
  // the last change bounds the error of the coarser rule, which is cheaper
  const int nodes = conv.nodes / 2;

  Gradient grad;
  if (f.has_gradient()) {
    grad = [f, s, nodes, n](const PhasePoint& z) {
      const int d = f.d();
      const Matrix stackedg = quad::gaussian_expectation(
          2 * n, nodes, z.to_real(), std::sqrt(s), [&](const std::vector<double>& x) {
            const auto g = f.real_gradient(PhasePoint::from_real({x.begin(), x.begin() + n}, {x.begin() + n, x.end()}));
            Matrix m(d * static_cast<int>(g.size()), d);
            for (size_t k = 0; k < g.size(); ++k) m.block(static_cast<int>(k) * d, 0, d, d) = g[k];
            return m;
          });
      std::vector<Matrix> out(2 * static_cast<size_t>(n));
      for (size_t k = 0; k < out.size(); ++k) out[k] = stackedg.block(static_cast<int>(k) * d, 0, d, d);
      return out;
    };
  }
  std::ostringstream label;
  label << "heat(" << f.label() << ", s=" << s << ")";
  return Symbol::callable(
      n, d, [f, s, nodes](const PhasePoint& z) { return heat_at(f, s, nodes, z); }, false, label.str(),
      std::move(grad))
      .with_hermitian(f.hermitian());
}

Matrix off_diagonal_heat(const Symbol& f, double tau, const PhasePoint& z, const PhasePoint& w, int start_nodes,
                         double tol) {
  require(tau > 0.0, ErrorKind::Parameter, "off-diagonal heat transform needs tau > 0");
  const int n = f.n();
  require(z.dim() == n && w.dim() == n, ErrorKind::Parameter, "phase point dimension mismatch");
  const PhasePoint diff = z - w;
  const PhasePoint centre = (z + w) * cplx{0.5, 0.0};
  const double envelope = std::exp(-diff.norm2() / (8.0 * tau));
  const PhasePoint dbar = diff.conj();
  auto compute = [&](int nodes) {
    return quad::gaussian_expectation(2 * n, nodes, centre.to_real(), std::sqrt(tau), [&](const std::vector<double>& x) {
      const PhasePoint u = PhasePoint::from_real({x.begin(), x.begin() + n}, {x.begin() + n, x.end()});
      const double phase = std::imag(dot(dbar, u)) / (2.0 * tau);
      return Matrix(std::polar(1.0, phase) * f.eval(u));
    });
  };
  const int cap = quad::tensor_node_cap(2 * n);
  return envelope * quad::converge_nodes(std::min(start_nodes, cap / 2), cap, tol, compute, "off-diagonal heat transform").value;
}

SemigroupResidual semigroup_identity_check(const Symbol& f, double t, double s, const PhasePoint& z,
                                           const PhasePoint& w) {
  require(t > 0.0 && s > 0.0 && s < t, ErrorKind::Parameter, "semigroup check needs 0 < s < t");
  SemigroupResidual r;
  r.left = off_diagonal_heat(f, t, w, z);
  const Symbol fs = heat_transform(f, HeatParams{s});
  const double denom = t * (t - s);
  const cplx factor = std::exp(cplx{s * (w - z).norm2() / (4.0 * denom), -s * std::imag(dot(z, w.conj())) / (2.0 * denom)});
  r.right = factor * off_diagonal_heat(fs, t - s, w, z);
  r.residual = spectral_norm(r.left - r.right);
  return r;
}

Symbol symbol_derivative(const Symbol& f, int j, bool conjugate) {
  const Polynomial* p = f.as_polynomial();
  require(p != nullptr, ErrorKind::UnsupportedVariant, "symbol derivatives are exact only for polynomial symbols");
  Polynomial dp = p->derivative(j, conjugate);
  dp.prune();
  return Symbol::polynomial(std::move(dp), std::string(conjugate ? "dbar" : "d") + std::to_string(j) + "(" + f.label() + ")");
}

}  // namespace btq
