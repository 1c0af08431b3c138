#include "btq/fockbasis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace btq {

MultiIndex::MultiIndex(std::initializer_list<int> e) : entries_(e) {}
MultiIndex::MultiIndex(std::vector<int> e) : entries_(std::move(e)) {}

int MultiIndex::degree() const {
  int s = 0;
  for (int v : entries_) s += v;
  return s;
}

double MultiIndex::log_factorial() const {
  double s = 0.0;
  for (int v : entries_) s += std::lgamma(v + 1.0);
  return s;
}

bool MultiIndex::valid() const {
  return std::all_of(entries_.begin(), entries_.end(), [](int v) { return v >= 0; });
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  require(size() == o.size(), ErrorKind::Parameter, "multi-index length mismatch");
  MultiIndex r(*this);
  for (size_t j = 0; j < entries_.size(); ++j) r.entries_[j] += o.entries_[j];
  return r;
}

MultiIndex MultiIndex::operator-(const MultiIndex& o) const {
  require(size() == o.size(), ErrorKind::Parameter, "multi-index length mismatch");
  MultiIndex r(*this);
  for (size_t j = 0; j < entries_.size(); ++j) r.entries_[j] -= o.entries_[j];
  return r;
}

MultiIndex MultiIndex::with(int j, int value) const {
  MultiIndex r(*this);
  r.entries_[static_cast<size_t>(j)] = value;
  return r;
}

MultiIndex MultiIndex::unit(int n, int j) { return MultiIndex(n).with(j, 1); }

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << '(';
  for (size_t j = 0; j < entries_.size(); ++j) os << (j ? "," : "") << entries_[j];
  os << ')';
  return os.str();
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

namespace {

void fill_degree(int n, int pos, int remaining, std::vector<int>& cur, std::vector<MultiIndex>& out) {
  if (pos == n - 1) {
    cur[static_cast<size_t>(pos)] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur[static_cast<size_t>(pos)] = v;
    fill_degree(n, pos + 1, remaining - v, cur, out);
  }
}

}  // namespace

TruncationSpec::TruncationSpec(QuantizationContext ctx, int cutoff) {
  ctx.validate();
  require(cutoff >= 0, ErrorKind::Parameter, "cutoff M must be >= 0");
  require(ctx.n <= 4, ErrorKind::Parameter, "phase-space dimension n > 4 is not supported");
  auto impl = std::make_shared<Impl>();
  impl->ctx = ctx;
  impl->cutoff = cutoff;
  std::vector<int> cur(static_cast<size_t>(ctx.n), 0);
  for (int k = 0; k <= cutoff; ++k) {
    impl->block_start.push_back(static_cast<int>(impl->order.size()));
    fill_degree(ctx.n, 0, k, cur, impl->order);
  }
  impl->block_start.push_back(static_cast<int>(impl->order.size()));
  for (size_t i = 0; i < impl->order.size(); ++i) impl->lookup.emplace(impl->order[i], static_cast<int>(i));
  impl_ = std::move(impl);
}

std::optional<int> TruncationSpec::position(const MultiIndex& nu) const {
  auto it = impl_->lookup.find(nu);
  if (it == impl_->lookup.end()) return std::nullopt;
  return it->second;
}

int TruncationSpec::degree_start(int k) const {
  if (k <= 0) return 0;
  if (k > cutoff()) return size();
  return impl_->block_start[static_cast<size_t>(k)];
}

TruncationSpec TruncationSpec::with_cutoff(int cutoff) const { return TruncationSpec(ctx(), cutoff); }

TruncationSpec TruncationSpec::with_internal_dim(int d) const {
  QuantizationContext c = ctx();
  c.d = d;
  return TruncationSpec(c, cutoff());
}

bool TruncationSpec::same_basis(const TruncationSpec& o) const {
  return n() == o.n() && t() == o.t() && d() == o.d() && cutoff() == o.cutoff();
}

std::vector<MultiIndex> enumerate_basis(const TruncationSpec& spec) { return spec.order(); }

double monomial_log_norm(double t, const MultiIndex& nu) {
  return 0.5 * (nu.log_factorial() + nu.degree() * std::log(2.0 * t));
}

namespace {

constexpr int kLogSpaceDegree = 150;

// z^nu * exp(shift - lognorm), log-space above kLogSpaceDegree
cplx scaled_power(const std::vector<cplx>& z, const MultiIndex& nu, double log_scale) {
  if (nu.degree() <= kLogSpaceDegree) {
    cplx p{1.0, 0.0};
    for (int j = 0; j < nu.size(); ++j)
      for (int k = 0; k < nu[j]; ++k) p *= z[static_cast<size_t>(j)];
    return p * std::exp(log_scale);
  }
  cplx lg{log_scale, 0.0};
  for (int j = 0; j < nu.size(); ++j) {
    if (nu[j] == 0) continue;
    if (z[static_cast<size_t>(j)] == cplx{0.0, 0.0}) return {0.0, 0.0};
    lg += static_cast<double>(nu[j]) * std::log(z[static_cast<size_t>(j)]);
  }
  return std::exp(lg);
}

}  // namespace

cplx monomial_eval(const QuantizationContext& ctx, const MultiIndex& nu, const PhasePoint& z) {
  require(nu.size() == z.dim(), ErrorKind::Parameter, "multi-index and phase point dimensions differ");
  return scaled_power(z.coords(), nu, -monomial_log_norm(ctx.t, nu));
}

CoefficientVector coherent_coefficients(const TruncationSpec& spec, const PhasePoint& w) {
  require(w.dim() == spec.n(), ErrorKind::Parameter, "coherent state center has wrong dimension");
  const double t = spec.t();
  const double shift = -w.norm2() / (4.0 * t);
  const auto wc = w.conj().coords();
  CoefficientVector cv;
  cv.coeffs.resize(spec.size());
  for (int i = 0; i < spec.size(); ++i) {
    const MultiIndex& nu = spec.index(i);
    cv.coeffs[i] = scaled_power(wc, nu, shift - monomial_log_norm(t, nu));
  }
  // mass beyond the cutoff: P(Poisson(lambda) > M), lambda = |w|^2/2t
  const double lambda = w.norm2() / (2.0 * t);
  double tail = 0.0;
  if (lambda > 0.0) {
    for (int m = spec.cutoff() + 1;; ++m) {
      const double term = std::exp(-lambda + m * std::log(lambda) - std::lgamma(m + 1.0));
      tail += term;
      if (m > lambda && term <= 1e-18 * tail) break;
      if (m > spec.cutoff() + 100000) break;
    }
  }
  cv.tail_mass = tail;
  return cv;
}

cplx evaluate_series(const TruncationSpec& spec, const Vector& coeffs, const PhasePoint& z) {
  require(coeffs.size() == spec.size(), ErrorKind::Parameter, "coefficient vector length mismatch");
  cplx s{0.0, 0.0};
  for (int i = 0; i < spec.size(); ++i)
    if (coeffs[i] != cplx{0.0, 0.0}) s += coeffs[i] * monomial_eval(spec.ctx(), spec.index(i), z);
  return s;
}

BargmannHermite bargmann_hermite_check(const QuantizationContext& ctx, int nu, const std::vector<double>& x) {
  require(ctx.n == 1 && x.size() == 1, ErrorKind::Parameter, "Bargmann-Hermite check is defined for n = 1");
  require(nu >= 0, ErrorKind::Parameter, "Hermite index must be >= 0");
  const double y = x[0] / std::sqrt(ctx.t);
  const double scale = std::pow(ctx.t, -0.25);

  const double log_norm = 0.5 * (nu * std::log(2.0) + std::lgamma(nu + 1.0) + 0.5 * std::log(std::numbers::pi));
  const double closed = std::hermite(static_cast<unsigned>(nu), y) * std::exp(-0.5 * y * y - log_norm);

  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * y * y);
  for (int k = 0; k < nu; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * y * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return {scale * closed, scale * cur};
}

const char* to_string(DecayVerdict v) {
  switch (v) {
    case DecayVerdict::FiniteSupport: return "finite_support";
    case DecayVerdict::SuperPolynomial: return "super_polynomial";
    case DecayVerdict::PolynomialOrSlower: return "polynomial_or_slower";
  }
  return "unknown";
}

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

}  // namespace

DecayReport decay_diagnostic(const TruncationSpec& spec, const Vector& coeffs) {
  require(coeffs.size() >= 8, ErrorKind::Parameter, "decay diagnostic needs at least 8 coefficients");
  require(coeffs.size() % spec.size() == 0, ErrorKind::Parameter, "coefficient vector length mismatch");
  const int inner = static_cast<int>(coeffs.size()) / spec.size();
  const int M = spec.cutoff();
  std::vector<double> per_degree(static_cast<size_t>(M + 1), 0.0);
  for (int i = 0; i < spec.size(); ++i) {
    const int k = spec.index(i).degree();
    for (int a = 0; a < inner; ++a)
      per_degree[static_cast<size_t>(k)] = std::max(per_degree[static_cast<size_t>(k)], std::abs(coeffs[i * inner + a]));
  }
  int last = -1;
  for (int k = 0; k <= M; ++k)
    if (per_degree[static_cast<size_t>(k)] > 0.0) last = k;
  require(last >= 0, ErrorKind::DegenerateInput, "decay diagnostic on an all-zero vector");

  DecayReport r;
  r.last_nonzero_degree = last;
  if (last < M) {
    r.verdict = DecayVerdict::FiniteSupport;
    return r;
  }

  std::vector<int> tail;
  for (int k = std::max(1, M / 2); k <= M; ++k)
    if (per_degree[static_cast<size_t>(k)] > 0.0) tail.push_back(k);
  if (tail.size() < 4) {
    tail.clear();
    for (int k = 0; k <= M; ++k)
      if (per_degree[static_cast<size_t>(k)] > 0.0) tail.push_back(k);
  }
  auto slopes = [&](size_t lo, size_t hi) {
    std::vector<double> lx, ky, ly;
    for (size_t i = lo; i < hi; ++i) {
      const int k = tail[i];
      lx.push_back(std::log(1.0 + k));
      ky.push_back(static_cast<double>(k));
      ly.push_back(std::log(per_degree[static_cast<size_t>(k)]));
    }
    return std::pair{fit_slope(lx, ly), fit_slope(ky, ly)};
  };
  const auto [s_all, e_all] = slopes(0, tail.size());
  r.loglog_slope = s_all;
  r.exponential_slope = e_all;
  const size_t half = tail.size() / 2;
  const double s_first = slopes(0, half + 1).first;
  const double s_second = slopes(half, tail.size()).first;

  for (int p : {1, 2, 4, 8})
    if (s_second + p < 0.0) r.rates_beaten.push_back(p);
  const bool beats_all = r.rates_beaten.size() == 4;
  const bool steepening = s_second < -1.0 && s_second < s_first - 1.0;
  r.verdict = (beats_all || steepening) ? DecayVerdict::SuperPolynomial : DecayVerdict::PolynomialOrSlower;
  return r;
}

}  // namespace btq
