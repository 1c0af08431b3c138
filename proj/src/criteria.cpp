#include "btq/criteria.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "btq/parallel.hpp"
#include "btq/quadrature.hpp"

namespace btq {

namespace {

std::vector<PhasePoint> unit_probes(int n) {
  std::vector<PhasePoint> dirs;
  if (n == 1) {
    for (int k = 0; k < 16; ++k) dirs.push_back(PhasePoint{std::polar(1.0, 2.0 * std::numbers::pi * k / 16)});
  } else {
    std::mt19937_64 rng(0x0dd5eedULL);
    std::normal_distribution<double> g;
    for (int k = 0; k < 16; ++k) {
      PhasePoint p(n);
      for (int j = 0; j < n; ++j) p[j] = cplx{g(rng), g(rng)};
      dirs.push_back(p * cplx{1.0 / p.norm(), 0.0});
    }
  }
  std::vector<PhasePoint> probes;
  for (double r : {0.5, 1.0})
    for (const auto& d : dirs) probes.push_back(d * cplx{r, 0.0});
  return probes;
}

double probe_statistic(const Symbol& g, const std::vector<PhasePoint>& centres, const std::vector<PhasePoint>& probes) {
  std::vector<double> per(centres.size(), 0.0);
  parallel_for(0, static_cast<int>(centres.size()), [&](int i) {
    const Matrix base = g.eval(centres[i]);
    double m = 0.0;
    for (const auto& w : probes) m = std::max(m, spectral_norm(g.eval(centres[i] + w) - base));
    per[i] = m;
  });
  return per.empty() ? 0.0 : *std::max_element(per.begin(), per.end());
}

bool relatively_stable(double a, double b, double rel = 0.1) {
  const double hi = std::max(std::abs(a), std::abs(b));
  return hi < 1e-12 || std::abs(a - b) <= rel * hi;
}

Matrix wirtinger(const std::vector<Matrix>& grad, int n, int j, bool conjugate) {
  const cplx i{0.0, 1.0};
  return 0.5 * (grad[j] + (conjugate ? i : -i) * grad[j + n]);
}

class GradientCache {
 public:
  std::vector<Matrix> get(const PhasePoint& z, const std::function<std::vector<Matrix>(const PhasePoint&)>& fn) {
    const std::vector<double> key = z.to_real();
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (auto it = map_.find(key); it != map_.end()) return it->second;
    }
    auto g = fn(z);
    std::lock_guard<std::mutex> lock(mu_);
    return map_.emplace(key, std::move(g)).first->second;
  }

 private:
  std::mutex mu_;
  std::map<std::vector<double>, std::vector<Matrix>> map_;
};

std::string coord_name(int j, bool conjugate) {
  return std::string(conjugate ? "d/dzbar_" : "d/dz_") + std::to_string(j + 1);
}

}  // namespace

OscillationReport oscillation_estimate(const Symbol& g, double radius, int resolution) {
  require(radius >= 2.0, ErrorKind::Parameter, "oscillation estimate needs R >= 2");
  require(resolution >= 16, ErrorKind::Parameter, "oscillation estimate needs at least 16 centres");
  const auto probes = unit_probes(g.n());
  const auto coarse = phase_grid(g.n(), radius, resolution);
  const auto fine = phase_grid(g.n(), 2.0 * radius, 4 * resolution);
  OscillationReport r;
  r.radius = radius;
  r.centres = static_cast<int>(coarse.size());
  r.probes = static_cast<int>(probes.size());
  r.sup_statistic = probe_statistic(g, coarse, probes);
  r.refined_statistic = probe_statistic(g, fine, probes);

  std::vector<Matrix> vals(coarse.size());
  parallel_for(0, static_cast<int>(coarse.size()), [&](int i) { vals[i] = g.eval(coarse[i]); });
  double lc = 0.0;
  for (size_t a = 0; a < coarse.size(); ++a)
    for (size_t b = a + 1; b < coarse.size(); ++b)
      lc = std::max(lc, spectral_norm(vals[a] - vals[b]) / (1.0 + (coarse[a] - coarse[b]).norm()));
  r.linear_constant = lc;

  r.stable = relatively_stable(r.sup_statistic, r.refined_statistic);
  r.verdict = std::isfinite(r.sup_statistic) && std::isfinite(r.refined_statistic) && r.stable;
  return r;
}

HypothesisReport main_theorem_hypothesis_check(const Symbol& f, double s, const QuantizationContext& ctx, double radius,
                                               int resolution) {
  ctx.validate();
  if (!(s >= 0.0 && s < ctx.t / 2.0)) {
    std::ostringstream os;
    os << "the hypothesis needs a heat time s in [0, t/2) = [0, " << ctx.t / 2.0 << "), got s = " << s;
    fail(ErrorKind::Parameter, os.str());
  }
  require(f.n() == ctx.n, ErrorKind::Parameter, "symbol dimension does not match the context");
  require(f.hermitian(), ErrorKind::Parameter, "the hypothesis check needs a hermitian symbol");

  HypothesisReport rep;
  rep.s = s;
  rep.growth = poly_bound_fit(f, radius);
  const Symbol fs = heat_transform(f, HeatParams{s});
  const int n = f.n();
  const int d = f.d();

  std::vector<std::pair<std::string, Symbol>> derivs;
  if (fs.as_polynomial()) {
    rep.derivative_method = "closed-form";
    for (int j = 0; j < n; ++j)
      for (bool c : {false, true}) derivs.emplace_back(coord_name(j, c), symbol_derivative(fs, j, c));
  } else {
    using Grad = std::function<std::vector<Matrix>(const PhasePoint&)>;
    Grad raw;
    if (fs.has_gradient()) {
      rep.derivative_method = "gradient";
      raw = [fs](const PhasePoint& z) { return fs.real_gradient(z); };
    } else {
      rep.derivative_method = "finite-difference";
      raw = [fs, n](const PhasePoint& z) {
        std::vector<Matrix> grad(2 * static_cast<size_t>(n));
        for (int k = 0; k < 2 * n; ++k) {
          const bool imag = k >= n;
          const int jj = imag ? k - n : k;
          const double comp = imag ? z[jj].imag() : z[jj].real();
          const double h = 1e-4 * std::max(1.0, std::abs(comp));
          PhasePoint plus = z, minus = z;
          plus[jj] += imag ? cplx{0.0, h} : cplx{h, 0.0};
          minus[jj] -= imag ? cplx{0.0, h} : cplx{h, 0.0};
          grad[k] = (fs.eval(plus) - fs.eval(minus)) / (2.0 * h);
        }
        return grad;
      };
    }
    // the 2n derivatives share one gradient evaluation per point
    auto cache = std::make_shared<GradientCache>();
    for (int j = 0; j < n; ++j)
      for (bool c : {false, true})
        derivs.emplace_back(coord_name(j, c), Symbol::callable(n, d, [raw, cache, n, j, c](const PhasePoint& z) {
          return wirtinger(cache->get(z, raw), n, j, c);
        }, false, coord_name(j, c) + "(" + fs.label() + ")"));
  }
  rep.verdict = true;
  for (const auto& [name, g] : derivs) {
    DerivativeReport dr{name, oscillation_estimate(g, radius, resolution)};
    rep.verdict = rep.verdict && dr.oscillation.verdict;
    rep.derivatives.push_back(std::move(dr));
  }
  rep.note = "grid evidence for bounded oscillation of the first derivatives; domain characterization is not checked";
  return rep;
}

double bc_constant(double s, double t, int n) {
  require(t > 0.0 && n >= 1, ErrorKind::Parameter, "bc_constant needs t > 0 and n >= 1");
  if (!(s > 0.0 && s < t / 2.0)) {
    std::ostringstream os;
    os << "bc_constant needs s in (0, t/2) = (0, " << t / 2.0 << "), got s = " << s;
    fail(ErrorKind::Parameter, os.str());
  }
  // (2 t eps)^{-1} simplifies to 4(t - s)/(t - 2s)
  return std::pow(4.0 * (t - s) / (t - 2.0 * s), n);
}

namespace {

double stable_sup(const Symbol& g, double radius, const char* what) {
  const double a = sup_norm_estimate(g, radius);
  const double b = sup_norm_estimate(g, 2.0 * radius);
  if (!std::isfinite(a) || !std::isfinite(b) || !relatively_stable(a, b))
    fail(ErrorKind::Accuracy, std::string(what) + ": grid sup-norm estimate is not stable under radius doubling (" +
                                  std::to_string(a) + " vs " + std::to_string(b) + ")");
  return std::max(a, b);
}

void check_admissible(double s, const TruncationSpec& spec) {
  if (!(s > 0.0 && s < spec.t() / 2.0)) {
    std::ostringstream os;
    os << "the Berger-Coburn estimate needs s in (0, t/2) = (0, " << spec.t() / 2.0 << "), got s = " << s;
    fail(ErrorKind::Parameter, os.str());
  }
}

Symbol difference(const Symbol& a, const Symbol& b) {
  if (a.as_polynomial() && b.as_polynomial()) {
    Polynomial p = *a.as_polynomial() - *b.as_polynomial();
    p.prune();
    return Symbol::polynomial(std::move(p), a.label() + " - " + b.label());
  }
  return Symbol::callable(a.n(), a.d(), [a, b](const PhasePoint& z) { return Matrix(a.eval(z) - b.eval(z)); },
                          false, a.label() + " - " + b.label())
      .with_hermitian(a.hermitian() && b.hermitian());
}

}  // namespace

InequalityReport bc_verify(const Symbol& f, double s, const TruncationSpec& spec, double radius) {
  check_admissible(s, spec);
  InequalityReport r;
  r.constant = bc_constant(s, spec.t(), spec.n());
  r.sup = stable_sup(heat_transform(f, HeatParams{s}), radius, "bc_verify");
  r.lhs = operator_norm(assemble_toeplitz(f, spec));
  r.rhs = r.constant * r.sup;
  r.slack = r.rhs - r.lhs;
  r.holds = r.lhs <= r.rhs;
  return r;
}

InequalityReport perturbation_bound_check(const Symbol& f, double s, const TruncationSpec& spec, double radius) {
  check_admissible(s, spec);
  InequalityReport r;
  r.constant = bc_constant(s, spec.t(), spec.n());
  const Symbol fs = heat_transform(f, HeatParams{s});
  const Symbol f2s = heat_transform(f, HeatParams{2.0 * s});
  r.sup = stable_sup(difference(fs, f2s), radius, "perturbation_bound_check");
  const Matrix diff = assemble_toeplitz(f, spec).matrix() - assemble_toeplitz(fs, spec).matrix();
  r.lhs = operator_norm(TruncatedOperator(spec, diff, f.hermitian()));
  r.rhs = r.constant * r.sup;
  r.slack = r.rhs - r.lhs;
  r.holds = r.lhs <= r.rhs;
  return r;
}

TaylorReport taylor_remainder_check(const Symbol& F, const std::vector<double>& x, double radius) {
  const int n = F.n();
  require(static_cast<int>(x.size()) == 2 * n, ErrorKind::Parameter, "Taylor step must be a real 2n-vector");
  require(F.has_gradient(), ErrorKind::UnsupportedVariant, "Taylor remainder check needs a closed-form gradient");
  const PhasePoint step = PhasePoint::from_real({x.begin(), x.begin() + n}, {x.begin() + n, x.end()});
  double xnorm = 0.0;
  for (double v : x) xnorm += v * v;
  xnorm = std::sqrt(xnorm);

  TaylorReport r;
  for (const auto& y : phase_grid(n, radius, 256)) {
    const auto grad = F.real_gradient(y);
    Matrix rem = F.eval(y + step) - F.eval(y);
    for (int k = 0; k < 2 * n; ++k) rem -= x[k] * grad[k];
    r.sup_remainder = std::max(r.sup_remainder, spectral_norm(rem));
  }
  double c2 = 0.0;
  for (int k = 0; k < 2 * n; ++k) {
    const Symbol partial = Symbol::callable(n, F.d(), [F, k](const PhasePoint& z) { return F.real_gradient(z)[k]; },
                                            false, "partial");
    const double c = oscillation_estimate(partial, std::max(2.0, radius), 64).linear_constant;
    c2 += c * c;
  }
  r.constant = std::sqrt(c2);
  r.bound = r.constant * (xnorm + xnorm * xnorm);
  r.holds = r.sup_remainder <= r.bound * (1.0 + 1e-12) + 1e-12;
  return r;
}

double growth_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::Parameter, "growth fit needs at least two points");
  if (*std::max_element(y.begin(), y.end()) < 1e-12) return 0.0;
  const size_t start = x.size() / 2;
  std::vector<double> lx, ly;
  for (size_t i = start; i < x.size(); ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  if (lx.size() < 2) return 0.0;
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

CommutatorDiagnostics commutator_diagnostics(const Symbol& f, const QuantizationContext& ctx, const std::vector<int>& cutoffs,
                                             int random_probes, std::uint64_t seed) {
  require(!cutoffs.empty(), ErrorKind::Parameter, "commutator diagnostics need at least one cutoff");
  require(std::is_sorted(cutoffs.begin(), cutoffs.end()) &&
              std::adjacent_find(cutoffs.begin(), cutoffs.end()) == cutoffs.end() && cutoffs.front() >= 1,
          ErrorKind::Parameter, "cutoffs must be positive and strictly increasing");
  QuantizationContext c = ctx;
  c.d = f.d();
  const int margin = f.as_polynomial() ? f.as_polynomial()->degree() : 16;
  CommutatorDiagnostics out;
  out.assembly_cutoff = cutoffs.back() + margin;
  const TruncationSpec big(c, out.assembly_cutoff);
  const Matrix a = assemble_toeplitz(f, big).matrix();
  const Matrix nm = harmonic_oscillator(big).matrix();
  const Eigen::VectorXd ndiag = nm.diagonal().real();
  const int d = c.d;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (int m : cutoffs) {
    const int support = big.degree_start(m + 1) * d;
    auto ratios = [&](const Vector& v) {
      const Vector av = a * v;
      const Vector nv = ndiag.cast<cplx>().cwiseProduct(v);
      const double c1 = av.norm() / nv.norm();
      const double c2 = std::abs(nv.dot(av) - av.dot(nv)) / std::abs(nv.dot(v));
      return std::pair{c1, c2};
    };
    CommutatorRow row{m, 0.0, 0.0};
    for (int i = 0; i < support; ++i) {
      // basis probe e_i: A e_i is column i and <N e_i, e_i> = N_ii
      row.c1 = std::max(row.c1, a.col(i).norm() / ndiag[i]);
      row.c2 = std::max(row.c2, 2.0 * std::abs(a(i, i).imag()));
    }
    for (int k = 0; k < random_probes; ++k) {
      Vector v = Vector::Zero(big.dim());
      for (int i = 0; i < support; ++i) v[i] = cplx{g(rng), g(rng)};
      v.normalize();
      const auto [c1, c2] = ratios(v);
      row.c1 = std::max(row.c1, c1);
      row.c2 = std::max(row.c2, c2);
    }
    out.rows.push_back(row);
  }
  std::vector<double> ms, c1s, c2s;
  for (const auto& r : out.rows) {
    ms.push_back(r.cutoff);
    c1s.push_back(r.c1);
    c2s.push_back(r.c2);
  }
  if (ms.size() >= 2) {
    out.c1_exponent = growth_exponent(ms, c1s);
    out.c2_exponent = growth_exponent(ms, c2s);
  }
  return out;
}

Symbol theta_derivative(const Symbol& f) {
  if (const Polynomial* p = f.as_polynomial()) {
    Polynomial dp = p->theta_derivative();
    dp.prune();
    return Symbol::polynomial(std::move(dp), "dtheta(" + f.label() + ")");
  }
  const int n = f.n();
  if (f.has_gradient()) {
    // d/dtheta (x + i xi) e^{i theta} = -xi + i x
    return Symbol::callable(n, f.d(), [f, n](const PhasePoint& z) {
      const auto g = f.real_gradient(z);
      Matrix acc = Matrix::Zero(f.d(), f.d());
      for (int j = 0; j < n; ++j) acc += -z[j].imag() * g[j] + z[j].real() * g[j + n];
      return acc;
    }, false, "dtheta(" + f.label() + ")");
  }
  return Symbol::callable(n, f.d(), [f](const PhasePoint& z) {
    const double h = 1e-4;
    return Matrix((f.eval(z * std::polar(1.0, h)) - f.eval(z * std::polar(1.0, -h))) / (2.0 * h));
  }, false, "dtheta(" + f.label() + ")");
}

ThetaReport theta_derivative_bound(const Symbol& f, double radius) {
  ThetaReport r;
  r.symbol_growth = poly_bound_fit(f, radius);
  r.theta_growth = poly_bound_fit(theta_derivative(f), radius);
  r.verdict = r.symbol_growth.degree <= 2 && r.theta_growth.degree <= 2;
  return r;
}

}  // namespace btq
