#include "btq/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "btq/parallel.hpp"

namespace btq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using State = std::vector<double>;  // (x_1..x_n, xi_1..xi_n)

double norm_of(const State& y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  return std::sqrt(s);
}

State axpy(const State& y, double h, const State& k) {
  State out(y.size());
  for (size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h * k[i];
  return out;
}

ClassicalState to_classical(const State& y) {
  const size_t n = y.size() / 2;
  return {State(y.begin(), y.begin() + static_cast<long>(n)), State(y.begin() + static_cast<long>(n), y.end())};
}

std::string state_str(double tau, const State& y) {
  std::ostringstream os;
  os.precision(6);
  os << "tau = " << tau << ", state = (";
  for (size_t i = 0; i < y.size(); ++i) os << (i ? ", " : "") << y[i];
  os << ")";
  return os.str();
}

class Field {
 public:
  Field(const Symbol& f, FlowDirection dir) : f_(f), sign_(dir == FlowDirection::Paper ? 1.0 : -1.0) {}

  State operator()(const State& y) const {
    const int n = static_cast<int>(y.size() / 2);
    const auto g = f_.real_gradient(PhasePoint::from_real({y.begin(), y.begin() + n}, {y.begin() + n, y.end()}));
    State out(y.size());
    for (int j = 0; j < n; ++j) {
      out[j] = -sign_ * g[static_cast<size_t>(n + j)](0, 0).real();
      out[n + j] = sign_ * g[static_cast<size_t>(j)](0, 0).real();
    }
    return out;
  }

 private:
  const Symbol& f_;
  double sign_;
};

// One implicit midpoint step by fixed-point iteration, halving on failure.
State midpoint_step(const Field& field, const State& y, double h, double tau, int depth) {
  State y1 = axpy(y, h, field(y));
  for (int it = 0; it < 60; ++it) {
    State mid(y.size());
    for (size_t i = 0; i < y.size(); ++i) mid[i] = 0.5 * (y[i] + y1[i]);
    const State next = axpy(y, h, field(mid));
    double diff = 0.0;
    for (size_t i = 0; i < y.size(); ++i) diff = std::max(diff, std::abs(next[i] - y1[i]));
    y1 = next;
    if (!std::isfinite(diff)) break;
    if (diff <= 1e-14 * (1.0 + norm_of(y1))) return y1;
  }
  if (depth >= 30)
    fail(ErrorKind::StepSize, "implicit midpoint iteration did not converge at " + state_str(tau, y) +
                                  " even after 30 step halvings");
  const State half = midpoint_step(field, y, 0.5 * h, tau, depth + 1);
  return midpoint_step(field, half, 0.5 * h, tau + 0.5 * h, depth + 1);
}

// Dormand-Prince 5(4)
struct RkResult {
  State y;
  double error;
};

RkResult dopri_step(const Field& field, const State& y, double h, double tol) {
  static constexpr double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static constexpr double b4[7] = {5179.0 / 57600, 0.0,           7571.0 / 16695, 393.0 / 640,
                                   -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
  std::array<State, 7> k;
  k[0] = field(y);
  for (int s = 1; s < 7; ++s) {
    State ys = y;
    for (int j = 0; j < s; ++j)
      for (size_t i = 0; i < y.size(); ++i) ys[i] += h * a[s][j] * k[j][i];
    if (s == 6) {
      // the last stage point is the fifth-order solution
      k[6] = field(ys);
      double err = 0.0;
      for (size_t i = 0; i < y.size(); ++i) {
        double e = 0.0;
        for (int j = 0; j < 7; ++j) e += ((j < 6 ? a[6][j] : 0.0) - b4[j]) * k[j][i];
        const double scale = tol + tol * std::max(std::abs(y[i]), std::abs(ys[i]));
        err = std::max(err, std::abs(h * e) / scale);
      }
      return {ys, err};
    }
    k[s] = field(ys);
  }
  return {y, 0.0};
}

EscapeEstimate finish_escape(const std::vector<double>& thresholds, const std::vector<double>& crossings, bool escaped) {
  EscapeEstimate e;
  e.thresholds = thresholds;
  e.crossing_times = crossings;
  e.escaped = escaped;
  if (!escaped) {
    e.lower = e.upper = kNaN;
    return e;
  }
  const double d1 = crossings[1] - crossings[0];
  const double d2 = crossings[2] - crossings[1];
  e.lower = crossings[2];
  if (d1 > 0.0 && d2 > 0.0 && d2 < d1) {
    // algebraic blow-up |y| ~ C (T - tau)^{-p}: the gaps shrink geometrically
    const double r = d2 / d1;
    e.upper = crossings[2] + d2 * r / (1.0 - r);
  } else {
    e.upper = crossings[2] + std::max(d2, 0.0);
    e.note = "crossing gaps do not shrink geometrically; upper end is the last gap added to the last crossing";
  }
  return e;
}

}  // namespace

ClassicalState ClassicalState::from(const PhasePoint& z) {
  ClassicalState s;
  for (int j = 0; j < z.dim(); ++j) {
    s.x.push_back(z[j].real());
    s.xi.push_back(z[j].imag());
  }
  return s;
}

PhasePoint ClassicalState::point() const { return PhasePoint::from_real(x, xi); }

double ClassicalState::norm() const {
  double s = 0.0;
  for (double v : x) s += v * v;
  for (double v : xi) s += v * v;
  return std::sqrt(s);
}

void ClassicalState::validate() const {
  require(!x.empty() && x.size() == xi.size(), ErrorKind::Parameter, "classical state needs x and xi of equal length n >= 1");
  for (double v : x) require(std::isfinite(v), ErrorKind::Parameter, "classical state has a non-finite entry");
  for (double v : xi) require(std::isfinite(v), ErrorKind::Parameter, "classical state has a non-finite entry");
}

void EvolutionConfig::validate() const {
  require(total_time > 0.0 && std::isfinite(total_time), ErrorKind::Parameter, "evolution needs total time > 0");
  require(step > 0.0 && std::isfinite(step), ErrorKind::Parameter, "evolution needs step h > 0");
  require(blowup > 1.0, ErrorKind::Parameter, "escape threshold B must exceed 1");
  require(rk_tolerance > 0.0, ErrorKind::Parameter, "adaptive-rk tolerance must be > 0");
  require(samples >= 1, ErrorKind::Parameter, "evolution needs at least one sample interval");
  require(leakage_threshold > 0.0 && leakage_threshold < 1.0, ErrorKind::Parameter, "leakage threshold must lie in (0, 1)");
  for (size_t i = 0; i < cutoffs.size(); ++i) {
    require(cutoffs[i] >= 1, ErrorKind::Parameter, "cutoffs must be >= 1");
    require(i == 0 || cutoffs[i] > cutoffs[i - 1], ErrorKind::Parameter, "cutoff ladder must be increasing");
  }
}

ClassicalTrajectory classical_flow(const Symbol& f, const ClassicalState& z0, const EvolutionConfig& cfg) {
  cfg.validate();
  z0.validate();
  require(f.d() == 1, ErrorKind::Parameter, "classical flow needs a scalar symbol (d = 1)");
  require(f.hermitian(), ErrorKind::Parameter, "classical flow needs a real-valued symbol");
  require(f.n() == static_cast<int>(z0.x.size()), ErrorKind::Parameter, "initial state dimension does not match the symbol");
  require(f.has_gradient(), ErrorKind::UnsupportedVariant, "classical flow needs a symbol with a gradient");

  const Field field(f, cfg.direction);
  const std::vector<double> thresholds{cfg.blowup / 100.0, cfg.blowup / 10.0, cfg.blowup};
  std::vector<double> crossings(3, kNaN);

  ClassicalTrajectory out;
  State y = z0.x;
  y.insert(y.end(), z0.xi.begin(), z0.xi.end());
  double tau = 0.0;
  out.times.push_back(tau);
  out.states.push_back(to_classical(y));
  double h_rk = cfg.step;
  bool escaped = false;

  while (tau < cfg.total_time) {
    State next;
    double h = 0.0;
    if (cfg.integrator == Integrator::ImplicitMidpoint) {
      const double speed = norm_of(field(y));
      const double scale = speed > 0.0 ? std::min(1.0, (1.0 + norm_of(y)) / speed) : 1.0;
      h = std::min(cfg.step * scale, cfg.total_time - tau);
      next = midpoint_step(field, y, h, tau, 0);
    } else {
      for (;;) {
        h = std::min(h_rk, cfg.total_time - tau);
        if (h < 1e-15 * std::max(1.0, tau))
          fail(ErrorKind::StepSize, "adaptive step fell below 1e-15 at " + state_str(tau, y));
        const auto r = dopri_step(field, y, h, cfg.rk_tolerance);
        const double fac = r.error > 0.0 ? 0.9 * std::pow(r.error, -0.2) : 5.0;
        if (std::isfinite(r.error) && r.error <= 1.0) {
          next = r.y;
          h_rk = h * std::clamp(fac, 0.2, 5.0);
          break;
        }
        h_rk = h * (std::isfinite(fac) ? std::clamp(fac, 0.1, 0.9) : 0.1);
      }
    }
    const double r0 = norm_of(y);
    const double r1 = norm_of(next);
    if (!std::isfinite(r1)) fail(ErrorKind::StepSize, "integrator produced a non-finite state after " + state_str(tau, y));
    for (size_t k = 0; k < 3; ++k) {
      if (!std::isnan(crossings[k]) || r1 <= thresholds[k]) continue;
      // interpolate log|y| across the step
      const double frac = (r0 > 0.0 && r1 > r0) ? (std::log(thresholds[k]) - std::log(std::max(r0, 1e-300))) /
                                                      (std::log(r1) - std::log(std::max(r0, 1e-300)))
                                                : 1.0;
      crossings[k] = tau + h * std::clamp(frac, 0.0, 1.0);
    }
    tau += h;
    y = std::move(next);
    out.times.push_back(tau);
    out.states.push_back(to_classical(y));
    if (r1 > cfg.blowup) {
      escaped = true;
      break;
    }
  }
  out.escape = finish_escape(thresholds, crossings, escaped);
  return out;
}

QuantumTrajectory quantum_evolve(const TruncatedOperator& a, const Vector& psi0, const std::vector<double>& times) {
  require(a.hermitian(), ErrorKind::Parameter, "quantum evolution needs a hermitian generator");
  require(psi0.size() == a.dim(), ErrorKind::Spec, "initial state length does not match the operator dimension");
  require(std::abs(psi0.norm() - 1.0) <= 1e-10, ErrorKind::Parameter, "initial state must be normalized");
  const Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix());
  require(es.info() == Eigen::Success, ErrorKind::Accuracy, "eigendecomposition of the generator failed");
  const Vector c = es.eigenvectors().adjoint() * psi0;
  const double t = a.spec().t();
  QuantumTrajectory out{a.spec(), times, {}};
  out.states.reserve(times.size());
  for (double tau : times) {
    Vector phased(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) phased[i] = std::polar(1.0, -tau * es.eigenvalues()[i] / t) * c[i];
    out.states.push_back(es.eigenvectors() * phased);
  }
  return out;
}

std::vector<cplx> expectation_trajectory(const TruncatedOperator& a, const QuantumTrajectory& traj) {
  require(a.spec().same_basis(traj.spec), ErrorKind::Spec,
          "observable cutoff " + std::to_string(a.spec().cutoff()) + " does not match trajectory cutoff " +
              std::to_string(traj.spec.cutoff()));
  std::vector<cplx> out;
  out.reserve(traj.states.size());
  for (const auto& psi : traj.states) out.push_back(psi.dot(a.matrix() * psi));
  return out;
}

std::vector<PhasePoint> position_trajectory(const QuantumTrajectory& traj) {
  const int n = traj.spec.n();
  std::vector<PhasePoint> out(traj.states.size(), PhasePoint(n));
  for (int j = 0; j < n; ++j) {
    const Symbol zj = Symbol::polynomial(
        Polynomial::monomial(MultiIndex::unit(n, j), MultiIndex(n), 1.0, traj.spec.d()), "z_" + std::to_string(j + 1));
    const auto e = expectation_trajectory(assemble_toeplitz(zj, traj.spec), traj);
    for (size_t k = 0; k < e.size(); ++k) out[k][j] = e[k];
  }
  return out;
}

double leakage(const TruncationSpec& spec, const Vector& psi) {
  require(psi.size() == spec.dim(), ErrorKind::Spec, "state length does not match the truncation");
  const int first = spec.degree_start(static_cast<int>(std::floor(0.9 * spec.cutoff())) + 1) * spec.d();
  return psi.tail(psi.size() - first).squaredNorm();
}

CompletenessReport completeness_experiment(const Symbol& f, const ClassicalState& z0, const EvolutionConfig& cfg,
                                           const QuantizationContext& ctx) {
  cfg.validate();
  ctx.validate();
  require(f.d() == 1 && ctx.d == 1, ErrorKind::Parameter, "completeness experiment needs d = 1");
  require(f.n() == ctx.n, ErrorKind::Parameter, "symbol dimension does not match the context");
  require(f.hermitian(), ErrorKind::Parameter, "completeness experiment needs a hermitian symbol");
  require(!cfg.cutoffs.empty(), ErrorKind::Parameter, "completeness experiment needs at least one cutoff");

  CompletenessReport rep;
  rep.escape = classical_flow(f, z0, cfg).escape;

  std::vector<double> times(static_cast<size_t>(cfg.samples) + 1);
  for (int k = 0; k <= cfg.samples; ++k) times[static_cast<size_t>(k)] = cfg.total_time * k / cfg.samples;

  rep.curves.resize(cfg.cutoffs.size());
  parallel_for(0, static_cast<int>(cfg.cutoffs.size()), [&](int i) {
    const TruncationSpec spec(ctx, cfg.cutoffs[static_cast<size_t>(i)]);
    const TruncatedOperator a = assemble_toeplitz(f, spec);
    Vector psi0 = coherent_coefficients(spec, z0.point()).coeffs;
    psi0.normalize();
    const auto traj = quantum_evolve(a, psi0, times);
    LeakageCurve c;
    c.cutoff = spec.cutoff();
    c.times = times;
    for (size_t k = 0; k < times.size(); ++k) {
      const double l = std::clamp(leakage(spec, traj.states[k]), 0.0, 1.0);
      c.leakage.push_back(l);
      c.max_norm_error = std::max(c.max_norm_error, std::abs(traj.states[k].norm() - 1.0));
      if (!c.onset && l > cfg.leakage_threshold) c.onset = times[k];
    }
    rep.curves[static_cast<size_t>(i)] = std::move(c);
  });

  bool all = true, inc = true, dec = true;
  for (size_t i = 0; i < rep.curves.size(); ++i) {
    all = all && rep.curves[i].onset.has_value();
    if (i > 0 && all) {
      inc = inc && *rep.curves[i].onset > *rep.curves[i - 1].onset;
      dec = dec && *rep.curves[i].onset < *rep.curves[i - 1].onset;
    }
  }
  if (!all)
    rep.onset_ordering = "incomplete";
  else if (rep.curves.size() < 2)
    rep.onset_ordering = "single";
  else
    rep.onset_ordering = inc ? "increasing" : dec ? "decreasing" : "non-monotone";

  std::ostringstream os;
  os.precision(6);
  if (rep.escape.escaped)
    os << "classical orbit leaves |state| <= " << cfg.blowup << " at a time in [" << rep.escape.lower << ", "
       << rep.escape.upper << "]";
  else
    os << "no classical escape before tau = " << cfg.total_time;
  os << "; leakage onset (threshold " << cfg.leakage_threshold << ") by cutoff:";
  for (const auto& c : rep.curves) {
    os << " M=" << c.cutoff << ": ";
    if (c.onset)
      os << *c.onset;
    else
      os << "none";
  }
  os << "; onset ordering " << rep.onset_ordering << ". Probed orbit only; no completeness verdict is drawn.";
  rep.summary = os.str();
  return rep;
}

}  // namespace btq
