#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "CLI11.hpp"
#include "btq/criteria.hpp"
#include "btq/dynamics.hpp"
#include "btq/parallel.hpp"
#include "btq_cli.hpp"

namespace btq::cli {

const char* const kToolVersion = BTQ_VERSION;

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kCommands{"quantize",   "heat",     "check",    "bcverify",
                                         "identities", "spectrum", "dynamics", "report"};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string flag(bool b) { return b ? "true" : "false"; }

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Fixed-width console rendering.
void render(std::ostream& out, const Table& t) {
  std::vector<size_t> w(t.header.size());
  for (size_t j = 0; j < w.size(); ++j) {
    w[j] = t.header[j].size();
    for (const auto& r : t.rows) w[j] = std::max(w[j], r[j].size());
  }
  auto line = [&](const std::vector<std::string>& r) {
    for (size_t j = 0; j < r.size(); ++j) out << (j ? "  " : "") << std::left << std::setw(static_cast<int>(w[j])) << r[j];
    out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

// Short form for console tables; CSVs keep full precision.
std::string brief(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

class Run {
 public:
  Run(RunConfig cfg, fs::path dir, std::ostream& out) : cfg_(std::move(cfg)), dir_(std::move(dir)), out_(out) {}

  RunConfig& cfg() { return cfg_; }
  std::ostream& out() { return out_; }
  const fs::path& dir() const { return dir_; }

  double number(const std::string& key, double def) {
    const double v = cfg_.params.contains(key) ? cfg_.params[key].get<double>() : def;
    effective_[key] = v;
    return v;
  }
  int integer(const std::string& key, int def) {
    const int v = cfg_.params.contains(key) ? cfg_.params[key].get<int>() : def;
    effective_[key] = v;
    return v;
  }

  Symbol symbol() {
    require(!cfg_.symbol.is_null(), ErrorKind::Parameter, "command '" + cfg_.command + "' needs a symbol");
    Symbol f = symbol_from_json(cfg_.symbol, cfg_.ctx.n, cfg_.base_dir);
    if (cfg_.ctx_n_given)
      require(f.n() == cfg_.ctx.n, ErrorKind::Parameter,
              "symbol has n = " + std::to_string(f.n()) + " but ctx.n = " + std::to_string(cfg_.ctx.n));
    if (cfg_.ctx_d_given)
      require(f.d() == cfg_.ctx.d, ErrorKind::Parameter,
              "symbol has d = " + std::to_string(f.d()) + " but ctx.d = " + std::to_string(cfg_.ctx.d));
    cfg_.ctx = QuantizationContext(f.n(), cfg_.ctx.t, f.d());
    results_["symbol"] = f.label();
    return f;
  }

  TruncationSpec spec() const { return TruncationSpec(cfg_.ctx, cfg_.cutoff); }

  void write_csv(const std::string& name, const Table& t) {
    std::ofstream f(dir_ / name);
    require(static_cast<bool>(f), ErrorKind::Io, "cannot write " + (dir_ / name).string());
    for (size_t j = 0; j < t.header.size(); ++j) f << (j ? "," : "") << cell(t.header[j]);
    f << '\n';
    for (const auto& r : t.rows) {
      for (size_t j = 0; j < r.size(); ++j) f << (j ? "," : "") << cell(r[j]);
      f << '\n';
    }
    require(static_cast<bool>(f), ErrorKind::Io, "write failed for " + (dir_ / name).string());
    outputs_.push_back(name);
  }

  void write_json(const std::string& name, const json& j) {
    std::ofstream f(dir_ / name);
    require(static_cast<bool>(f), ErrorKind::Io, "cannot write " + (dir_ / name).string());
    f << j.dump(2) << '\n';
    outputs_.push_back(name);
  }

  void add_output(const std::string& name) { outputs_.push_back(name); }
  void verdict(const std::string& name, bool v) { verdicts_[name] = v; }
  void warn(const std::string& w) { warnings_.push_back(w); }
  json& results() { return results_; }

  bool any_false() const {
    for (const auto& [k, v] : verdicts_.items())
      if (!v.get<bool>()) return true;
    return false;
  }

  json manifest(const std::string& started, const std::string& status, int exit_code) const {
    json m = json::object();
    m["format"] = "btq-manifest";
    m["schema_version"] = 1;
    m["tool_version"] = kToolVersion;
    m["command"] = cfg_.command;
    m["status"] = status;
    m["exit_code"] = exit_code;
    json c = cfg_.echo();
    c["effective_params"] = effective_;
    m["config"] = c;
    m["started"] = started;
    m["finished"] = utc_now();
    m["verdicts"] = verdicts_;
    json files = json::array();
    for (const auto& name : outputs_) {
      std::error_code ec;
      const auto size = fs::file_size(dir_ / name, ec);
      files.push_back({{"file", name}, {"bytes", ec ? 0 : size}});
    }
    m["outputs"] = files;
    m["warnings"] = warnings_;
    m["results"] = results_;
    return m;
  }

 private:
  RunConfig cfg_;
  fs::path dir_;
  std::ostream& out_;
  json effective_ = json::object();
  json verdicts_ = json::object();
  json results_ = json::object();
  std::vector<std::string> warnings_;
  std::vector<std::string> outputs_;
};

std::vector<PhasePoint> config_points(Run& r, int n, double radius) {
  std::vector<PhasePoint> pts;
  if (r.cfg().params.contains("points")) {
    for (const auto& p : r.cfg().params["points"]) {
      require(static_cast<int>(p.size()) == n, ErrorKind::Parameter, "every point needs n = " + std::to_string(n) + " coordinates");
      PhasePoint z(n);
      for (int j = 0; j < n; ++j) z[j] = cplx{p[j][0].get<double>(), p[j][1].get<double>()};
      pts.push_back(z);
    }
    return pts;
  }
  return phase_grid(n, radius, r.integer("samples", 64));
}

void point_columns(std::vector<std::string>& header, int n) {
  for (int j = 1; j <= n; ++j) {
    header.push_back("z" + std::to_string(j) + "_re");
    header.push_back("z" + std::to_string(j) + "_im");
  }
}

void point_cells(std::vector<std::string>& row, const PhasePoint& z) {
  for (int j = 0; j < z.dim(); ++j) {
    row.push_back(num(z[j].real()));
    row.push_back(num(z[j].imag()));
  }
}

// --------------------------------------------------------------- commands

void spectrum_outputs(Run& r, const TruncatedOperator& a) {
  const double norm = operator_norm(a);
  r.results()["dim"] = a.dim();
  r.results()["method"] = a.provenance().method;
  r.results()["hermitian"] = a.hermitian();
  r.results()["hermitian_deviation"] = a.provenance().hermitian_deviation;
  r.results()["operator_norm"] = norm;
  Table t;
  if (a.hermitian()) {
    const Eigen::VectorXd ev = eigenvalues(a);
    t.header = {"index", "eigenvalue"};
    for (Eigen::Index i = 0; i < ev.size(); ++i) t.rows.push_back({std::to_string(i), num(ev[i])});
    const bool psd = ev[0] >= -1e-10 * std::max(1.0, norm);
    r.results()["min_eigenvalue"] = ev[0];
    r.results()["max_eigenvalue"] = ev[ev.size() - 1];
    r.results()["positive_semidefinite"] = psd;
    r.out() << "dim " << a.dim() << ", hermitian (deviation " << brief(a.provenance().hermitian_deviation)
            << "), eigenvalues in [" << num(ev[0]) << ", " << num(ev[ev.size() - 1]) << "], "
            << (psd ? "positive semidefinite" : "indefinite") << '\n';
  } else {
    const Eigen::ComplexEigenSolver<Matrix> es(a.matrix(), false);
    std::vector<cplx> ev(es.eigenvalues().begin(), es.eigenvalues().end());
    std::sort(ev.begin(), ev.end(), [](cplx x, cplx y) { return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag(); });
    t.header = {"index", "re", "im"};
    for (size_t i = 0; i < ev.size(); ++i) t.rows.push_back({std::to_string(i), num(ev[i].real()), num(ev[i].imag())});
    r.out() << "dim " << a.dim() << ", not hermitian, operator norm " << num(norm) << '\n';
  }
  r.write_csv("spectrum.csv", t);
}

void cmd_quantize(Run& r) {
  const Symbol f = r.symbol();
  const TruncatedOperator a = assemble_toeplitz(f, r.spec(), r.cfg().quadrature);
  export_operator(a, (r.dir() / "operator").string());
  r.add_output("operator.json");
  r.add_output("operator.csv");
  spectrum_outputs(r, a);
}

void cmd_spectrum(Run& r) {
  const Symbol f = r.symbol();
  spectrum_outputs(r, assemble_toeplitz(f, r.spec(), r.cfg().quadrature));
}

void cmd_heat(Run& r) {
  const Symbol f = r.symbol();
  const double s = r.number("s", r.cfg().ctx.t / 4.0);
  const double radius = r.number("radius", 4.0);
  const PolyBound growth = poly_bound_fit(f, radius);
  const Symbol h = heat_transform(f, HeatParams{s});
  const auto pts = config_points(r, f.n(), radius);
  const int d = f.d();
  Table t;
  t.header = {"index"};
  point_columns(t.header, f.n());
  for (const char* which : {"f", "heat"})
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (const char* part : {"re", "im"})
          t.header.push_back(std::string(which) + "_" + std::to_string(i) + std::to_string(j) + "_" + part);
  for (size_t k = 0; k < pts.size(); ++k) {
    std::vector<std::string> row{std::to_string(k)};
    point_cells(row, pts[k]);
    for (const Matrix& m : {f.eval(pts[k]), h.eval(pts[k])})
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          row.push_back(num(m(i, j).real()));
          row.push_back(num(m(i, j).imag()));
        }
    t.rows.push_back(std::move(row));
  }
  r.write_csv("heat.csv", t);
  r.results()["s"] = s;
  r.results()["route"] = h.as_polynomial() ? "closed-form" : "quadrature";
  r.results()["growth_degree"] = growth.degree;
  r.results()["growth_constant"] = growth.constant;
  r.out() << "heat transform at s = " << brief(s) << " (" << r.results()["route"].get<std::string>() << ") on "
          << pts.size() << " points; growth degree " << growth.degree << '\n';
}

json oscillation_json(const OscillationReport& o) {
  return {{"sup_statistic", o.sup_statistic}, {"refined_statistic", o.refined_statistic},
          {"linear_constant", o.linear_constant}, {"stable", o.stable}, {"verdict", o.verdict},
          {"radius", o.radius}, {"centres", o.centres}, {"probes", o.probes}};
}

void cmd_check(Run& r) {
  const Symbol f = r.symbol();
  const double s = r.number("s", 0.0);
  const double radius = r.number("radius", 4.0);
  const int resolution = r.integer("resolution", 256);
  const HypothesisReport rep = main_theorem_hypothesis_check(f, s, r.cfg().ctx, radius, resolution);
  const ThetaReport th = theta_derivative_bound(f, radius);

  Table t;
  t.header = {"derivative", "sup_statistic", "refined_statistic", "linear_constant", "stable", "verdict"};
  json derivs = json::array();
  for (const auto& d : rep.derivatives) {
    const auto& o = d.oscillation;
    t.rows.push_back({d.name, num(o.sup_statistic), num(o.refined_statistic), num(o.linear_constant), flag(o.stable), flag(o.verdict)});
    json dj = oscillation_json(o);
    dj["name"] = d.name;
    derivs.push_back(dj);
  }
  r.write_csv("derivatives.csv", t);
  const json report = {
      {"main_theorem",
       {{"verdict", rep.verdict}, {"s", rep.s}, {"derivative_method", rep.derivative_method},
        {"growth", {{"degree", rep.growth.degree}, {"constant", rep.growth.constant}}}, {"derivatives", derivs},
        {"note", rep.note}}},
      {"theta_bound",
       {{"verdict", th.verdict},
        {"symbol_growth", {{"degree", th.symbol_growth.degree}, {"constant", th.symbol_growth.constant}}},
        {"theta_growth", {{"degree", th.theta_growth.degree}, {"constant", th.theta_growth.constant}}}}}};
  r.write_json("check.json", report);
  r.verdict("main_theorem", rep.verdict);
  r.verdict("theta_quadratic_bound", th.verdict);
  r.results()["derivative_method"] = rep.derivative_method;

  Table shown{{"derivative", "sup", "refined", "stable", "verdict"}, {}};
  for (const auto& row : t.rows) shown.rows.push_back({row[0], brief(std::stod(row[1])), brief(std::stod(row[2])), row[4], row[5] == "true" ? "PASS" : "FAIL"});
  render(r.out(), shown);
  r.out() << "main theorem hypothesis at s = " << brief(s) << ": " << (rep.verdict ? "PASS" : "FAIL");
  if (!rep.verdict) {
    r.out() << " (offending:";
    for (const auto& d : rep.derivatives)
      if (!d.oscillation.verdict) r.out() << ' ' << d.name;
    r.out() << ')';
  }
  r.out() << "\nquadratic bounds on f and d/dtheta f: " << (th.verdict ? "PASS" : "FAIL") << " (degrees "
          << th.symbol_growth.degree << ", " << th.theta_growth.degree << ")\n";
}

void cmd_bcverify(Run& r) {
  const Symbol f = r.symbol();
  const double s = r.number("s", r.cfg().ctx.t / 4.0);
  const double radius = r.number("radius", 4.0);
  const TruncationSpec spec = r.spec();
  const InequalityReport bc = bc_verify(f, s, spec, radius);
  const InequalityReport pb = perturbation_bound_check(f, s, spec, radius);
  Table t{{"check", "s", "lhs", "rhs", "constant", "sup", "slack", "holds"}, {}};
  for (const auto& [name, rep] : {std::pair{"berger_coburn", &bc}, std::pair{"perturbation_bound", &pb}})
    t.rows.push_back({name, num(s), num(rep->lhs), num(rep->rhs), num(rep->constant), num(rep->sup), num(rep->slack), flag(rep->holds)});
  r.write_csv("bcverify.csv", t);
  r.verdict("berger_coburn", bc.holds);
  r.verdict("perturbation_bound", pb.holds);
  Table shown{{"check", "lhs", "rhs", "slack", "verdict"}, {}};
  for (const auto& [name, rep] : {std::pair{"berger_coburn", &bc}, std::pair{"perturbation_bound", &pb}})
    shown.rows.push_back({name, brief(rep->lhs), brief(rep->rhs), brief(rep->slack), rep->holds ? "PASS" : "FAIL"});
  render(r.out(), shown);
}

// Uniform in the ball |z| <= radius.
PhasePoint random_point(std::mt19937_64& rng, int n, double radius) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(2 * static_cast<size_t>(n));
  double norm = 0.0;
  for (double& x : v) {
    x = g(rng);
    norm += x * x;
  }
  const double scale = radius * std::pow(u(rng), 1.0 / (2.0 * n)) / std::sqrt(norm);
  PhasePoint z(n);
  for (int j = 0; j < n; ++j) z[j] = cplx{scale * v[2 * j], scale * v[2 * j + 1]};
  return z;
}

struct IdentityRow {
  std::string check;
  int index;
  double residual;
  double tolerance;
};

void cmd_identities(Run& r) {
  const Symbol f = r.symbol();
  const TruncationSpec spec = r.spec();
  const int n = spec.n();
  const double t = spec.t();
  const int pairs = r.integer("pairs", 10);
  const double theta = r.number("theta", std::numbers::pi / 3.0);
  std::mt19937_64 rng(r.cfg().seed);
  std::vector<IdentityRow> rows;
  const Polynomial* poly = f.as_polynomial();

  const TruncatedOperator a = assemble_toeplitz(f, spec, r.cfg().quadrature);
  const Symbol heat_t = heat_transform(f, HeatParams{t});
  for (int i = 0; i < pairs; ++i) {
    const PhasePoint z = random_point(rng, n, 1.0);
    const BerezinValue b = berezin_transform(a, z);
    if (!b.warning.empty()) r.warn("berezin point " + std::to_string(i) + ": " + b.warning);
    rows.push_back({"berezin_heat", i, spectral_norm(b.value - heat_t.eval(z)), 1e-8});
  }
  for (int i = 0; i < pairs; ++i) {
    const PhasePoint z = random_point(rng, n, 2.0), w = random_point(rng, n, 2.0);
    rows.push_back({"semigroup", i, semigroup_identity_check(f, t, t / 4.0, z, w).residual, 1e-6});
  }
  const PolyBound growth = poly_bound_fit(f, 4.0);
  if (growth.degree == 0) {
    double sup = 0.0;
    for (const auto& z : phase_grid(n, 8.0, 400)) sup = std::max(sup, spectral_norm(f.eval(z)));
    for (int i = 0; i < pairs; ++i) {
      const PhasePoint z = random_point(rng, n, 2.0), w = random_point(rng, n, 2.0);
      const double lhs = spectral_norm(off_diagonal_heat(f, t, z, w));
      const double rhs = sup * std::exp(-(z - w).norm2() / (8.0 * t));
      rows.push_back({"off_diagonal_decay", i, std::max(0.0, lhs - rhs), 1e-12});
    }
  } else {
    r.warn("off-diagonal decay skipped: the symbol is unbounded (growth degree " + std::to_string(growth.degree) + ")");
  }
  for (int i = 0; i < pairs; ++i) {
    const PhasePoint w = random_point(rng, n, 0.5), z = random_point(rng, n, 0.5);
    rows.push_back({"weyl_relation", i, weyl_relation_check(spec, w, z), 1e-6});
    const Matrix ww = weyl_matrix(spec, w).matrix();
    rows.push_back({"weyl_unitarity", i, (ww * ww.adjoint() - Matrix::Identity(ww.rows(), ww.cols())).cwiseAbs().maxCoeff(), 1e-10});
  }
  if (poly) {
    for (int i = 0; i < pairs; ++i)
      rows.push_back({"covariance", i, covariance_check(f, spec, random_point(rng, n, 0.5)), 1e-6});
    rows.push_back({"rotation_covariance", 0, rotation_covariance_check(f, spec, theta), 1e-10});
    const int interior = spec.cutoff() - poly->degree() - 1;
    if (interior >= 0) {
      int k = 0;
      for (int j = 0; j < n; ++j)
        for (bool conj : {false, true}) {
          const Matrix expect = assemble_toeplitz(symbol_derivative(f, j, conj), spec).matrix();
          rows.push_back({"form_derivative", k++, interior_residual(spec, form_derivative(a, j, conj).matrix(), expect, interior), 1e-10});
        }
    } else {
      r.warn("form-derivative check skipped: cutoff below degree + 1");
    }
  } else {
    r.warn("covariance, rotation and form-derivative checks need a polynomial symbol; skipped for '" + f.label() + "'");
  }
  {
    const TruncationSpec small = spec.with_cutoff(std::min(spec.cutoff(), 8));
    const double tol = poly ? 1e-7 : 1e-5;
    int k = 0;
    for (const auto& [index, z] : {std::pair{0, PhasePoint(n)}, std::pair{1, PhasePoint(std::vector<cplx>(static_cast<size_t>(n), cplx{0.5, 0.0}))}}) {
      if (index >= small.dim()) continue;
      Vector g = Vector::Zero(small.dim());
      g[index] = 1.0;
      rows.push_back({"integral_representation", k++, integral_representation_check(f, small, g, z).residual, tol});
    }
  }

  Table t_csv{{"check", "case", "residual", "tolerance", "pass"}, {}};
  std::vector<std::string> order;
  std::map<std::string, std::pair<double, bool>> agg;
  std::map<std::string, std::pair<int, double>> meta;
  for (const auto& row : rows) {
    const bool ok = std::isfinite(row.residual) && row.residual <= row.tolerance;
    t_csv.rows.push_back({row.check, std::to_string(row.index), num(row.residual), num(row.tolerance), flag(ok)});
    if (!agg.count(row.check)) {
      order.push_back(row.check);
      agg[row.check] = {0.0, true};
      meta[row.check] = {0, row.tolerance};
    }
    agg[row.check].first = std::max(agg[row.check].first, row.residual);
    agg[row.check].second = agg[row.check].second && ok;
    meta[row.check].first += 1;
  }
  r.write_csv("identities.csv", t_csv);
  Table shown{{"check", "cases", "max_residual", "tolerance", "verdict"}, {}};
  for (const auto& name : order) {
    r.verdict(name, agg[name].second);
    shown.rows.push_back({name, std::to_string(meta[name].first), brief(agg[name].first), brief(meta[name].second),
                          agg[name].second ? "PASS" : "FAIL"});
  }
  render(r.out(), shown);
}

void cmd_dynamics(Run& r) {
  const Symbol f = r.symbol();
  const json dyn = r.cfg().params.value("dynamics", json::object());
  EvolutionConfig cfg;
  cfg.total_time = dyn.value("total_time", cfg.total_time);
  cfg.step = dyn.value("step", cfg.step);
  cfg.integrator = dyn.value("integrator", std::string("implicit-midpoint")) == "adaptive-rk" ? Integrator::AdaptiveRK
                                                                                              : Integrator::ImplicitMidpoint;
  cfg.direction = dyn.value("direction", std::string("paper")) == "textbook" ? FlowDirection::Textbook : FlowDirection::Paper;
  cfg.blowup = dyn.value("blowup", cfg.blowup);
  cfg.rk_tolerance = dyn.value("rk_tolerance", cfg.rk_tolerance);
  cfg.cutoffs = dyn.value("cutoffs", cfg.cutoffs);
  cfg.samples = dyn.value("samples", cfg.samples);
  cfg.leakage_threshold = dyn.value("leakage_threshold", cfg.leakage_threshold);
  PhasePoint z0(f.n());
  if (dyn.contains("z0")) {
    require(static_cast<int>(dyn["z0"].size()) == f.n(), ErrorKind::Parameter, "z0 needs n coordinates");
    for (int j = 0; j < f.n(); ++j) z0[j] = cplx{dyn["z0"][j][0].get<double>(), dyn["z0"][j][1].get<double>()};
  } else {
    z0[0] = 1.0;
  }
  const ClassicalState s0 = ClassicalState::from(z0);

  const ClassicalTrajectory tr = classical_flow(f, s0, cfg);
  Table ct{{"time"}, {}};
  for (int j = 1; j <= f.n(); ++j) ct.header.push_back("x" + std::to_string(j));
  for (int j = 1; j <= f.n(); ++j) ct.header.push_back("xi" + std::to_string(j));
  for (size_t k = 0; k < tr.times.size(); ++k) {
    std::vector<std::string> row{num(tr.times[k])};
    for (double v : tr.states[k].x) row.push_back(num(v));
    for (double v : tr.states[k].xi) row.push_back(num(v));
    ct.rows.push_back(std::move(row));
  }
  r.write_csv("classical.csv", ct);

  const CompletenessReport rep = completeness_experiment(f, s0, cfg, r.cfg().ctx);
  Table lt{{"cutoff", "time", "leakage"}, {}};
  json curves = json::array();
  for (const auto& c : rep.curves) {
    for (size_t k = 0; k < c.times.size(); ++k) lt.rows.push_back({std::to_string(c.cutoff), num(c.times[k]), num(c.leakage[k])});
    curves.push_back({{"cutoff", c.cutoff}, {"onset", c.onset ? json(*c.onset) : json(nullptr)}, {"max_norm_error", c.max_norm_error}});
  }
  r.write_csv("leakage.csv", lt);
  const auto& e = rep.escape;
  json crossings = json::array();
  for (size_t k = 0; k < e.thresholds.size(); ++k)
    crossings.push_back({{"threshold", e.thresholds[k]}, {"time", std::isnan(e.crossing_times[k]) ? json(nullptr) : json(e.crossing_times[k])}});
  r.results()["escape"] = {{"escaped", e.escaped},
                           {"range", e.escaped ? json::array({e.lower, e.upper}) : json(nullptr)},
                           {"crossings", crossings},
                           {"note", e.note}};
  r.results()["curves"] = curves;
  r.results()["onset_ordering"] = rep.onset_ordering;
  r.results()["summary"] = rep.summary;
  r.out() << rep.summary << '\n';
}

void cmd_report(Run& r) {
  require(r.cfg().params.contains("runs") && !r.cfg().params["runs"].empty(), ErrorKind::Parameter,
          "report needs params.runs listing run directories");
  Table t{{"run", "command", "status", "exit_code", "verdict", "value"}, {}};
  std::ostringstream md;
  md << "| run | command | status | verdicts |\n|---|---|---|---|\n";
  for (const auto& entry : r.cfg().params["runs"]) {
    const std::string name = entry.get<std::string>();
    const fs::path mp = r.cfg().base_dir / name / "manifest.json";
    std::ifstream in(mp);
    if (!in) {
      r.warn("no manifest in " + name);
      t.rows.push_back({name, "", "missing", "", "", ""});
      md << "| " << name << " | | missing | |\n";
      continue;
    }
    json m;
    try {
      m = json::parse(in);
    } catch (const json::parse_error&) {
      r.warn("unreadable manifest in " + name);
      t.rows.push_back({name, "", "invalid", "", "", ""});
      continue;
    }
    const auto errs = schema_errors(manifest_schema(), m);
    if (!errs.empty()) {
      r.warn("manifest in " + name + " violates the schema: " + errs.front());
      t.rows.push_back({name, "", "invalid", "", "", ""});
      continue;
    }
    const std::string cmd = m["command"].get<std::string>();
    const std::string status = m["status"].get<std::string>();
    const std::string code = m.contains("exit_code") ? std::to_string(m["exit_code"].get<int>()) : "";
    std::string summary;
    if (m["verdicts"].empty()) t.rows.push_back({name, cmd, status, code, "", ""});
    for (const auto& [k, v] : m["verdicts"].items()) {
      t.rows.push_back({name, cmd, status, code, k, v.get<bool>() ? "PASS" : "FAIL"});
      summary += (summary.empty() ? "" : ", ") + k + " " + (v.get<bool>() ? "PASS" : "FAIL");
    }
    md << "| " << name << " | " << cmd << " | " << status << " | " << summary << " |\n";
  }
  r.write_csv("report.csv", t);
  {
    std::ofstream f(r.dir() / "report.md");
    require(static_cast<bool>(f), ErrorKind::Io, "cannot write report.md");
    f << md.str();
  }
  r.add_output("report.md");
  r.out() << md.str();
}

void dispatch(Run& r) {
  const std::string& c = r.cfg().command;
  if (c == "quantize") return cmd_quantize(r);
  if (c == "spectrum") return cmd_spectrum(r);
  if (c == "heat") return cmd_heat(r);
  if (c == "check") return cmd_check(r);
  if (c == "bcverify") return cmd_bcverify(r);
  if (c == "identities") return cmd_identities(r);
  if (c == "dynamics") return cmd_dynamics(r);
  if (c == "report") return cmd_report(r);
  fail(ErrorKind::Parameter, "unknown command '" + c + "'");
}

json error_record(const std::string& kind, const std::string& message, const std::string& command) {
  return {{"format", "btq-error"}, {"schema_version", 1}, {"kind", kind}, {"message", message}, {"command", command}};
}

void write_atomic(const fs::path& target, const std::string& text) {
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp);
    require(static_cast<bool>(f), ErrorKind::Io, "cannot write " + tmp.string());
    f << text;
    f.flush();
    require(static_cast<bool>(f), ErrorKind::Io, "write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace

int run(const std::string& command, const fs::path& config_path, const Overrides& overrides, std::ostream& out,
        std::ostream& err) {
  std::optional<fs::path> dir;
  std::unique_ptr<Run> state;
  const std::string started = utc_now();
  auto report_error = [&](const std::string& kind, const std::string& message) {
    const json rec = error_record(kind, message, command);
    err << rec.dump() << '\n';
    if (!dir) dir = fs::path("btq-" + command);
    try {
      fs::create_directories(*dir);
      write_atomic(*dir / "error.json", rec.dump(2) + "\n");
      write_atomic(*dir / "FAILED", message + "\n");
      if (state) {
        state->add_output("error.json");
        json m = state->manifest(started, "error", 1);
        m["error"] = rec;
        write_atomic(*dir / "manifest.json", m.dump(2) + "\n");
      }
    } catch (const std::exception& e) {
      err << error_record("io", std::string("could not record the failure: ") + e.what(), command).dump() << '\n';
    }
    return 1;
  };

  try {
    if (overrides.out) dir = fs::path(*overrides.out);
    if (overrides.threads) {
      require(*overrides.threads >= 1, ErrorKind::Parameter, "--threads must be >= 1");
      set_threads(*overrides.threads);
    }
    std::ifstream in(config_path);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot read config " + config_path.string());
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::Parameter, config_path.string() + " is not valid JSON: " + e.what());
    }
    require(doc.is_object(), ErrorKind::Parameter, "config must be a JSON object");
    if (doc.contains("command") && doc["command"].is_string())
      require(doc["command"].get<std::string>() == command, ErrorKind::Parameter,
              "config is for command '" + doc["command"].get<std::string>() + "' but '" + command + "' was requested");
    doc["command"] = command;
    // Known before validation so that a rejected config still leaves its failure record.
    if (!dir) dir = doc.contains("output") && doc["output"].is_string() ? fs::path(doc["output"].get<std::string>())
                                                                      : fs::path("btq-" + command);
    RunConfig cfg = parse_config(doc, config_path.parent_path());
    if (overrides.seed) cfg.seed = *overrides.seed;
    cfg.output = dir->string();
    fs::create_directories(*dir);
    for (const char* stale : {"FAILED", "error.json", "manifest.json"}) fs::remove(*dir / stale);

    state = std::make_unique<Run>(cfg, *dir, out);
    state->write_json("config.json", cfg.echo());
    dispatch(*state);
    const bool failed = state->any_false();
    const int code = failed ? 2 : 0;
    json m = state->manifest(started, failed ? "fail" : "ok", code);
    write_atomic(*dir / "manifest.json", m.dump(2) + "\n");
    return code;
  } catch (const Error& e) {
    return report_error(to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    return report_error("internal", e.what());
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Berezin-Toeplitz quantization experiments on truncated Fock spaces"};
  std::string command;
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  app.add_option("command", command, "quantize | heat | check | bcverify | identities | spectrum | dynamics | report")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--config", config, "run configuration (JSON)")->required();
  app.add_option("--out", out, "output directory (overrides the config)");
  app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--threads", threads, "worker threads");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << error_record("parameter", e.what(), command).dump() << '\n' << app.help();
    return 1;
  }
  return run(command, config, Overrides{out, seed, threads}, std::cout, std::cerr);
}

}  // namespace btq::cli
