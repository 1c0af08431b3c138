#include "btq/toeplitz.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "btq/parallel.hpp"
#include "btq/quadrature.hpp"

namespace btq {

void QuadratureSpec::validate() const {
  require(angular == 0 || angular >= 4, ErrorKind::Parameter, "angular node count must be >= 4");
  require(radial == 0 || radial >= 4, ErrorKind::Parameter, "radial node count must be >= 4");
  require(tolerance > 0.0, ErrorKind::Parameter, "quadrature tolerance must be > 0");
  require(cap >= 4 && cap <= quad::kNodeCap, ErrorKind::Parameter, "node cap out of range");
  require(max_dim >= 1, ErrorKind::Parameter, "dimension cap must be >= 1");
}

TruncatedOperator::TruncatedOperator(TruncationSpec spec, Matrix m, bool hermitian, Provenance p)
    : spec_(std::move(spec)), m_(std::move(m)), hermitian_(hermitian), prov_(std::move(p)) {
  require(m_.rows() == spec_.dim() && m_.cols() == spec_.dim(), ErrorKind::Spec,
          "operator matrix is " + std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()) +
              " but the truncation has dimension " + std::to_string(spec_.dim()));
  if (hermitian_) {
    const double dev = quad::max_abs(m_ - m_.adjoint());
    prov_.hermitian_deviation = dev;
    if (dev > kHermitianTolerance) {
      std::ostringstream os;
      os << "assembled operator deviates from hermitian by " << dev << " (limit " << kHermitianTolerance << ")";
      fail(ErrorKind::Assembly, os.str());
    }
    m_ = (0.5 * (m_ + m_.adjoint())).eval();
  }
}

namespace {

void guard_dimension(const TruncationSpec& spec, int max_dim) {
  if (spec.dim() > max_dim)
    fail(ErrorKind::MemoryGuard, "truncated dimension " + std::to_string(spec.dim()) + " exceeds the cap " +
                                     std::to_string(max_dim));
}

// prod_{k=lo+1}^{hi} k
double rising(int lo, int hi) {
  double p = 1.0;
  for (int k = lo + 1; k <= hi; ++k) p *= k;
  return p;
}

Matrix closed_form(const Polynomial& p, const TruncationSpec& spec) {
  const int d = spec.d();
  require(p.d() == d && p.n() == spec.n(), ErrorKind::Parameter, "symbol shape does not match the truncation");
  const double two_t = 2.0 * spec.t();
  Matrix a = Matrix::Zero(spec.dim(), spec.dim());
  for (const auto& [e, c] : p.terms()) {
    const double scale = std::pow(two_t, 0.5 * (e.a.degree() + e.b.degree()));
    for (int col = 0; col < spec.size(); ++col) {
      const MultiIndex& mu = spec.index(col);
      const MultiIndex nu = mu + e.a - e.b;
      if (!nu.valid() || nu.degree() > spec.cutoff()) continue;
      const int row = *spec.position(nu);
      const MultiIndex alpha = mu + e.a;
      double prod = 1.0;
      for (int j = 0; j < spec.n(); ++j) prod *= rising(mu[j], alpha[j]) * rising(nu[j], alpha[j]);
      a.block(row * d, col * d, d, d) += (std::sqrt(prod) * scale) * c;
    }
  }
  return a;
}

int next_pow2(int v) {
  int p = 1;
  while (p < v) p *= 2;
  return p;
}

// n = 1: radial Gauss-Laguerre in u = r^2/2t, trapezoid in angle with the
// angular sums done once per radial node as Fourier coefficients.
Matrix polar_assembly(const Symbol& f, const TruncationSpec& spec, int n_theta, int n_r) {
  const int M = spec.cutoff();
  const int d = spec.d();
  const double t = spec.t();
  const auto& rule = quad::gauss_laguerre(n_r);
  // fourier[j][k + M] = (1/N) sum_l f(r_j e^{i theta_l}) e^{i k theta_l}
  std::vector<std::vector<Matrix>> fourier(static_cast<size_t>(n_r));
  parallel_for(0, n_r, [&](int j) {
    const double r = std::sqrt(2.0 * t * rule.nodes[j]);
    std::vector<Matrix> samples(static_cast<size_t>(n_theta));
    for (int l = 0; l < n_theta; ++l)
      samples[l] = f.eval(PhasePoint{std::polar(r, 2.0 * std::numbers::pi * l / n_theta)});
    auto& row = fourier[static_cast<size_t>(j)];
    row.assign(static_cast<size_t>(2 * M + 1), Matrix::Zero(d, d));
    for (int k = -M; k <= M; ++k) {
      Matrix acc = Matrix::Zero(d, d);
      for (int l = 0; l < n_theta; ++l) {
        const long long phase = ((static_cast<long long>(k) * l) % n_theta + n_theta) % n_theta;
        acc += std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(phase) / n_theta) * samples[l];
      }
      row[static_cast<size_t>(k + M)] = acc / static_cast<double>(n_theta);
    }
  });
  std::vector<double> log_u(static_cast<size_t>(n_r));
  for (int j = 0; j < n_r; ++j) log_u[j] = std::log(rule.nodes[j]);
  std::vector<double> lfact(static_cast<size_t>(M + 1));
  for (int m = 0; m <= M; ++m) lfact[m] = std::lgamma(m + 1.0);

  Matrix a = Matrix::Zero(spec.dim(), spec.dim());
  parallel_for(0, M + 1, [&](int nu) {
    for (int mu = 0; mu <= M; ++mu) {
      Matrix acc = Matrix::Zero(d, d);
      for (int j = 0; j < n_r; ++j) {
        const double w = std::exp(rule.log_weights[j] + 0.5 * (mu + nu) * log_u[j] - 0.5 * (lfact[mu] + lfact[nu]));
        acc += w * fourier[j][static_cast<size_t>(mu - nu + M)];
      }
      a.block(nu * d, mu * d, d, d) = acc;
    }
  });
  return a;
}

// n >= 2: tensor Gauss-Hermite over R^{2n} against mu (variance t per axis).
Matrix tensor_assembly(const Symbol& f, const TruncationSpec& spec, int nodes) {
  const int n = spec.n();
  const int d = spec.d();
  const int size = spec.size();
  return quad::gaussian_expectation(2 * n, nodes, std::vector<double>(2 * static_cast<size_t>(n), 0.0), std::sqrt(spec.t()),
                                    [&](const std::vector<double>& x) {
                                      const PhasePoint z = PhasePoint::from_real({x.begin(), x.begin() + n},
                                                                                 {x.begin() + n, x.end()});
                                      const Matrix fz = f.eval(z);
                                      Vector b(size);
                                      for (int i = 0; i < size; ++i) b[i] = monomial_eval(spec.ctx(), spec.index(i), z);
                                      Matrix out(spec.dim(), spec.dim());
                                      for (int r = 0; r < size; ++r)
                                        for (int c = 0; c < size; ++c)
                                          out.block(r * d, c * d, d, d) = (std::conj(b[r]) * b[c]) * fz;
                                      return out;
                                    });
}

Matrix quadrature_assembly(const Symbol& f, const TruncationSpec& spec, const QuadratureSpec& q, Provenance& prov) {
  constexpr double kSampleBudget = 1 << 22;
  if (spec.n() == 1) {
    int n_theta = q.angular ? q.angular : next_pow2(2 * spec.cutoff() + 8);
    int n_r = q.radial ? q.radial : spec.cutoff() / 2 + 8;
    Matrix prev = polar_assembly(f, spec, n_theta, n_r);
    for (;;) {
      n_theta *= 2;
      n_r *= 2;
      if (n_theta > q.cap || n_r > q.cap || static_cast<double>(n_theta) * n_r > kSampleBudget)
        fail(ErrorKind::Accuracy, "Toeplitz quadrature for '" + f.label() + "' did not converge within the node cap");
      Matrix next = polar_assembly(f, spec, n_theta, n_r);
      const double change = quad::max_abs(next - prev) / std::max(1.0, quad::max_abs(next));
      prev = std::move(next);
      if (change < q.tolerance) break;
    }
    prov.angular = n_theta;
    prov.radial = n_r;
    return prev;
  }
  const int cap = quad::tensor_node_cap(2 * spec.n());
  const int start = std::min(q.radial ? q.radial : spec.cutoff() + 4, cap / 2);
  const auto conv = quad::converge_nodes(start, cap, q.tolerance,
                                         [&](int nodes) { return tensor_assembly(f, spec, nodes); },
                                         "Toeplitz tensor quadrature");
  prov.radial = conv.nodes;
  return conv.value;
}

Polynomial coordinate(const TruncationSpec& spec, int j, bool conjugate) {
  require(j >= 0 && j < spec.n(), ErrorKind::Parameter, "coordinate index out of range");
  Polynomial p(spec.n(), spec.d());
  const MultiIndex unit = MultiIndex::unit(spec.n(), j), zero(spec.n());
  if (conjugate)
    p.add_term(zero, unit, 1.0);
  else
    p.add_term(unit, zero, 1.0);
  return p;
}

int interior_degree(const TruncationSpec& spec) { return spec.cutoff() / 2; }

}  // namespace

TruncatedOperator assemble_toeplitz(const Symbol& f, const TruncationSpec& spec, const QuadratureSpec& q) {
  q.validate();
  require(f.n() == spec.n() && f.d() == spec.d(), ErrorKind::Parameter,
          "symbol '" + f.label() + "' has shape (n=" + std::to_string(f.n()) + ", d=" + std::to_string(f.d()) +
              ") but the truncation expects (n=" + std::to_string(spec.n()) + ", d=" + std::to_string(spec.d()) + ")");
  guard_dimension(spec, q.max_dim);
  Provenance prov;
  prov.symbol = f.label();
  prov.tolerance = q.tolerance;
  const Polynomial* p = f.as_polynomial();
  const bool closed = q.method == AssemblyMethod::ClosedForm || (q.method == AssemblyMethod::Auto && p != nullptr);
  Matrix m;
  if (closed) {
    require(p != nullptr, ErrorKind::UnsupportedVariant, "closed-form assembly needs a polynomial symbol");
    prov.method = "closed-form";
    m = closed_form(*p, spec);
  } else {
    poly_bound_fit(f, 4.0, 200);
    prov.method = spec.n() == 1 ? "polar-quadrature" : "tensor-quadrature";
    m = quadrature_assembly(f, spec, q, prov);
  }
  return TruncatedOperator(spec, std::move(m), f.hermitian(), prov);
}

TruncatedOperator harmonic_oscillator(const TruncationSpec& spec) {
  Matrix m = Matrix::Zero(spec.dim(), spec.dim());
  const int d = spec.d();
  for (int i = 0; i < spec.size(); ++i)
    for (int k = 0; k < d; ++k) m(i * d + k, i * d + k) = spec.t() * (spec.index(i).degree() + spec.n());
  return TruncatedOperator(spec, std::move(m), true, Provenance{"harmonic-oscillator", "diagonal"});
}

BerezinValue berezin_transform(const TruncatedOperator& a, const PhasePoint& z) {
  const TruncationSpec& spec = a.spec();
  const auto k = coherent_coefficients(spec, z);
  const int d = spec.d();
  BerezinValue out;
  out.value = Matrix::Zero(d, d);
  for (int r = 0; r < spec.size(); ++r) {
    if (k.coeffs[r] == cplx{0.0, 0.0}) continue;
    for (int c = 0; c < spec.size(); ++c)
      out.value += (std::conj(k.coeffs[r]) * k.coeffs[c]) * a.matrix().block(r * d, c * d, d, d);
  }
  out.tail_mass = k.tail_mass;
  if (k.tail_mass > 1e-8) {
    std::ostringstream os;
    os << "coherent tail mass " << k.tail_mass << " beyond cutoff " << spec.cutoff() << " exceeds 1e-8";
    out.warning = os.str();
  }
  return out;
}

TruncatedOperator weyl_matrix(const TruncationSpec& spec, const PhasePoint& w) {
  require(w.dim() == spec.n(), ErrorKind::Parameter, "Weyl shift has wrong dimension");
  const TruncationSpec scalar = spec.with_internal_dim(1);
  Polynomial gen(spec.n(), 1);
  const double two_t = 2.0 * spec.t();
  const MultiIndex zero(spec.n());
  for (int j = 0; j < spec.n(); ++j) {
    gen.add_term(MultiIndex::unit(spec.n(), j), zero, std::conj(w[j]) / two_t);
    gen.add_term(zero, MultiIndex::unit(spec.n(), j), -w[j] / two_t);
  }
  const Matrix g = closed_form(gen, scalar);
  // g is skew-hermitian: exp(g) = V exp(-i L) V^* with i g = V L V^*
  Eigen::SelfAdjointEigenSolver<Matrix> es(cplx{0.0, 1.0} * g);
  require(es.info() == Eigen::Success, ErrorKind::Accuracy, "eigendecomposition of the Weyl generator failed");
  Vector phases(es.eigenvalues().size());
  for (int i = 0; i < phases.size(); ++i) phases[i] = std::polar(1.0, -es.eigenvalues()[i]);
  const Matrix& v = es.eigenvectors();
  Matrix u = v * phases.asDiagonal() * v.adjoint();
  if (spec.d() > 1) {
    const int d = spec.d();
    Matrix big = Matrix::Zero(spec.dim(), spec.dim());
    for (int r = 0; r < scalar.size(); ++r)
      for (int c = 0; c < scalar.size(); ++c)
        if (u(r, c) != cplx{0.0, 0.0}) big.block(r * d, c * d, d, d) = u(r, c) * Matrix::Identity(d, d);
    u = std::move(big);
  }
  return TruncatedOperator(spec, std::move(u), false, Provenance{"weyl", "eigendecomposition"});
}

double interior_residual(const TruncationSpec& spec, const Matrix& a, const Matrix& b, int max_degree) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::Spec, "residual operands differ in size");
  if (max_degree < 0) return 0.0;
  const int rows = spec.degree_start(std::min(max_degree, spec.cutoff()) + 1) * spec.d();
  return quad::max_abs((a - b).topLeftCorner(rows, rows));
}

double weyl_relation_check(const TruncationSpec& spec, const PhasePoint& w, const PhasePoint& z, int phase_sign) {
  const Matrix lhs = weyl_matrix(spec, w).matrix() * weyl_matrix(spec, z).matrix();
  const cplx phase = std::polar(1.0, phase_sign * symplectic_form(w, z) / (2.0 * spec.t()));
  const Matrix rhs = phase * weyl_matrix(spec, z + w).matrix();
  return interior_residual(spec, lhs, rhs, interior_degree(spec));
}

double covariance_check(const Symbol& f, const TruncationSpec& spec, const PhasePoint& z) {
  const Polynomial* p = f.as_polynomial();
  require(p != nullptr, ErrorKind::UnsupportedVariant, "covariance check needs a polynomial symbol");
  const Matrix tf = assemble_toeplitz(f, spec).matrix();
  const Matrix lhs = weyl_matrix(spec, -z).matrix() * tf * weyl_matrix(spec, z).matrix();
  const Matrix rhs = assemble_toeplitz(Symbol::polynomial(p->translate(z)), spec).matrix();
  return interior_residual(spec, lhs, rhs, interior_degree(spec));
}

double rotation_covariance_check(const Symbol& f, const TruncationSpec& spec, double theta) {
  const Polynomial* p = f.as_polynomial();
  require(p != nullptr, ErrorKind::UnsupportedVariant, "rotation check needs a polynomial symbol");
  const Matrix tf = assemble_toeplitz(f, spec).matrix();
  Vector u(spec.dim());
  for (int i = 0; i < spec.size(); ++i)
    for (int k = 0; k < spec.d(); ++k) u[i * spec.d() + k] = std::polar(1.0, theta * (spec.index(i).degree() + spec.n()));
  const Matrix lhs = u.asDiagonal() * tf * u.conjugate().asDiagonal();
  const Matrix rhs = assemble_toeplitz(Symbol::polynomial(p->rotate(theta)), spec).matrix();
  return quad::max_abs(lhs - rhs);
}

TruncatedOperator form_derivative(const TruncatedOperator& a, int j, bool conjugate) {
  const TruncationSpec& spec = a.spec();
  const Matrix tz = closed_form(coordinate(spec, j, !conjugate), spec);
  const double scale = (conjugate ? 1.0 : -1.0) / (2.0 * spec.t());
  Matrix m = scale * (a.matrix() * tz - tz * a.matrix());
  return TruncatedOperator(spec, std::move(m), false,
                           Provenance{a.provenance().symbol, conjugate ? "form-derivative-bar" : "form-derivative"});
}

IntegralRepresentation integral_representation_check(const Symbol& f, const TruncationSpec& spec, const Vector& g,
                                                     const PhasePoint& z) {
  require(g.size() == spec.dim(), ErrorKind::Parameter, "coefficient vector length does not match the truncation");
  const int d = spec.d();
  const int n = spec.n();
  const int support = spec.degree_start(interior_degree(spec) + 1) * d;
  require(g.tail(g.size() - support).cwiseAbs().maxCoeff() == 0.0 || g.size() == support, ErrorKind::Parameter,
          "integral representation check needs g supported in degrees <= M/2");

  auto series = [&](const Vector& c, const PhasePoint& w) {
    Vector v = Vector::Zero(d);
    for (int i = 0; i < spec.size(); ++i) {
      const auto blk = c.segment(i * d, d);
      if (blk.cwiseAbs().maxCoeff() == 0.0) continue;
      v += monomial_eval(spec.ctx(), spec.index(i), w) * blk;
    }
    return v;
  };

  IntegralRepresentation out;
  const TruncatedOperator a = assemble_toeplitz(f, spec);
  out.left = series(a.matrix() * g, z);

  // importance rule: centre z/3, variance 4t/3 per real axis
  const double t = spec.t();
  const double sigma2 = 4.0 * t / 3.0;
  const PhasePoint centre = z * cplx{1.0 / 3.0, 0.0};
  const auto compute = [&](int nodes) {
    return quad::gaussian_expectation(2 * n, nodes, centre.to_real(), std::sqrt(sigma2), [&](const std::vector<double>& x) {
      const PhasePoint w = PhasePoint::from_real({x.begin(), x.begin() + n}, {x.begin() + n, x.end()});
      const double log_factor = (w.norm2() + z.norm2()) / (4.0 * t) - w.norm2() / (2.0 * t) +
                                (w - centre).norm2() / (2.0 * sigma2) + n * std::log(sigma2 / t);
      const Matrix kernel = off_diagonal_heat(f, t, w, z);
      return Matrix(std::exp(log_factor) * (kernel * series(g, w)));
    });
  };
  const int cap = quad::tensor_node_cap(2 * n);
  out.right = quad::converge_nodes(std::min(16, cap / 2), cap, 1e-9, compute, "integral representation").value;
  out.residual = (out.left - out.right).cwiseAbs().maxCoeff();
  return out;
}

double operator_norm(const TruncatedOperator& a) {
  if (a.dim() == 0) return 0.0;
  if (a.hermitian()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<Matrix> svd(a.matrix());
  return svd.singularValues()(0);
}

Eigen::VectorXd eigenvalues(const TruncatedOperator& a) {
  require(a.hermitian(), ErrorKind::Parameter, "eigenvalues requested for a non-hermitian operator");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix(), Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, ErrorKind::Accuracy, "hermitian eigensolver failed");
  return es.eigenvalues();
}

// ------------------------------------------------------------------- export

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void export_operator(const TruncatedOperator& a, const std::string& base) {
  const auto& spec = a.spec();
  const auto& pv = a.provenance();
  const std::string csv_name = base.substr(base.find_last_of('/') + 1) + ".csv";
  nlohmann::ordered_json head = {
      {"format", "btq-operator"},
      {"version", 1},
      {"n", spec.n()},
      {"t", spec.t()},
      {"d", spec.d()},
      {"cutoff", spec.cutoff()},
      {"dim", spec.dim()},
      {"hermitian", a.hermitian()},
      {"provenance",
       {{"symbol", pv.symbol},
        {"method", pv.method},
        {"angular", pv.angular},
        {"radial", pv.radial},
        {"tolerance", pv.tolerance},
        {"hermitian_deviation", pv.hermitian_deviation}}},
      {"entries", csv_name}};
  {
    std::ofstream js(base + ".json");
    require(static_cast<bool>(js), ErrorKind::Io, "cannot write " + base + ".json");
    js << head.dump(2) << '\n';
  }
  std::ofstream csv(base + ".csv");
  require(static_cast<bool>(csv), ErrorKind::Io, "cannot write " + base + ".csv");
  csv << "row,col,re,im\n";
  const Matrix& m = a.matrix();
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < m.rows(); ++r)
      if (m(r, c) != cplx{0.0, 0.0})
        csv << r << ',' << c << ',' << fmt17(m(r, c).real()) << ',' << fmt17(m(r, c).imag()) << '\n';
  require(static_cast<bool>(csv), ErrorKind::Io, "write failed for " + base + ".csv");
}

TruncatedOperator import_operator(const std::string& base) {
  std::ifstream js(base + ".json");
  require(static_cast<bool>(js), ErrorKind::Io, "cannot read " + base + ".json");
  nlohmann::json head;
  try {
    js >> head;
  } catch (const std::exception& e) {
    fail(ErrorKind::Io, base + ".json is not valid JSON: " + e.what());
  }
  require(head.value("format", "") == "btq-operator" && head.value("version", 0) == 1, ErrorKind::Io,
          base + ".json is not a version-1 operator export");
  const TruncationSpec spec(QuantizationContext(head.at("n").get<int>(), head.at("t").get<double>(), head.at("d").get<int>()),
                            head.at("cutoff").get<int>());
  require(head.at("dim").get<int>() == spec.dim(), ErrorKind::Io, "operator header dimension is inconsistent");
  Matrix m = Matrix::Zero(spec.dim(), spec.dim());
  std::ifstream csv(base + ".csv");
  require(static_cast<bool>(csv), ErrorKind::Io, "cannot read " + base + ".csv");
  std::string line;
  std::getline(csv, line);
  require(line == "row,col,re,im", ErrorKind::Io, base + ".csv has an unexpected header");
  int lineno = 1;
  while (std::getline(csv, line)) {
    ++lineno;
    if (line.empty()) continue;
    int r = -1, c = -1;
    double re = 0.0, im = 0.0;
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream ls(line);
    ls >> r >> c1 >> c >> c2 >> re >> c3 >> im;
    require(ls && c1 == ',' && c2 == ',' && c3 == ',' && r >= 0 && c >= 0 && r < spec.dim() && c < spec.dim(),
            ErrorKind::Io, base + ".csv line " + std::to_string(lineno) + " is malformed");
    m(r, c) = cplx{re, im};
  }
  Provenance pv;
  if (head.contains("provenance")) {
    const auto& p = head["provenance"];
    pv.symbol = p.value("symbol", "");
    pv.method = p.value("method", "");
    pv.angular = p.value("angular", 0);
    pv.radial = p.value("radial", 0);
    pv.tolerance = p.value("tolerance", 0.0);
  }
  return TruncatedOperator(spec, std::move(m), head.at("hermitian").get<bool>(), pv);
}

}  // namespace btq
