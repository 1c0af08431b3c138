#include <fstream>
#include <sstream>

#include "btq/errors.hpp"
#include "btq_cli.hpp"

namespace btq::cli {

namespace {

Matrix complex_matrix(const json& re, const json* im, const std::string& what) {
  const int rows = static_cast<int>(re.size());
  Matrix m(rows, rows);
  for (int i = 0; i < rows; ++i) {
    require(re[i].size() == static_cast<size_t>(rows), ErrorKind::Parameter, what + ": matrix must be square");
    if (im)
      require((*im).size() == static_cast<size_t>(rows) && (*im)[i].size() == static_cast<size_t>(rows), ErrorKind::Parameter,
              what + ": real and imaginary parts differ in shape");
    for (int j = 0; j < rows; ++j) m(i, j) = cplx{re[i][j].get<double>(), im ? (*im)[i][j].get<double>() : 0.0};
  }
  return m;
}

json matrix_part(const Matrix& m, bool imag) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    out.push_back(row);
  }
  return out;
}

json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot read " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parameter, p.string() + " is not valid JSON: " + e.what());
  }
}

}  // namespace

Symbol symbol_from_json(const json& spec, int n, const std::filesystem::path& base_dir) {
  if (spec.is_string()) {
    const std::filesystem::path p = base_dir / spec.get<std::string>();
    const json doc = read_json_file(p);
    const json wrapped = {{"$ref", "#/definitions/symbol"}, {"definitions", run_config_schema()["definitions"]}};
    const auto errs = schema_errors(wrapped, doc);
    if (!errs.empty()) fail(ErrorKind::Parameter, "symbol file " + p.string() + " is invalid: " + errs.front());
    return symbol_from_json(doc, n, p.parent_path());
  }
  require(spec.is_object(), ErrorKind::Parameter, "symbol must be an object or a file path");
  const int sn = spec.value("n", n);
  Symbol f = Symbol::identity();
  if (spec.contains("builtin")) {
    const auto name = builtin_from_string(spec["builtin"].get<std::string>());
    require(name.has_value(), ErrorKind::Parameter, "unknown built-in symbol " + spec["builtin"].dump());
    f = Symbol::from_builtin(*name, spec.value("params", std::vector<double>{}), sn);
  } else if (spec.contains("constant")) {
    const json& c = spec["constant"];
    f = Symbol::constant(complex_matrix(c["re"], c.contains("im") ? &c["im"] : nullptr, "constant symbol"), sn);
  } else {
    const json& terms = spec["terms"];
    require(!terms.empty() || spec.contains("d"), ErrorKind::Parameter, "an empty polynomial needs an explicit d");
    const int d = spec.contains("d") ? spec["d"].get<int>() : static_cast<int>(terms[0]["re"].size());
    const int pn = spec.contains("n") ? sn : terms.empty() ? n : static_cast<int>(terms[0]["a"].size());
    Polynomial p(pn, d);
    for (size_t k = 0; k < terms.size(); ++k) {
      const json& tm = terms[k];
      const std::string what = "polynomial term " + std::to_string(k);
      const auto a = tm["a"].get<std::vector<int>>();
      const auto b = tm["b"].get<std::vector<int>>();
      require(static_cast<int>(a.size()) == pn && static_cast<int>(b.size()) == pn, ErrorKind::Parameter,
              what + ": exponents must have length n = " + std::to_string(pn));
      const Matrix c = complex_matrix(tm["re"], tm.contains("im") ? &tm["im"] : nullptr, what);
      require(c.rows() == d, ErrorKind::Parameter, what + ": coefficient must be " + std::to_string(d) + " x " + std::to_string(d));
      p.add_term(MultiIndex(a), MultiIndex(b), c);
    }
    f = Symbol::polynomial(std::move(p));
  }
  if (spec.contains("label")) f = f.with_label(spec["label"].get<std::string>());
  return f;
}

json symbol_to_json(const Symbol& f) {
  json out = json::object();
  if (f.builtin()) {
    out["builtin"] = to_string(*f.builtin());
    out["params"] = f.params();
    out["n"] = f.n();
    return out;
  }
  const Polynomial* p = f.as_polynomial();
  require(p != nullptr, ErrorKind::UnsupportedVariant, "only polynomial and built-in symbols serialize; '" + f.label() + "' is neither");
  out["n"] = f.n();
  out["d"] = f.d();
  json terms = json::array();
  for (const auto& [ab, c] : p->terms())
    terms.push_back({{"a", ab.a.entries()}, {"b", ab.b.entries()}, {"re", matrix_part(c, false)}, {"im", matrix_part(c, true)}});
  out["terms"] = terms;
  out["label"] = f.label();
  return out;
}

json RunConfig::echo() const {
  static const char* methods[] = {"auto", "closed-form", "quadrature"};
  json j = json::object();
  j["schema_version"] = 1;
  j["command"] = command;
  j["ctx"] = {{"n", ctx.n}, {"t", ctx.t}, {"d", ctx.d}};
  if (!symbol.is_null()) j["symbol"] = symbol;
  j["cutoff"] = cutoff;
  j["quadrature"] = {{"angular", quadrature.angular},
                     {"radial", quadrature.radial},
                     {"tolerance", quadrature.tolerance},
                     {"cap", quadrature.cap},
                     {"method", methods[static_cast<int>(quadrature.method)]},
                     {"max_dim", quadrature.max_dim}};
  j["params"] = params;
  if (!output.empty()) j["output"] = output;
  j["seed"] = seed;
  return j;
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  const auto errs = schema_errors(run_config_schema(), doc);
  if (!errs.empty()) {
    std::ostringstream os;
    os << "configuration does not match schema btq/run_config/1:";
    for (const auto& e : errs) os << "\n  " << e;
    fail(ErrorKind::Parameter, os.str());
  }
  RunConfig c;
  c.base_dir = base_dir;
  c.command = doc["command"].get<std::string>();
  if (doc.contains("ctx")) {
    const json& x = doc["ctx"];
    c.ctx = QuantizationContext(x.value("n", 1), x.value("t", 0.5), x.value("d", 1));
    c.ctx_n_given = x.contains("n");
    c.ctx_d_given = x.contains("d");
  }
  if (doc.contains("symbol")) c.symbol = doc["symbol"];
  c.cutoff = doc.value("cutoff", 40);
  if (doc.contains("quadrature")) {
    const json& q = doc["quadrature"];
    c.quadrature.angular = q.value("angular", c.quadrature.angular);
    c.quadrature.radial = q.value("radial", c.quadrature.radial);
    c.quadrature.tolerance = q.value("tolerance", c.quadrature.tolerance);
    c.quadrature.cap = q.value("cap", c.quadrature.cap);
    c.quadrature.max_dim = q.value("max_dim", c.quadrature.max_dim);
    const std::string m = q.value("method", std::string("auto"));
    c.quadrature.method = m == "closed-form" ? AssemblyMethod::ClosedForm
                          : m == "quadrature" ? AssemblyMethod::Quadrature
                                              : AssemblyMethod::Auto;
  }
  if (doc.contains("params")) c.params = doc["params"];
  c.output = doc.value("output", std::string());
  c.seed = doc.value("seed", std::uint64_t{0});
  c.ctx.validate();
  c.quadrature.validate();
  return c;
}

}  // namespace btq::cli
