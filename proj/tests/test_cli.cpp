#include <fstream>
#include <set>
#include <sstream>

#include "btq_cli.hpp"
#include "doctest.h"

using namespace btq;
using namespace btq::cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("btq_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

struct Outcome {
  int code;
  fs::path dir;
  std::string out;
  std::string err;
};

Outcome run_config(const std::string& name, const std::string& command, const json& config, Overrides ov = {}) {
  const fs::path base = fresh_dir(name);
  const fs::path cfg = base / "config.in.json";
  std::ofstream(cfg) << config.dump();
  if (!ov.out) ov.out = (base / "run").string();
  std::ostringstream out, err;
  const int code = run(command, cfg, ov, out, err);
  return {code, fs::path(*ov.out), out.str(), err.str()};
}

void require_valid_manifest(const fs::path& dir) {
  const json m = load(dir / "manifest.json");
  const auto errs = schema_errors(manifest_schema(), m);
  CHECK_MESSAGE(errs.empty(), (errs.empty() ? std::string() : errs.front()));
  for (const auto& f : m["outputs"]) CHECK(fs::exists(dir / f["file"].get<std::string>()));
}

}  // namespace

TEST_CASE("schema validator covers the keywords the shipped schemas use") {
  const json schema = json::parse(R"({
    "type": "object", "required": ["a"], "additionalProperties": false,
    "properties": {
      "a": {"type": "integer", "minimum": 1, "maximum": 3},
      "b": {"type": "string", "enum": ["x", "y"]},
      "c": {"type": "array", "minItems": 1, "maxItems": 2, "items": {"$ref": "#/definitions/pos"}},
      "d": {"oneOf": [{"type": "string"}, {"type": "number"}]},
      "e": {"type": "number", "exclusiveMinimum": 0}
    },
    "definitions": {"pos": {"type": "number", "exclusiveMinimum": 0}}
  })");
  CHECK(schema_errors(schema, json::parse(R"({"a": 2, "b": "x", "c": [1.5], "d": "s", "e": 1})")).empty());
  CHECK(schema_errors(schema, json::parse(R"({"a": 2.0})")).empty());

  auto one = [&](const char* doc) {
    const auto errs = schema_errors(schema, json::parse(doc));
    REQUIRE(errs.size() == 1);
    return errs.front();
  };
  CHECK(one(R"({})") == "(root): missing required property \"a\"");
  CHECK(one(R"({"a": 2.5})").rfind("/a: expected type", 0) == 0);
  CHECK(one(R"({"a": 4})") == "/a: must be <= 3");
  CHECK(one(R"({"a": 0})") == "/a: must be >= 1");
  CHECK(one(R"({"a": 1, "b": "z"})").rfind("/b: value", 0) == 0);
  CHECK(one(R"({"a": 1, "c": []})") == "/c: fewer than 1 items");
  CHECK(one(R"({"a": 1, "c": [1, 2, 3]})") == "/c: more than 2 items");
  CHECK(one(R"({"a": 1, "c": [-1]})") == "/c/0: must be > 0");
  CHECK(one(R"({"a": 1, "d": true})").find("exactly one") != std::string::npos);
  CHECK(one(R"({"a": 1, "e": 0})") == "/e: must be > 0");
  CHECK(one(R"({"a": 1, "zz": 0})") == "(root): unknown property \"zz\"");
}

TEST_CASE("shipped schemas parse and accept minimal documents") {
  CHECK(run_config_schema().contains("definitions"));
  CHECK(schema_errors(run_config_schema(), json::parse(R"({"command": "quantize"})")).empty());
  CHECK_FALSE(schema_errors(run_config_schema(), json::parse(R"({"command": "plot"})")).empty());
  CHECK_FALSE(schema_errors(run_config_schema(), json::parse(R"({"command": "heat", "ctx": {"t": 0}})")).empty());
  CHECK_FALSE(schema_errors(run_config_schema(), json::parse(R"({"command": "heat", "extra": 1})")).empty());
  CHECK(operator_schema().is_object());
  CHECK(manifest_schema().is_object());
}

TEST_CASE("run config defaults") {
  const RunConfig c = parse_config(json::parse(R"({"command": "heat"})"), ".");
  CHECK(c.ctx.t == 0.5);
  CHECK(c.ctx.n == 1);
  CHECK(c.cutoff == 40);
  CHECK(c.seed == 0);
  CHECK_FALSE(c.ctx_n_given);
  const json e = c.echo();
  CHECK(e["cutoff"] == 40);
  CHECK(e["quadrature"]["method"] == "auto");
  CHECK(schema_errors(run_config_schema(), e).empty());
  CHECK_THROWS_AS(parse_config(json::parse(R"({"command": "heat", "cutoff": -2})"), "."), Error);
}

TEST_CASE("symbol documents round trip") {
  SUBCASE("polynomial with complex matrix coefficients") {
    const json doc = json::parse(R"({
      "n": 2, "d": 2, "label": "mixed",
      "terms": [
        {"a": [1, 0], "b": [0, 1], "re": [[1, 0], [0, -1]], "im": [[0, 2], [-2, 0]]},
        {"a": [0, 0], "b": [0, 0], "re": [[0.5, 0], [0, 0.5]]}
      ]})");
    const Symbol f = symbol_from_json(doc, 1, ".");
    CHECK(f.n() == 2);
    CHECK(f.d() == 2);
    CHECK(f.label() == "mixed");
    const Symbol g = symbol_from_json(symbol_to_json(f), 1, ".");
    const PhasePoint z(std::vector<cplx>{{0.3, -0.2}, {1.1, 0.4}});
    CHECK((f.eval(z) - g.eval(z)).norm() < 1e-15);
    CHECK(g.label() == "mixed");
  }
  SUBCASE("built-in") {
    const Symbol f = symbol_from_json(json::parse(R"({"builtin": "RelativisticKinetic", "params": [1.0, 0.5]})"), 1, ".");
    const json j = symbol_to_json(f);
    CHECK(j["builtin"] == "RelativisticKinetic");
    const Symbol g = symbol_from_json(j, 1, ".");
    const PhasePoint z(std::vector<cplx>{{0.7, -1.3}});
    CHECK(std::abs(f.eval(z)(0, 0) - g.eval(z)(0, 0)) < 1e-15);
  }
  SUBCASE("constant and file reference") {
    const fs::path dir = fresh_dir("symbol_file");
    std::ofstream(dir / "diag.json") << R"({"constant": {"re": [[1, 0], [0, -1]]}, "n": 1})";
    const Symbol f = symbol_from_json(json("diag.json"), 1, dir);
    CHECK(f.d() == 2);
    CHECK(f.eval(PhasePoint(1))(1, 1) == cplx{-1.0, 0.0});
    std::ofstream(dir / "broken.json") << R"({"constant": {"im": [[1]]}})";
    CHECK_THROWS_AS(symbol_from_json(json("broken.json"), 1, dir), Error);
    CHECK_THROWS_AS(symbol_from_json(json("missing.json"), 1, dir), Error);
  }
  SUBCASE("shape errors") {
    CHECK_THROWS_AS(symbol_from_json(json::parse(R"({"terms": [{"a": [1], "b": [0], "re": [[1, 0]]}]})"), 1, "."), Error);
    CHECK_THROWS_AS(symbol_from_json(json::parse(R"({"terms": [{"a": [1, 0], "b": [0], "re": [[1]]}]})"), 1, "."), Error);
    CHECK_THROWS_AS(symbol_from_json(json::parse(R"({"builtin": "Nope"})"), 1, "."), Error);
  }
  SUBCASE("callables do not serialize") {
    const Symbol f = Symbol::callable(1, 1, [](const PhasePoint&) { return Matrix(Matrix::Identity(1, 1)); }, true, "c");
    CHECK_THROWS_AS(symbol_to_json(f), Error);
  }
}

TEST_CASE("quantize writes the operator, spectrum and diagnostics") {
  SUBCASE("AbsSquared at M = 3 has spectrum 1, 2, 3, 4") {
    const auto o = run_config("quantize_abs", "quantize", json::parse(R"({"symbol": {"builtin": "AbsSquared"}, "cutoff": 3})"));
    REQUIRE(o.code == 0);
    const auto rows = csv_rows(o.dir / "spectrum.csv");
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == std::vector<std::string>{"index", "eigenvalue"});
    for (int m = 0; m < 4; ++m) CHECK(std::abs(std::stod(rows[m + 1][1]) - (m + 1)) < 1e-12);
    CHECK(fs::exists(o.dir / "operator.json"));
    CHECK(fs::exists(o.dir / "operator.csv"));
    CHECK(fs::exists(o.dir / "config.json"));
    const json op = load(o.dir / "operator.json");
    CHECK(schema_errors(operator_schema(), op).empty());
    require_valid_manifest(o.dir);
    const json m = load(o.dir / "manifest.json");
    CHECK(m["status"] == "ok");
    CHECK(m["results"]["positive_semidefinite"] == true);
  }
  SUBCASE("constant 1 has spectrum all ones") {
    const auto o = run_config("quantize_one", "quantize", json::parse(R"({"symbol": {"constant": {"re": [[1]]}}, "cutoff": 6})"));
    REQUIRE(o.code == 0);
    const auto rows = csv_rows(o.dir / "spectrum.csv");
    REQUIRE(rows.size() == 8);
    for (size_t i = 1; i < rows.size(); ++i) CHECK(std::abs(std::stod(rows[i][1]) - 1.0) < 1e-14);
  }
  SUBCASE("ShiftInteraction at d = 4, M = 20 is hermitian with a real spectrum") {
    const auto o = run_config("quantize_shift", "quantize",
                              json::parse(R"({"symbol": {"builtin": "ShiftInteraction", "params": [1, 0.5, 4]}, "cutoff": 20})"));
    REQUIRE(o.code == 0);
    const json m = load(o.dir / "manifest.json");
    CHECK(m["results"]["hermitian"] == true);
    CHECK(m["results"]["hermitian_deviation"].get<double>() <= 1e-9);
    CHECK(m["results"]["dim"] == 21 * 4);
    const auto rows = csv_rows(o.dir / "spectrum.csv");
    CHECK(rows[0] == std::vector<std::string>{"index", "eigenvalue"});
    CHECK(rows.size() == 85);
  }
  SUBCASE("a non-hermitian symbol reports complex eigenvalues") {
    const auto o = run_config("quantize_z", "quantize",
                              json::parse(R"({"symbol": {"terms": [{"a": [1], "b": [0], "re": [[1]]}]}, "cutoff": 4})"));
    REQUIRE(o.code == 0);
    CHECK(csv_rows(o.dir / "spectrum.csv")[0] == std::vector<std::string>{"index", "re", "im"});
  }
}

TEST_CASE("check exit codes follow the verdict") {
  SUBCASE("AbsSquared at s = 0 passes") {
    const auto o = run_config("check_abs", "check", json::parse(R"({"symbol": {"builtin": "AbsSquared"}, "params": {"s": 0}})"));
    CHECK(o.code == 0);
    const json m = load(o.dir / "manifest.json");
    CHECK(m["verdicts"]["main_theorem"] == true);
    CHECK(m["verdicts"]["theta_quadratic_bound"] == true);
    require_valid_manifest(o.dir);
  }
  SUBCASE("ReZCubed at s = 0.1 fails and names the derivative") {
    const auto o = run_config("check_cubic", "check", json::parse(R"({"symbol": {"builtin": "ReZCubed"}, "params": {"s": 0.1}})"));
    CHECK(o.code == 2);
    CHECK(o.out.find("offending: d/dz_1") != std::string::npos);
    const json rep = load(o.dir / "check.json");
    CHECK(rep["main_theorem"]["verdict"] == false);
    bool named = false;
    for (const auto& d : rep["main_theorem"]["derivatives"]) named = named || (d["name"] == "d/dz_1" && d["verdict"] == false);
    CHECK(named);
    const json m = load(o.dir / "manifest.json");
    CHECK(m["status"] == "fail");
    CHECK(m["exit_code"] == 2);
    require_valid_manifest(o.dir);
  }
  SUBCASE("SineRe at s = 0.125 passes") {
    const auto o = run_config("check_sine", "check", json::parse(R"({"symbol": {"builtin": "SineRe"}, "params": {"s": 0.125}})"));
    CHECK(o.code == 0);
    CHECK(csv_rows(o.dir / "derivatives.csv").size() == 3);
  }
  SUBCASE("s outside [0, t/2) is an error that quotes the hypothesis") {
    const auto o = run_config("check_bad_s", "check", json::parse(R"({"symbol": {"builtin": "AbsSquared"}, "params": {"s": 0.3}})"));
    CHECK(o.code == 1);
    CHECK(o.err.find("[0, t/2)") != std::string::npos);
    CHECK(fs::exists(o.dir / "FAILED"));
    const json e = load(o.dir / "error.json");
    CHECK(e["kind"] == "parameter");
    const json m = load(o.dir / "manifest.json");
    CHECK(m["status"] == "error");
    CHECK(m["error"]["kind"] == "parameter");
    require_valid_manifest(o.dir);
  }
}

TEST_CASE("bcverify on SineRe prints positive slack") {
  const auto o = run_config("bcverify_sine", "bcverify", json::parse(R"({"symbol": {"builtin": "SineRe"}, "params": {"s": 0.125}, "cutoff": 20})"));
  CHECK(o.code == 0);
  const auto rows = csv_rows(o.dir / "bcverify.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "berger_coburn");
  CHECK(std::stod(rows[1][2]) <= std::stod(rows[1][3]));
  CHECK(std::stod(rows[1][6]) > 0.0);
  CHECK(o.out.find("slack") != std::string::npos);
}

TEST_CASE("identities on AbsSquared at M = 40 pass") {
  const auto o = run_config("identities_abs", "identities", json::parse(R"({"symbol": {"builtin": "AbsSquared"}, "cutoff": 40})"));
  CHECK(o.code == 0);
  const auto rows = csv_rows(o.dir / "identities.csv");
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == std::vector<std::string>{"check", "case", "residual", "tolerance", "pass"});
  for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][4] == "true");
  const json m = load(o.dir / "manifest.json");
  for (const char* name : {"berezin_heat", "semigroup", "weyl_relation", "weyl_unitarity", "covariance",
                           "rotation_covariance", "form_derivative", "integral_representation"})
    CHECK(m["verdicts"][name] == true);
  // unbounded symbol
  CHECK_FALSE(m["verdicts"].contains("off_diagonal_decay"));
  CHECK(m["warnings"].size() >= 1);
}

TEST_CASE("identical config and seed give byte-identical CSVs") {
  const json cfg = json::parse(R"({"symbol": {"builtin": "SineRe"}, "cutoff": 12, "seed": 99, "params": {"pairs": 3}})");
  const auto a = run_config("determinism_a", "identities", cfg);
  const auto b = run_config("determinism_b", "identities", cfg, Overrides{std::nullopt, std::nullopt, 1});
  // M = 12 is too small for the Weyl relation tolerance, so the verdict may be FAIL; only the bytes matter here.
  REQUIRE(a.code != 1);
  REQUIRE(b.code == a.code);
  CHECK(slurp(a.dir / "identities.csv") == slurp(b.dir / "identities.csv"));
  const auto c = run_config("determinism_c", "identities", cfg, Overrides{std::nullopt, 100, std::nullopt});
  CHECK(slurp(a.dir / "identities.csv") != slurp(c.dir / "identities.csv"));
}

TEST_CASE("dynamics on the cubic ladder writes three leakage curves and an escape range") {
  const auto o = run_config("dynamics_cubic", "dynamics",
                            json::parse(R"({"symbol": {"builtin": "ReZCubed"}, "params": {"dynamics": {"cutoffs": [20, 40, 80]}}})"));
  REQUIRE(o.code == 0);
  std::set<std::string> cutoffs;
  const auto rows = csv_rows(o.dir / "leakage.csv");
  for (size_t i = 1; i < rows.size(); ++i) cutoffs.insert(rows[i][0]);
  CHECK(cutoffs == std::set<std::string>{"20", "40", "80"});
  const json m = load(o.dir / "manifest.json");
  const json& e = m["results"]["escape"];
  CHECK(e["escaped"] == true);
  CHECK(e["range"][0].get<double>() > 0.0);
  CHECK(e["range"][1].get<double>() >= e["range"][0].get<double>());
  CHECK(m["results"]["curves"].size() == 3);
  CHECK(csv_rows(o.dir / "classical.csv")[0] == std::vector<std::string>{"time", "x1", "xi1"});
  require_valid_manifest(o.dir);
}

TEST_CASE("heat and spectrum commands") {
  const auto h = run_config("heat_sine", "heat",
                            json::parse(R"({"symbol": {"builtin": "AbsSquared"}, "params": {"s": 0.25, "points": [[[0.5, 0.5]]]}})"));
  REQUIRE(h.code == 0);
  const auto rows = csv_rows(h.dir / "heat.csv");
  REQUIRE(rows.size() == 2);
  // |z|^2 + 2s
  CHECK(std::abs(std::stod(rows[1][5]) - 1.0) < 1e-12);
  const auto s = run_config("spectrum_abs", "spectrum", json::parse(R"({"symbol": {"builtin": "AbsSquared"}, "cutoff": 2})"));
  REQUIRE(s.code == 0);
  CHECK(csv_rows(s.dir / "spectrum.csv").size() == 4);
}

TEST_CASE("failures leave a marker and a machine-readable error") {
  SUBCASE("schema violation") {
    const auto o = run_config("fail_schema", "check", json::parse(R"({"symbol": {"builtin": "Nope"}, "cutoff": -1})"));
    CHECK(o.code == 1);
    CHECK(fs::exists(o.dir / "FAILED"));
    const json e = load(o.dir / "error.json");
    CHECK(e["format"] == "btq-error");
    CHECK(e["message"].get<std::string>().find("/cutoff: must be >= 0") != std::string::npos);
    CHECK(json::parse(o.err.substr(0, o.err.find('\n')))["kind"] == "parameter");
  }
  SUBCASE("command mismatch") {
    const auto o = run_config("fail_mismatch", "heat", json::parse(R"({"command": "check", "symbol": {"builtin": "AbsSquared"}})"));
    CHECK(o.code == 1);
    CHECK(o.err.find("'check'") != std::string::npos);
  }
  SUBCASE("ctx disagrees with the symbol") {
    const auto o = run_config("fail_ctx", "quantize", json::parse(R"({"ctx": {"n": 2}, "symbol": {"builtin": "ShiftInteraction", "params": [1, 0.5, 2]}})"));
    CHECK(o.code == 1);
    CHECK(fs::exists(o.dir / "FAILED"));
    require_valid_manifest(o.dir);
  }
  SUBCASE("a later success clears the marker") {
    const auto bad = run_config("fail_then_ok", "quantize", json::parse(R"({"cutoff": 3})"));
    CHECK(bad.code == 1);
    CHECK(fs::exists(bad.dir / "FAILED"));
    const fs::path cfg = bad.dir.parent_path() / "good.json";
    std::ofstream(cfg) << R"({"symbol": {"builtin": "AbsSquared"}, "cutoff": 3})";
    std::ostringstream out, err;
    CHECK(run("quantize", cfg, Overrides{bad.dir.string(), std::nullopt, std::nullopt}, out, err) == 0);
    CHECK_FALSE(fs::exists(bad.dir / "FAILED"));
    CHECK_FALSE(fs::exists(bad.dir / "error.json"));
  }
  SUBCASE("unreadable config") {
    const fs::path dir = fresh_dir("fail_missing");
    std::ostringstream out, err;
    CHECK(run("heat", dir / "nope.json", Overrides{(dir / "run").string(), std::nullopt, std::nullopt}, out, err) == 1);
    CHECK(fs::exists(dir / "run" / "FAILED"));
  }
}

TEST_CASE("report aggregates run manifests") {
  const fs::path base = fresh_dir("report");
  auto sub = [&](const std::string& name, const std::string& cmd, const char* cfg) {
    std::ofstream(base / (name + ".json")) << cfg;
    std::ostringstream out, err;
    return run(cmd, base / (name + ".json"), Overrides{(base / name).string(), std::nullopt, std::nullopt}, out, err);
  };
  CHECK(sub("pass", "check", R"({"symbol": {"builtin": "AbsSquared"}})") == 0);
  CHECK(sub("fail", "check", R"({"symbol": {"builtin": "ReZCubed"}, "params": {"s": 0.1}})") == 2);
  CHECK(sub("rep", "report", R"({"params": {"runs": ["pass", "fail", "absent"]}})") == 0);
  const auto rows = csv_rows(base / "rep" / "report.csv");
  int passes = 0, fails = 0, missing = 0;
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() > 5 && rows[i][5] == "PASS") ++passes;
    if (rows[i].size() > 5 && rows[i][5] == "FAIL") ++fails;
    if (rows[i][2] == "missing") ++missing;
  }
  CHECK(passes == 2);
  CHECK(fails == 2);
  CHECK(missing == 1);
  CHECK(fs::exists(base / "rep" / "report.md"));
}

TEST_CASE("command line parsing") {
  auto call = [](std::vector<std::string> args) {
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return main_entry(static_cast<int>(argv.size()), argv.data());
  };
  CHECK(call({"btq", "plot", "--config", "x.json"}) == 1);
  CHECK(call({"btq", "quantize"}) == 1);
  const fs::path dir = fresh_dir("argv");
  std::ofstream(dir / "q.json") << R"({"symbol": {"builtin": "AbsSquared"}, "cutoff": 2})";
  CHECK(call({"btq", "quantize", "--config", (dir / "q.json").string(), "--out", (dir / "run").string(), "--threads", "2",
              "--seed", "5"}) == 0);
  CHECK(load(dir / "run" / "manifest.json")["config"]["seed"] == 5);
}

TEST_CASE("written CSV headers match the published format document") {
  const json formats = load(fs::path(BTQ_SCHEMA_DIR) / "csv_formats.json")["files"];
  const fs::path base = fresh_dir("formats");
  auto go = [&](const std::string& cmd, const std::string& cfg) {
    std::ofstream(base / (cmd + ".json")) << cfg;
    std::ostringstream out, err;
    return run(cmd, base / (cmd + ".json"), Overrides{(base / cmd).string(), std::nullopt, std::nullopt}, out, err);
  };
  CHECK(go("quantize", R"({"symbol": {"builtin": "AbsSquared"}, "cutoff": 4})") == 0);
  CHECK(go("check", R"({"symbol": {"builtin": "AbsSquared"}})") == 0);
  CHECK(go("bcverify", R"({"symbol": {"builtin": "SineRe"}, "cutoff": 8})") == 0);
  CHECK(go("dynamics", R"({"symbol": {"builtin": "AbsSquared"}, "params": {"dynamics": {"total_time": 0.1, "cutoffs": [10]}}})") == 0);
  CHECK(go("report", R"({"params": {"runs": ["quantize"]}})") == 0);
  int seen = 0;
  for (const auto& dir : fs::directory_iterator(base)) {
    if (!dir.is_directory()) continue;
    for (const auto& file : fs::directory_iterator(dir.path())) {
      if (file.path().extension() != ".csv") continue;
      const std::string name = file.path().filename().string();
      INFO(name);
      REQUIRE(formats.contains(name));
      const auto header = csv_rows(file.path())[0];
      const json& f = formats[name];
      if (f.contains("column_pattern")) {
        const auto fixed = f["columns"].get<std::vector<std::string>>();
        CHECK(std::equal(fixed.begin(), fixed.end(), header.begin()));
      } else {
        CHECK((header == f["columns"].get<std::vector<std::string>>() ||
               (f.contains("alternate_columns") && header == f["alternate_columns"].get<std::vector<std::string>>())));
      }
      ++seen;
    }
  }
  CHECK(seen == 7);
}
