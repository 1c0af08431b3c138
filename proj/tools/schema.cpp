#include <cmath>

#include "btq/errors.hpp"
#include "btq_cli.hpp"
#include "btq_schemas.hpp"

namespace btq::cli {

namespace {

bool has_type(const json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "number") return v.is_number();
  if (type == "integer") {
    if (v.is_number_integer()) return true;
    return v.is_number_float() && std::floor(v.get<double>()) == v.get<double>();
  }
  return false;
}

class Validator {
 public:
  explicit Validator(const json& root) : root_(root) {}

  void check(const json& s, const json& v, const std::string& at, std::vector<std::string>& errs) const {
    if (s.is_boolean()) {
      if (!s.get<bool>()) errs.push_back(at + ": not allowed");
      return;
    }
    if (s.contains("$ref")) {
      check(resolve(s["$ref"].get<std::string>()), v, at, errs);
      return;
    }
    if (s.contains("type")) {
      const json& t = s["type"];
      bool ok = false;
      if (t.is_string())
        ok = has_type(v, t.get<std::string>());
      else
        for (const auto& alt : t) ok = ok || has_type(v, alt.get<std::string>());
      if (!ok) {
        errs.push_back(at + ": expected type " + t.dump());
        return;
      }
    }
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s["enum"]) found = found || e == v;
      if (!found) errs.push_back(at + ": value " + v.dump() + " not in " + s["enum"].dump());
    }
    if (v.is_number()) {
      const double x = v.get<double>();
      if (s.contains("minimum") && x < s["minimum"].get<double>())
        errs.push_back(at + ": must be >= " + s["minimum"].dump());
      if (s.contains("maximum") && x > s["maximum"].get<double>())
        errs.push_back(at + ": must be <= " + s["maximum"].dump());
      if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>())
        errs.push_back(at + ": must be > " + s["exclusiveMinimum"].dump());
      if (s.contains("exclusiveMaximum") && x >= s["exclusiveMaximum"].get<double>())
        errs.push_back(at + ": must be < " + s["exclusiveMaximum"].dump());
    }
    if (v.is_string() && s.contains("minLength") && v.get<std::string>().size() < s["minLength"].get<size_t>())
      errs.push_back(at + ": string shorter than " + s["minLength"].dump());
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s["minItems"].get<size_t>())
        errs.push_back(at + ": fewer than " + s["minItems"].dump() + " items");
      if (s.contains("maxItems") && v.size() > s["maxItems"].get<size_t>())
        errs.push_back(at + ": more than " + s["maxItems"].dump() + " items");
      if (s.contains("items"))
        for (size_t i = 0; i < v.size(); ++i) check(s["items"], v[i], at + "/" + std::to_string(i), errs);
    }
    if (v.is_object()) {
      if (s.contains("required"))
        for (const auto& r : s["required"])
          if (!v.contains(r.get<std::string>())) errs.push_back(at + ": missing required property \"" + r.get<std::string>() + "\"");
      const json* props = s.contains("properties") ? &s["properties"] : nullptr;
      for (const auto& [key, val] : v.items()) {
        if (props && props->contains(key)) {
          check((*props)[key], val, at + "/" + key, errs);
        } else if (s.contains("additionalProperties")) {
          const json& ap = s["additionalProperties"];
          if (ap.is_boolean() && !ap.get<bool>())
            errs.push_back(at + ": unknown property \"" + key + "\"");
          else if (ap.is_object())
            check(ap, val, at + "/" + key, errs);
        }
      }
    }
    if (s.contains("oneOf")) {
      int matches = 0;
      for (const auto& alt : s["oneOf"]) {
        std::vector<std::string> sub;
        check(alt, v, at, sub);
        matches += sub.empty() ? 1 : 0;
      }
      if (matches != 1) errs.push_back(at + ": must match exactly one alternative, matched " + std::to_string(matches));
    }
    if (s.contains("anyOf")) {
      bool any = false;
      for (const auto& alt : s["anyOf"]) {
        std::vector<std::string> sub;
        check(alt, v, at, sub);
        any = any || sub.empty();
      }
      if (!any) errs.push_back(at + ": matches no alternative");
    }
  }

 private:
  const json& resolve(const std::string& ref) const {
    const std::string prefix = "#/definitions/";
    require(ref.rfind(prefix, 0) == 0, ErrorKind::Parameter, "unsupported schema reference " + ref);
    const std::string name = ref.substr(prefix.size());
    require(root_.contains("definitions") && root_["definitions"].contains(name), ErrorKind::Parameter,
            "unresolved schema reference " + ref);
    return root_["definitions"][name];
  }

  const json& root_;
};

}  // namespace

std::vector<std::string> schema_errors(const json& schema, const json& doc) {
  std::vector<std::string> errs;
  Validator(schema).check(schema, doc, "", errs);
  for (auto& e : errs)
    if (e.front() == ':') e = "(root)" + e;
  return errs;
}

const json& run_config_schema() {
  static const json s = json::parse(schemas::kRunConfig);
  return s;
}

const json& manifest_schema() {
  static const json s = json::parse(schemas::kManifest);
  return s;
}

const json& operator_schema() {
  static const json s = json::parse(schemas::kOperator);
  return s;
}

}  // namespace btq::cli
