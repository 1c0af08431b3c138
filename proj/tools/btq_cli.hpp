#pragma once

// Batch front end: run configurations, command dispatch and run records.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "btq/core.hpp"
#include "btq/symbol.hpp"
#include "btq/toeplitz.hpp"
#include "json.hpp"

namespace btq::cli {

using json = nlohmann::ordered_json;

extern const char* const kToolVersion;

// Draft-07 subset: type, enum, minimum, maximum, exclusiveMinimum,
// exclusiveMaximum, minLength, minItems, maxItems, items, properties,
// required, additionalProperties, oneOf, anyOf and local "#/definitions" refs.
// Returns one "pointer: message" line per violation.
std::vector<std::string> schema_errors(const json& schema, const json& doc);

const json& run_config_schema();
const json& manifest_schema();
const json& operator_schema();

// Inline symbol document; relative file references resolve against base_dir.
Symbol symbol_from_json(const json& spec, int n, const std::filesystem::path& base_dir);
// Polynomial and built-in symbols only.
json symbol_to_json(const Symbol& f);

struct RunConfig {
  std::string command;
  QuantizationContext ctx;
  // unset n or d are taken from the symbol
  bool ctx_n_given = false;
  bool ctx_d_given = false;
  json symbol;  // null when absent
  int cutoff = 40;
  QuadratureSpec quadrature;
  json params = json::object();
  std::string output;
  std::uint64_t seed = 0;
  std::filesystem::path base_dir;

  // the configuration with every default filled in
  json echo() const;
};

// Throws Parameter with the schema violations listed.
RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir);

struct Overrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

// Exit codes: 0 success, 2 a hypothesis or inequality verdict is FAIL, 1 error.
int run(const std::string& command, const std::filesystem::path& config_path, const Overrides& overrides,
        std::ostream& out, std::ostream& err);

int main_entry(int argc, char** argv);

}  // namespace btq::cli
