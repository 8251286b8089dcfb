#pragma once

#include "afckf/simulator.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace afckf::cli {

/// Malformed YAML, wrong value types, or unknown keys. The message carries the
/// line/column and the offending field.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed config that violates a run invariant (e.g. runs: 0).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a YAML run configuration; every key is optional and missing keys
/// take the benchmark defaults. Throws ParseError or ValidationError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Every field of the config, explicit and at full precision. Feeding the
/// result back to parse_config reproduces the same RunConfig.
std::string dump_config(const RunConfig& config);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace afckf::cli
