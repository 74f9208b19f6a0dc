#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sublin/ambiguity.hpp"
#include "sublin/errors.hpp"
#include "sublin/g_function.hpp"

namespace sublin::cli {

/// A config value that failed validation; the message starts with the
/// offending field path.
class SchemaError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Read-only view of one JSON value together with its path from the root.
class Field {
 public:
  Field(const nlohmann::json* value, std::string path) : value_(value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const nlohmann::json& raw() const { return *value_; }
  [[noreturn]] void fail(const std::string& message) const;

  bool has(const std::string& key) const;
  Field at(const std::string& key) const;
  Field at(std::size_t index) const;
  std::optional<Field> find(const std::string& key) const;
  std::size_t size() const;  // array length
  /// Fails on any object key outside `allowed`.
  void allow_only(const std::vector<std::string>& allowed) const;

  double number() const;
  double positive() const;
  std::size_t count() const;  // nonnegative integer
  std::uint64_t u64() const;
  bool boolean() const;
  std::string string() const;
  std::vector<double> numbers() const;
  std::vector<std::size_t> counts() const;
  std::vector<std::string> strings() const;

  double number_or(const std::string& key, double fallback) const;
  double positive_or(const std::string& key, double fallback) const;
  std::size_t count_or(const std::string& key, std::size_t fallback) const;
  bool boolean_or(const std::string& key, bool fallback) const;

 private:
  const nlohmann::json* value_;
  std::string path_;
};

/// One experiment document.
struct Suite {
  std::string kind;
  std::optional<std::uint64_t> seed;
  std::string output;       // base name of the report files
  std::filesystem::path source;
  nlohmann::json document;  // whole config

  Field params() const;
  /// The seed, failing with a schema error when absent.
  std::uint64_t require_seed() const;
};

const std::vector<std::string>& known_kinds();

/// Parses and checks the top-level fields. `seed_override` replaces the
/// config seed.
Suite load_suite(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override);

/// Law block: {"type": "three_point", "variances": [...], "a": 1},
/// {"type": "point_mass", "dim": d}, {"type": "product", "factors": [law, law]}
/// or {"type": "explicit", "lattice": {...}, "members": [{"support", "probs"}]}.
AmbiguitySet parse_law(const Field& f);

/// Covariance set: {"sigma": [lower, upper]} or {"theta": [matrix, ...]}.
GFunction parse_g(const Field& f);
Matrix parse_matrix(const Field& f);

}  // namespace sublin::cli
