#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "sublin/lattice_dp.hpp"

namespace sublin::cli {

void Field::fail(const std::string& message) const {
  throw SchemaError((path_.empty() ? std::string("<root>") : path_) + ": " + message);
}

bool Field::has(const std::string& key) const { return value_->is_object() && value_->contains(key); }

Field Field::at(const std::string& key) const {
  if (!value_->is_object()) fail("expected an object");
  const auto it = value_->find(key);
  const std::string p = path_.empty() ? key : path_ + "." + key;
  if (it == value_->end()) throw SchemaError(p + ": required field is missing");
  return Field(&*it, p);
}

Field Field::at(std::size_t index) const {
  if (!value_->is_array()) fail("expected an array");
  if (index >= value_->size()) fail("index " + std::to_string(index) + " out of range");
  return Field(&(*value_)[index], path_ + "[" + std::to_string(index) + "]");
}

std::optional<Field> Field::find(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return at(key);
}

std::size_t Field::size() const {
  if (!value_->is_array()) fail("expected an array");
  return value_->size();
}

void Field::allow_only(const std::vector<std::string>& allowed) const {
  if (!value_->is_object()) fail("expected an object");
  for (const auto& [key, v] : value_->items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw SchemaError((path_.empty() ? key : path_ + "." + key) + ": unknown field");
}

double Field::number() const {
  if (!value_->is_number()) fail("expected a number");
  const double v = value_->get<double>();
  if (!std::isfinite(v)) fail("expected a finite number");
  return v;
}

double Field::positive() const {
  const double v = number();
  if (!(v > 0.0)) fail("must be positive");
  return v;
}

std::size_t Field::count() const {
  if (!value_->is_number_integer()) fail("expected an integer");
  if (value_->is_number_unsigned()) return value_->get<std::size_t>();
  const auto v = value_->get<std::int64_t>();
  if (v < 0) fail("must be nonnegative");
  return static_cast<std::size_t>(v);
}

std::uint64_t Field::u64() const { return static_cast<std::uint64_t>(count()); }

bool Field::boolean() const {
  if (!value_->is_boolean()) fail("expected true or false");
  return value_->get<bool>();
}

std::string Field::string() const {
  if (!value_->is_string()) fail("expected a string");
  return value_->get<std::string>();
}

std::vector<double> Field::numbers() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).number());
  return out;
}

std::vector<std::size_t> Field::counts() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).count());
  return out;
}

std::vector<std::string> Field::strings() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).string());
  return out;
}

double Field::number_or(const std::string& key, double fallback) const {
  return has(key) ? at(key).number() : fallback;
}

double Field::positive_or(const std::string& key, double fallback) const {
  return has(key) ? at(key).positive() : fallback;
}

std::size_t Field::count_or(const std::string& key, std::size_t fallback) const {
  return has(key) ? at(key).count() : fallback;
}

bool Field::boolean_or(const std::string& key, bool fallback) const {
  return has(key) ? at(key).boolean() : fallback;
}

Field Suite::params() const {
  static const nlohmann::json empty = nlohmann::json::object();
  const auto it = document.find("params");
  return it == document.end() ? Field(&empty, "params") : Field(&*it, "params");
}

std::uint64_t Suite::require_seed() const {
  if (!seed) throw SchemaError("seed: required for randomized suite '" + kind + "'");
  return *seed;
}

const std::vector<std::string>& known_kinds() {
  static const std::vector<std::string> kinds = {"axioms", "tree-laws",  "g-laws",    "pde",
                                                 "clt",    "fdd",        "rosenthal", "iid-conditions"};
  return kinds;
}

Suite load_suite(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path.string() + ": cannot open config");
  Suite suite;
  suite.source = path;
  try {
    suite.document = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  const Field root(&suite.document, "");
  root.allow_only({"kind", "seed", "output", "params", "description"});
  suite.kind = root.at("kind").string();
  const auto& kinds = known_kinds();
  if (std::find(kinds.begin(), kinds.end(), suite.kind) == kinds.end())
    root.at("kind").fail("unknown experiment kind '" + suite.kind + "'");
  if (root.has("seed")) suite.seed = root.at("seed").u64();
  if (seed_override) suite.seed = seed_override;
  suite.output = root.has("output") ? root.at("output").string() : path.stem().string();
  if (suite.output.empty() || suite.output.find('/') != std::string::npos)
    root.at("output").fail("must be a plain file name");
  if (root.has("params") && !root.at("params").raw().is_object()) root.at("params").fail("expected an object");
  return suite;
}

namespace {

template <class F>
auto with_path(const Field& f, F&& build) {
  try {
    return build();
  } catch (const SchemaError&) {
    throw;
  } catch (const InvalidArgument& e) {
    f.fail(e.what());
  }
}

LatticeSpec parse_lattice(const Field& f) {
  f.allow_only({"dim", "step", "origin"});
  LatticeSpec l;
  l.dim = f.count_or("dim", 1);
  l.step = f.positive_or("step", 1.0);
  l.origin = f.has("origin") ? f.at("origin").numbers() : std::vector<double>(l.dim, 0.0);
  with_path(f, [&] {
    l.validate();
    return 0;
  });
  return l;
}

DiscreteDistribution parse_member(const Field& f) {
  f.allow_only({"support", "probs"});
  const Field support = f.at("support");
  const Field probs = f.at("probs");
  std::vector<Point> points;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const Field p = support.at(i);
    points.push_back(p.raw().is_number() ? Point{p.number()} : p.numbers());
  }
  std::vector<double> ps = probs.numbers();
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (ps[i] < 0.0) probs.at(i).fail("probability must be nonnegative");
  if (ps.size() != points.size()) probs.fail("needs one probability per support point");
  return with_path(f, [&] { return DiscreteDistribution(std::move(points), std::move(ps)); });
}

}  // namespace

AmbiguitySet parse_law(const Field& f) {
  const std::string type = f.at("type").string();
  if (type == "three_point") {
    f.allow_only({"type", "variances", "a"});
    const auto vars = f.at("variances").numbers();
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i] < 0.0) f.at("variances").at(i).fail("variance must be nonnegative");
    const double a = f.positive_or("a", 1.0);
    return with_path(f, [&] { return symmetric_three_point(vars, a); });
  }
  if (type == "point_mass") {
    f.allow_only({"type", "dim"});
    return with_path(f, [&] { return point_mass(f.count_or("dim", 1)); });
  }
  if (type == "product") {
    f.allow_only({"type", "factors"});
    const Field factors = f.at("factors");
    if (factors.size() != 2) factors.fail("expected exactly two factors");
    const AmbiguitySet x = parse_law(factors.at(0));
    const AmbiguitySet y = parse_law(factors.at(1));
    return with_path(f, [&] { return peng_pair(x, y); });
  }
  if (type == "explicit") {
    f.allow_only({"type", "lattice", "members"});
    const LatticeSpec lattice = parse_lattice(f.at("lattice"));
    const Field members = f.at("members");
    std::vector<DiscreteDistribution> ms;
    for (std::size_t i = 0; i < members.size(); ++i) ms.push_back(parse_member(members.at(i)));
    return with_path(f, [&] { return AmbiguitySet(lattice, std::move(ms)); });
  }
  f.at("type").fail("unknown law type '" + type + "'");
}

Matrix parse_matrix(const Field& f) {
  if (f.raw().is_number()) return Matrix::Constant(1, 1, f.number());
  const std::size_t n = f.size();
  if (n == 0) f.fail("matrix is empty");
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = f.at(i).numbers();
    if (row.size() != n) f.at(i).fail("matrix must be square");
    for (std::size_t j = 0; j < n; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
  }
  return m;
}

GFunction parse_g(const Field& f) {
  if (f.has("sigma")) {
    const auto s = f.at("sigma").numbers();
    if (s.size() != 2) f.at("sigma").fail("expected [lower, upper]");
    return with_path(f.at("sigma"), [&] { return g_from_interval({s[0], s[1]}); });
  }
  const Field theta = f.at("theta");
  std::vector<Matrix> ms;
  for (std::size_t i = 0; i < theta.size(); ++i) ms.push_back(parse_matrix(theta.at(i)));
  return with_path(theta, [&] { return GFunction(std::move(ms)); });
}

}  // namespace sublin::cli
