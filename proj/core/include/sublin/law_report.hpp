#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace sublin {

/// Outcome of one algebraic law checked over many instances.
struct LawCheck {
  std::string name;
  std::size_t trials = 0;
  double worst_violation = 0.0;
  bool pass = true;
};

/// Pass/fail per law with the worst violation magnitude seen.
class LawReport {
 public:
  explicit LawReport(double tolerance = 1e-10) : tolerance_(tolerance) {}

  /// Records one evaluation of `law`. `violation` is a nonnegative magnitude;
  /// anything above the tolerance fails the law.
  void record(const std::string& law, double violation);
  void merge(const LawReport& other);

  const std::vector<LawCheck>& checks() const { return checks_; }
  const LawCheck* find(const std::string& law) const;
  double tolerance() const { return tolerance_; }
  bool all_pass() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const LawCheck& c) { return c.pass; });
  }
  double worst() const;

 private:
  double tolerance_;
  std::vector<LawCheck> checks_;
};

}  // namespace sublin
