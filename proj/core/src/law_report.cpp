#include "sublin/law_report.hpp"

#include <cmath>

namespace sublin {

void LawReport::record(const std::string& law, double violation) {
  auto it = std::find_if(checks_.begin(), checks_.end(),
                         [&](const LawCheck& c) { return c.name == law; });
  if (it == checks_.end()) {
    checks_.push_back(LawCheck{law});
    it = std::prev(checks_.end());
  }
  ++it->trials;
  // NaN must register as a failure.
  if (!(violation <= it->worst_violation)) it->worst_violation = violation;
  if (!(violation <= tolerance_)) it->pass = false;
}

void LawReport::merge(const LawReport& other) {
  for (const auto& c : other.checks_) {
    auto it = std::find_if(checks_.begin(), checks_.end(),
                           [&](const LawCheck& m) { return m.name == c.name; });
    if (it == checks_.end()) {
      checks_.push_back(c);
      continue;
    }
    it->trials += c.trials;
    it->worst_violation = std::max(it->worst_violation, c.worst_violation);
    if (std::isnan(c.worst_violation)) it->worst_violation = c.worst_violation;
    it->pass = it->pass && c.pass;
  }
}

const LawCheck* LawReport::find(const std::string& law) const {
  for (const auto& c : checks_)
    if (c.name == law) return &c;
  return nullptr;
}

double LawReport::worst() const {
  double w = 0.0;
  for (const auto& c : checks_) w = std::max(w, c.worst_violation);
  return w;
}

}  // namespace sublin
