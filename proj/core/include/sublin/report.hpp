#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sublin/law_report.hpp"

namespace sublin::lab {

/// Pre-limit against limit value for one (n, functional) cell.
struct Cell {
  std::size_t n = 0;
  std::string functional;
  double prelimit = 0.0;
  double limit = 0.0;
  double gap = 0.0;
  double error_bar = 0.0;
};

/// One value of a condition statistic, e.g. the Lindeberg sum at (n, eps).
struct SeriesPoint {
  std::string name;
  std::size_t n = 0;               // 0 when the statistic does not depend on n
  std::optional<double> parameter;  // eps, c, x, p ...
  double value = 0.0;
  std::optional<double> reference;  // target value when one is known
};

/// A pass/fail judgement with the statistic it was based on. Hard verdicts
/// are invariants; soft ones report trends over finite schedules.
struct Verdict {
  std::string name;
  double statistic = 0.0;
  bool pass = true;
  bool hard = false;
  std::string detail;
};

struct ExperimentReport {
  std::string kind;
  std::vector<Cell> cells;
  std::vector<SeriesPoint> series;
  std::vector<Verdict> verdicts;
  std::vector<std::pair<std::string, std::string>> provenance;

  void add_provenance(std::string key, std::string value);
  /// Concatenates cells, series and verdicts; provenance keys already present are kept.
  void append(const ExperimentReport& other);
  bool hard_pass() const;
  /// Adds one series point per law (worst violation) and one hard verdict.
  void add_laws(const std::string& prefix, const LawReport& laws);
};

/// Shortest round-trip decimal form, independent of the locale.
std::string format_double(double x);

/// CSV with a version comment line, a header row, one line per cell and per
/// series point:
///   record,name,n,parameter,value,reference,gap,error_bar
void write_csv(std::ostream& out, const ExperimentReport& report);
nlohmann::json summary_json(const ExperimentReport& report);

}  // namespace sublin::lab
