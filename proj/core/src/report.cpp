#include "sublin/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <system_error>

namespace sublin::lab {

void ExperimentReport::add_provenance(std::string key, std::string value) {
  provenance.emplace_back(std::move(key), std::move(value));
}

void ExperimentReport::append(const ExperimentReport& other) {
  cells.insert(cells.end(), other.cells.begin(), other.cells.end());
  series.insert(series.end(), other.series.begin(), other.series.end());
  verdicts.insert(verdicts.end(), other.verdicts.begin(), other.verdicts.end());
  for (const auto& [key, value] : other.provenance) {
    const bool seen = std::any_of(provenance.begin(), provenance.end(),
                                  [&](const auto& kv) { return kv.first == key; });
    if (!seen) provenance.emplace_back(key, value);
  }
}

bool ExperimentReport::hard_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const Verdict& v) { return !v.hard || v.pass; });
}

void ExperimentReport::add_laws(const std::string& prefix, const LawReport& laws) {
  for (const auto& c : laws.checks()) {
    series.push_back({prefix + c.name, 0, static_cast<double>(c.trials), c.worst_violation,
                      laws.tolerance()});
    verdicts.push_back({prefix + c.name, c.worst_violation, c.pass, true,
                        std::to_string(c.trials) + " trials"});
  }
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

namespace {

std::string optional_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string{};
}

}  // namespace

void write_csv(std::ostream& out, const ExperimentReport& report) {
  out << "# sublin report v1 kind=" << report.kind << '\n';
  out << "record,name,n,parameter,value,reference,gap,error_bar\n";
  for (const auto& c : report.cells)
    out << "cell," << c.functional << ',' << c.n << ",," << format_double(c.prelimit) << ','
        << format_double(c.limit) << ',' << format_double(c.gap) << ','
        << format_double(c.error_bar) << '\n';
  for (const auto& s : report.series)
    out << "series," << s.name << ',' << s.n << ',' << optional_field(s.parameter) << ','
        << format_double(s.value) << ',' << optional_field(s.reference) << ",,\n";
}

nlohmann::json summary_json(const ExperimentReport& report) {
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : report.verdicts)
    verdicts.push_back({{"name", v.name},
                        {"statistic", format_double(v.statistic)},
                        {"pass", v.pass},
                        {"hard", v.hard},
                        {"detail", v.detail}});
  nlohmann::json provenance = nlohmann::json::object();
  for (const auto& [k, v] : report.provenance) provenance[k] = v;
  return {{"format", "sublin-summary/1"},
          {"kind", report.kind},
          {"pass", report.hard_pass()},
          {"cells", report.cells.size()},
          {"series", report.series.size()},
          {"verdicts", std::move(verdicts)},
          {"provenance", std::move(provenance)}};
}

}  // namespace sublin::lab
