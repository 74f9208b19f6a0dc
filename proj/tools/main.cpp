#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include "config.hpp"
#include "runner.hpp"

namespace {

enum Exit : int { kOk = 0, kInvariant = 1, kSchema = 2, kCapacity = 3 };

int worse(int a, int b) {
  auto rank = [](int e) { return e == kSchema ? 3 : e == kCapacity ? 2 : e == kInvariant ? 1 : 0; };
  return rank(a) >= rank(b) ? a : b;
}

int run_one(const std::filesystem::path& path, std::optional<std::uint64_t> seed,
            const sublin::cli::RunOptions& options, std::map<std::string, nlohmann::json>& summaries) {
  using namespace sublin;
  try {
    const cli::Suite suite = cli::load_suite(path, seed);
    const lab::ExperimentReport report = cli::run_suite(suite, options);
    std::ostringstream csv;
    lab::write_csv(csv, report);
    cli::write_atomic(options.out_dir / (suite.output + ".csv"), csv.str());
    const nlohmann::json summary = lab::summary_json(report);
    cli::write_atomic(options.out_dir / (suite.output + ".summary.json"), summary.dump(2) + "\n");
    summaries[suite.output] = summary;

    std::size_t hard = 0, hard_pass = 0;
    for (const auto& v : report.verdicts) {
      if (v.hard) {
        ++hard;
        if (v.pass) ++hard_pass;
      }
      if (!v.pass)
        std::cout << "  " << (v.hard ? "FAIL " : "note ") << v.name << " statistic="
                  << lab::format_double(v.statistic) << " (" << v.detail << ")\n";
    }
    const bool ok = report.hard_pass();
    std::cout << (ok ? "PASS " : "FAIL ") << suite.output << " [" << suite.kind << "] " << hard_pass << "/"
              << hard << " hard checks, " << report.cells.size() << " cells, " << report.series.size()
              << " series points\n";
    return ok ? kOk : kInvariant;
  } catch (const cli::SchemaError& e) {
    std::cerr << "error: " << path.string() << ": schema: " << e.what() << '\n';
    return kSchema;
  } catch (const CapacityExceeded& e) {
    std::cerr << "error: " << path.string() << ": capacity: " << e.what() << '\n';
    return kCapacity;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << path.string() << ": invalid: " << e.what() << '\n';
    return kSchema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << path.string() << ": " << e.what() << '\n';
    return kInvariant;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact sub-linear expectation experiments"};
  app.require_subcommand(1);

  std::vector<std::string> configs;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  bool dump = false;

  auto* run = app.add_subcommand("run", "Run experiment configs and write reports");
  run->add_option("configs", configs, "Config documents")->check(CLI::ExistingFile);
  run->add_option("--config", configs, "Config document (repeatable)")->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Seed overriding the config seed");
  run->add_option("--jobs", jobs, "Worker threads per suite")->check(CLI::PositiveNumber);
  run->add_flag("--dump-fields", dump, "Write PDE grid snapshots");

  auto* kinds = app.add_subcommand("kinds", "List experiment kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kSchema;
  }

  if (kinds->parsed()) {
    for (const auto& k : sublin::cli::known_kinds()) std::cout << k << '\n';
    return kOk;
  }
  if (configs.empty()) {
    std::cerr << "error: no config given\n";
    return kSchema;
  }

  sublin::cli::RunOptions options;
  options.out_dir = out_dir;
  options.jobs = jobs;
  options.dump_fields = dump;
  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << out_dir << ": " << ec.message() << '\n';
    return kSchema;
  }

  std::map<std::string, nlohmann::json> summaries;
  int status = kOk;
  for (const auto& c : configs) status = worse(status, run_one(c, seed, options, summaries));

  if (configs.size() > 1) {
    nlohmann::json merged = nlohmann::json::object();
    for (const auto& [name, s] : summaries) merged[name] = s;
    try {
      sublin::cli::write_atomic(options.out_dir / "summary.json", merged.dump(2) + "\n");
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      status = worse(status, kInvariant);
    }
  }
  return status;
}
