#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "config.hpp"
#include "sublin/report.hpp"

namespace sublin::cli {

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::size_t jobs = 1;
  bool dump_fields = false;
};

/// Runs one suite and returns its report. PDE field snapshots are written
/// directly when requested.
lab::ExperimentReport run_suite(const Suite& suite, const RunOptions& options);

/// Writes `text` to `path` through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace sublin::cli
