#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "experiment.hpp"
#include "params.hpp"

namespace auction::cli {

inline constexpr const char* kToolName = "auction-lab";
inline constexpr const char* kToolVersion = "1.0.0";

/// Calls fn(0..count-1) on up to `jobs` threads. Every index runs even if
/// others throw; the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

/// Exit code for an exception: 1 for configuration errors, 2 otherwise.
int exit_code(const std::exception_ptr& error);

/// One resolved simulation or analysis to run into its own directory.
struct CellRequest {
  std::string command;
  ParamMap params;
  std::uint64_t cell = 0;
  std::filesystem::path dir;
};

struct CellOutcome {
  int code = 0;  ///< 0 on success
  std::string error;
  Json summary;
  std::vector<std::string> outputs;  ///< relative to the cell directory
};

/// Runs every (cell, trial) unit on a shared pool, then writes each cell's
/// aggregate files, summary.json and manifest.json. Failures are confined
/// to their cell. One log line per cell goes to `log`.
std::vector<CellOutcome> run_cells(const std::vector<CellRequest>& cells, std::size_t jobs,
                                   std::ostream& log);

/// Manifest JSON of a cell.
Json make_manifest(const CellRequest& request, const std::vector<std::uint64_t>& trial_seeds,
                   const std::vector<std::string>& warnings, const std::vector<std::string>& outputs,
                   const std::string& error);

/// A grid over one simulation command.
struct SweepPlan {
  std::string command;
  std::vector<std::string> grid_keys;
  std::vector<ParamMap> cells;
};

/// Builds the plan from a config file's [sweep] section: `command`, an
/// optional `preset`, `grid.<key> = v1, v2, ...` lists and fixed keys. The
/// command's own section applies under the fixed keys.
SweepPlan plan_sweep(const IniFile& ini);

}  // namespace auction::cli
