#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "params.hpp"

namespace auction::cli {

using Json = nlohmann::ordered_json;

/// Seventeen significant digits; "nan", "inf" and "-inf" for non-finite
/// values.
std::string format_number(double value);

/// Everything one trial contributes to the run outputs.
struct TrialResult {
  std::uint64_t seed = 0;
  std::vector<double> C;
  std::vector<double> R;
  std::vector<double> sigma2;   ///< volatility curve, mrr only
  std::vector<double> spreads;  ///< finite spreads, pooled into a histogram
  Json summary = Json::object();
  std::vector<std::string> warnings;
  std::string series;  ///< per-round CSV, empty unless kept
  std::string ticks;   ///< quote file text, empty unless requested
};

/// A multi-trial simulation. Trials are independent and may run on any
/// thread; finish() sees them in trial order.
class Experiment {
 public:
  virtual ~Experiment() = default;

  virtual std::size_t trials() const = 0;
  virtual TrialResult run_trial(std::size_t trial, std::uint64_t seed) const = 0;

  /// Writes the aggregate files into `dir`, appending their names to
  /// `outputs`, and returns the run summary.
  Json finish(const std::filesystem::path& dir, std::vector<TrialResult>& results,
              std::vector<std::string>& outputs) const;

 protected:
  explicit Experiment(const ParamMap& params);

  /// Command-specific aggregate fields and files.
  virtual void finish_extra(const std::filesystem::path& dir, const std::vector<TrialResult>& results,
                            Json& aggregate, std::vector<std::string>& outputs) const;

  /// Whether trial `trial` keeps its per-round series.
  bool keep_series(std::size_t trial) const;

  std::size_t max_lag_;
  std::size_t fit_first_;
  std::size_t fit_last_;
  std::size_t samples_ = 0;  ///< signal length per trial, for the automatic fit range
  std::size_t bins_ = 50;
  std::string series_mode_;
};

/// mrr, mg or vs. Throws ConfigError on invalid parameters.
std::unique_ptr<Experiment> make_experiment(std::string_view command, const ParamMap& params);

/// Empirical pipeline on a quote file. Files written before a statistics
/// failure are still listed in `outputs`; the failure propagates.
Json run_analyze(const ParamMap& params, const std::filesystem::path& dir,
                 std::vector<std::string>& outputs);

/// Writes `content` to dir/name and records the name.
void write_output(const std::filesystem::path& dir, const std::string& name,
                  const std::string& content, std::vector<std::string>& outputs);

}  // namespace auction::cli
