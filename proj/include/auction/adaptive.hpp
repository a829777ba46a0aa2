#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "auction/minority_game.hpp"
#include "auction/random.hpp"

/// Annealed look-up tables: traders rewrite the active row of their tables
/// toward the recent market sign and later fall back to the original table.
namespace auction::adapt {

enum class Mode {
  latest,   ///< rewrite to sgn A(t-1) with probability f1
  history,  ///< rewrite to sgn Omega with probability f3 = alpha |Omega| / 2^M
};

Mode parse_mode(std::string_view name);
std::string_view to_string(Mode mode);

struct AdaptConfig {
  Mode mode = Mode::latest;
  double f1 = 0.01;
  double f2 = 1.0;
  double alpha = 0.01;

  /// f1, f2, alpha must lie in [0, 1].
  void validate() const;
};

/// Cumulative weighted market status sum_tau 2^(M - tau) lambda_tau.
/// Always odd, |value| <= 2^M - 1.
struct OmegaValue {
  std::int64_t value = 0;
  std::size_t history_len = 0;
};

/// Throws ConfigError if an entry is not ±1 or the history is empty.
OmegaValue omega(std::span<const int> history);
/// Also checks that the history has exactly `history_len` entries.
OmegaValue omega(std::span<const int> history, std::size_t history_len);

/// f3 = alpha |Omega| / 2^M.
double rewrite_probability(const OmegaValue& omega, double alpha);

/// Traders touched by one adaptation or restoration pass.
struct MutationRecord {
  std::vector<std::size_t> traders;
  /// Value written into both strategies (0 for restorations).
  int value = 0;
  /// Per-trader probability used.
  double probability = 0.0;
};

/// With probability f1 per trader, sets both strategies of the prepared
/// round's row to sgn A(t-1).
MutationRecord adapt_latest(mg::MinorityGame& game, double f1, Rng& rng);

/// With probability f3 per trader, sets both strategies of the prepared
/// round's row to sgn Omega of the round's information vector.
MutationRecord adapt_history(mg::MinorityGame& game, double alpha, Rng& rng);

/// Every trader whose table differs from the original gets it back with
/// probability f2.
MutationRecord restore(mg::MinorityGame& game, double f2, Rng& rng);

struct AdaptiveRun {
  mg::GameRun game;
  AdaptConfig adapt;
  std::vector<std::size_t> modified;  ///< traders rewritten per round
  std::vector<std::size_t> restored;  ///< traders restored per round
  std::vector<double> f3;             ///< history mode only
  std::vector<std::int64_t> omega;    ///< history mode only
};

/// Per round: restore, prepare the information vector, adapt (from round 1
/// on), then play.
AdaptiveRun run_adaptive(const mg::GameConfig& config, const AdaptConfig& adapt);

}  // namespace auction::adapt
