#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "auction/random.hpp"

/// Minority game with finite market history, two quenched strategies per
/// trader, a biased price update and a Bid-Ask spread built from per-trader
/// noisy quotes.
namespace auction::mg {

struct GameConfig {
  std::size_t n_traders = 1025;  ///< odd, so A(t) is never zero
  std::size_t history_len = 9;   ///< M; tables have 2^M rows
  double beta = 0.01;            ///< price step per unit of A
  double psi = 0.0;              ///< bias toward the previous round's sign
  double zeta = 0.0;             ///< weight of the fake history noise
  double gamma_a = 0.01;
  double gamma_b = 0.01;
  double delta = 0.049;
  std::size_t rounds = 100010;
  double p0 = 100.0;
  std::uint64_t seed = 1;

  /// Throws ConfigError on an even or zero N, M outside [1, 24], beta <= 0,
  /// delta <= 0, negative quote noise or zeta outside [0, 1].
  void validate() const;
  std::size_t rows() const noexcept { return std::size_t{1} << history_len; }
};

/// 1-based row index Lambda of an information vector (lambda_1..lambda_M,
/// most recent first). lambda_tau = +1 sets bit 2^(M - tau).
std::size_t history_index(std::span<const int> signs);

/// Information vector components sgn[(1 - zeta) A(t-tau) + zeta Z(t,tau)]
/// (sgn(0) = +1) and their row index.
std::size_t history_index(std::span<const double> past_A, std::span<const double> noise,
                          double zeta);

/// Inverse of history_index for M components.
std::vector<int> information_vector(std::size_t lambda, std::size_t history_len);

/// S_t = min ask over buyers - max bid over sellers, where trader i quotes
/// a = p + gamma_a g_i + delta when buying and b = p + gamma_b g_i - delta
/// when selling. Empty when either side has no traders.
std::optional<double> make_spread(double price, std::span<const int> decisions,
                                  std::span<const double> quote_noise, const GameConfig& config);

struct RoundRecord {
  double A = 0.0;      ///< (n_plus - n_minus) / sqrt(N)
  double price = 0.0;  ///< p(t+1), the price after this round
  std::optional<double> spread;
  /// Sign of the price move p(t+1) - p(t) = beta (A(t) + psi sgn A(t-1)),
  /// the trade signal seen by the lag statistics. Equals a_sign unless the
  /// bias outweighs A(t); an exactly zero move repeats the previous sign.
  int epsilon = 1;
  int a_sign = 1;      ///< sgn A(t), the entry pushed into the history
  std::size_t n_plus = 0;
  std::size_t n_minus = 0;
};

/// Snapshot of one trader's look-up table.
struct TraderTable {
  std::vector<int> r1, r2;
  std::vector<int> pristine_r1, pristine_r2;
  double q = 0.0;
};

/// One running game. Tables are stored row-major by history index so a
/// round reads one contiguous slice per strategy. Payoff differences are
/// kept exactly as integers: q_i = Q_i / N.
class MinorityGame {
 public:
  explicit MinorityGame(const GameConfig& config);

  const GameConfig& config() const noexcept { return config_; }
  std::size_t round() const noexcept { return round_; }
  double price() const noexcept { return price_; }

  /// sgn A(t-1): the most recent history entry.
  int previous_sign() const noexcept { return history_A_.front() > 0.0 ? 1 : -1; }

  /// sgn A(t-tau) for tau = 1..M.
  std::vector<int> history_signs() const;

  /// Computes the information vector and row for the current round. Called
  /// implicitly by play_round; idempotent until the round is played.
  std::size_t prepare_round();

  /// 0-based active row (Lambda - 1) of the prepared round.
  std::size_t active_row() const noexcept { return active_row_; }
  /// Components of the prepared round's information vector.
  const std::vector<int>& information() const noexcept { return information_; }

  /// Decisions, A(t), payoff update, price, spread and history shift.
  RoundRecord play_round();
  RoundRecord step() { prepare_round(); return play_round(); }

  /// Decisions B_i(t) of the last played round.
  std::span<const int> last_decisions() const noexcept { return decisions_; }

  int strategy(std::size_t trader, std::size_t row, int which) const;
  double q(std::size_t trader) const noexcept;
  std::int64_t q_scaled(std::size_t trader) const noexcept { return q_[trader]; }
  TraderTable table(std::size_t trader) const;

  /// Rewrites the current table entries of one row; the pristine copy is kept.
  void rewrite(std::size_t trader, std::size_t row, int first, int second);
  /// Replaces both current and pristine entries (test setups).
  void set_initial(std::size_t trader, std::size_t row, int first, int second);
  bool modified(std::size_t trader) const noexcept { return !dirty_rows_[trader].empty(); }
  /// Resets the trader's whole table to the pristine copy.
  void restore(std::size_t trader);

 private:
  GameConfig config_;
  std::size_t n_;
  std::size_t rows_;
  double inv_sqrt_n_;

  std::vector<std::int8_t> r1_, r2_, pristine_r1_, pristine_r2_;
  std::vector<std::vector<std::uint32_t>> dirty_rows_;
  std::vector<std::int64_t> q_;

  // history_A_[tau - 1] = A(t - tau); history_bits_ is its row at zeta = 0.
  std::vector<double> history_A_;
  std::size_t history_bits_ = 0;

  double price_;
  int last_move_sign_ = 1;
  std::size_t round_ = 0;
  bool prepared_ = false;
  std::size_t active_row_ = 0;
  std::vector<int> information_;
  std::vector<int> decisions_;
  std::vector<double> quote_noise_;
  std::vector<double> fake_noise_;

  Rng tie_rng_;
  Rng quote_rng_;
  Rng fake_rng_;
};

struct GameRun {
  GameConfig config;
  std::vector<RoundRecord> rounds;
  /// Standard deviation of A(t) over the run (1/T normalization).
  double sigma_A = 0.0;
  std::size_t spread_missing = 0;
  std::size_t spread_nonpositive = 0;
  /// psi >= sigma_A: the bias dominates the decision term.
  bool psi_warning = false;

  /// eps_t (sign of each round's price move), t = 0..T-1.
  std::vector<int> signal() const;
  /// p(0), p(1), ..., p(T): the price before each round plus the final one.
  std::vector<double> mid() const;
  /// S_t with NaN for rounds without a spread.
  std::vector<double> spreads() const;
  std::vector<double> totals() const;
};

/// Fills sigma_A, the spread counters and the psi warning from `rounds`.
void summarize(GameRun& run);

GameRun run(const GameConfig& config);

}  // namespace auction::mg
