#include "auction/minority_game.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <string>

#include "auction/error.hpp"

namespace auction::mg {
namespace {

enum Stream : std::uint64_t { kInit = 1, kTie = 2, kQuote = 3, kFake = 4 };

}  // namespace

void GameConfig::validate() const {
  if (n_traders == 0 || n_traders % 2 == 0) {
    throw ConfigError("mg: number of traders must be odd, got " + std::to_string(n_traders));
  }
  if (history_len < 1 || history_len > 24) throw ConfigError("mg: history length must be in [1, 24]");
  if (!(beta > 0.0)) throw ConfigError("mg: beta must be positive");
  if (!(delta > 0.0)) throw ConfigError("mg: delta must be positive");
  if (!(gamma_a >= 0.0) || !(gamma_b >= 0.0)) throw ConfigError("mg: quote noise must be >= 0");
  if (!(zeta >= 0.0 && zeta <= 1.0)) throw ConfigError("mg: zeta must be in [0, 1]");
  if (!std::isfinite(psi) || !std::isfinite(p0)) throw ConfigError("mg: psi and p0 must be finite");
}

std::size_t history_index(std::span<const int> signs) {
  const std::size_t M = signs.size();
  std::size_t bits = 0;
  for (std::size_t tau = 1; tau <= M; ++tau) {
    if (signs[tau - 1] > 0) bits |= std::size_t{1} << (M - tau);
  }
  return bits + 1;
}

std::size_t history_index(std::span<const double> past_A, std::span<const double> noise,
                          double zeta) {
  if (past_A.size() != noise.size()) throw ConfigError("history_index: length mismatch");
  std::vector<int> signs(past_A.size());
  for (std::size_t k = 0; k < past_A.size(); ++k) {
    signs[k] = (1.0 - zeta) * past_A[k] + zeta * noise[k] >= 0.0 ? 1 : -1;
  }
  return history_index(signs);
}

std::vector<int> information_vector(std::size_t lambda, std::size_t history_len) {
  const std::size_t bits = lambda - 1;
  std::vector<int> signs(history_len);
  for (std::size_t tau = 1; tau <= history_len; ++tau) {
    signs[tau - 1] = (bits >> (history_len - tau)) & 1U ? 1 : -1;
  }
  return signs;
}

std::optional<double> make_spread(double price, std::span<const int> decisions,
                                  std::span<const double> quote_noise, const GameConfig& config) {
  double best_ask = std::numeric_limits<double>::infinity();
  double best_bid = -std::numeric_limits<double>::infinity();
  bool buyers = false;
  bool sellers = false;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (decisions[i] > 0) {
      const double ask = price + config.gamma_a * quote_noise[i] + config.delta;
      if (ask < best_ask) best_ask = ask;
      buyers = true;
    } else {
      const double bid = price + config.gamma_b * quote_noise[i] - config.delta;
      if (bid > best_bid) best_bid = bid;
      sellers = true;
    }
  }
  if (!buyers || !sellers) return std::nullopt;
  return best_ask - best_bid;
}

MinorityGame::MinorityGame(const GameConfig& config)
    : config_(config),
      n_(config.n_traders),
      rows_(0),
      inv_sqrt_n_(0.0),
      price_(config.p0),
      tie_rng_(derive_seed(config.seed, kTie)),
      quote_rng_(derive_seed(config.seed, kQuote)),
      fake_rng_(derive_seed(config.seed, kFake)) {
  config_.validate();
  rows_ = config_.rows();
  inv_sqrt_n_ = 1.0 / std::sqrt(static_cast<double>(n_));

  Rng init(derive_seed(config_.seed, kInit));
  r1_.resize(rows_ * n_);
  r2_.resize(rows_ * n_);
  // Drawn trader by trader, row by row.
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t row = 0; row < rows_; ++row) {
      r1_[row * n_ + i] = static_cast<std::int8_t>(init.coin());
      r2_[row * n_ + i] = static_cast<std::int8_t>(init.coin());
    }
  }
  pristine_r1_ = r1_;
  pristine_r2_ = r2_;
  dirty_rows_.resize(n_);
  q_.assign(n_, 0);

  const std::size_t M = config_.history_len;
  history_A_.resize(M);
  for (std::size_t tau = 1; tau <= M; ++tau) {
    history_A_[tau - 1] = static_cast<double>(init.coin());
    if (history_A_[tau - 1] > 0.0) history_bits_ |= std::size_t{1} << (M - tau);
  }

  information_.resize(M);
  decisions_.resize(n_);
  quote_noise_.resize(n_);
  fake_noise_.resize(M);
}

std::vector<int> MinorityGame::history_signs() const {
  std::vector<int> signs(history_A_.size());
  for (std::size_t k = 0; k < signs.size(); ++k) signs[k] = history_A_[k] > 0.0 ? 1 : -1;
  return signs;
}

std::size_t MinorityGame::prepare_round() {
  if (prepared_) return active_row_;
  const std::size_t M = config_.history_len;
  if (config_.zeta == 0.0) {
    active_row_ = history_bits_;
    for (std::size_t tau = 1; tau <= M; ++tau) {
      information_[tau - 1] = (history_bits_ >> (M - tau)) & 1U ? 1 : -1;
    }
  } else {
    for (auto& z : fake_noise_) z = fake_rng_.normal();
    active_row_ = history_index(history_A_, fake_noise_, config_.zeta) - 1;
    information_ = information_vector(active_row_ + 1, M);
  }
  prepared_ = true;
  return active_row_;
}

RoundRecord MinorityGame::play_round() {
  prepare_round();
  const std::size_t base = active_row_ * n_;
  const std::int8_t* r1 = r1_.data() + base;
  const std::int8_t* r2 = r2_.data() + base;

  // Decisions use q(t) of every trader before any payoff is updated.
  long long k = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    int b = r1[i];
    if (r1[i] != r2[i]) {
      const std::int64_t q = q_[i];
      const int s = q > 0 ? 1 : (q < 0 ? -1 : tie_rng_.coin());
      b = s > 0 ? r1[i] : r2[i];
    }
    decisions_[i] = b;
    k += b;
  }

  // q_i(t+1) = q_i(t) - eta_i A(t) / sqrt(N), with A(t) = k / sqrt(N).
  for (std::size_t i = 0; i < n_; ++i) {
    const int eta = (r1[i] - r2[i]) / 2;
    q_[i] -= eta * k;
  }

  RoundRecord rec;
  rec.A = static_cast<double>(k) * inv_sqrt_n_;
  rec.n_plus = static_cast<std::size_t>((static_cast<long long>(n_) + k) / 2);
  rec.n_minus = n_ - rec.n_plus;
  assert(k != 0);
  rec.a_sign = k > 0 ? 1 : -1;

  for (auto& g : quote_noise_) g = quote_rng_.normal();
  rec.spread = make_spread(price_, decisions_, quote_noise_, config_);

  const double drive = rec.A + config_.psi * previous_sign();
  if (drive != 0.0) last_move_sign_ = drive > 0.0 ? 1 : -1;
  rec.epsilon = last_move_sign_;
  price_ += config_.beta * drive;
  rec.price = price_;

  for (std::size_t tau = history_A_.size() - 1; tau > 0; --tau) history_A_[tau] = history_A_[tau - 1];
  history_A_[0] = rec.A;
  history_bits_ = (history_bits_ >> 1) |
                  (rec.a_sign > 0 ? std::size_t{1} << (config_.history_len - 1) : 0);

  ++round_;
  prepared_ = false;
  return rec;
}

int MinorityGame::strategy(std::size_t trader, std::size_t row, int which) const {
  const std::size_t at = row * n_ + trader;
  return which == 1 ? r1_[at] : r2_[at];
}

double MinorityGame::q(std::size_t trader) const noexcept {
  return static_cast<double>(q_[trader]) / static_cast<double>(n_);
}

TraderTable MinorityGame::table(std::size_t trader) const {
  TraderTable t;
  t.q = q(trader);
  for (std::size_t row = 0; row < rows_; ++row) {
    const std::size_t at = row * n_ + trader;
    t.r1.push_back(r1_[at]);
    t.r2.push_back(r2_[at]);
    t.pristine_r1.push_back(pristine_r1_[at]);
    t.pristine_r2.push_back(pristine_r2_[at]);
  }
  return t;
}

void MinorityGame::rewrite(std::size_t trader, std::size_t row, int first, int second) {
  const std::size_t at = row * n_ + trader;
  r1_[at] = static_cast<std::int8_t>(first);
  r2_[at] = static_cast<std::int8_t>(second);
  dirty_rows_[trader].push_back(static_cast<std::uint32_t>(row));
}

void MinorityGame::set_initial(std::size_t trader, std::size_t row, int first, int second) {
  const std::size_t at = row * n_ + trader;
  r1_[at] = pristine_r1_[at] = static_cast<std::int8_t>(first);
  r2_[at] = pristine_r2_[at] = static_cast<std::int8_t>(second);
}

void MinorityGame::restore(std::size_t trader) {
  // Only rewritten rows can differ from the pristine table.
  for (std::uint32_t row : dirty_rows_[trader]) {
    const std::size_t at = row * n_ + trader;
    r1_[at] = pristine_r1_[at];
    r2_[at] = pristine_r2_[at];
  }
  dirty_rows_[trader].clear();
}

std::vector<int> GameRun::signal() const {
  std::vector<int> out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.epsilon);
  return out;
}

std::vector<double> GameRun::mid() const {
  std::vector<double> out;
  out.reserve(rounds.size() + 1);
  out.push_back(config.p0);
  for (const auto& r : rounds) out.push_back(r.price);
  return out;
}

std::vector<double> GameRun::spreads() const {
  std::vector<double> out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.spread.value_or(std::numeric_limits<double>::quiet_NaN()));
  return out;
}

std::vector<double> GameRun::totals() const {
  std::vector<double> out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.A);
  return out;
}

void summarize(GameRun& run) {
  run.spread_missing = 0;
  run.spread_nonpositive = 0;
  double mean = 0.0;
  for (const auto& r : run.rounds) {
    mean += r.A;
    if (!r.spread) ++run.spread_missing;
    else if (*r.spread <= 0.0) ++run.spread_nonpositive;
  }
  const double T = static_cast<double>(run.rounds.size());
  mean /= T;
  double ss = 0.0;
  for (const auto& r : run.rounds) ss += (r.A - mean) * (r.A - mean);
  run.sigma_A = std::sqrt(ss / T);
  run.psi_warning = !(run.config.psi < run.sigma_A);
}

GameRun run(const GameConfig& config) {
  if (config.rounds == 0) throw ConfigError("mg: need at least one round");
  MinorityGame game(config);
  GameRun out;
  out.config = config;
  out.rounds.reserve(config.rounds);
  for (std::size_t t = 0; t < config.rounds; ++t) out.rounds.push_back(game.step());
  summarize(out);
  return out;
}

}  // namespace auction::mg
