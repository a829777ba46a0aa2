#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "auction/random.hpp"

/// Mean-field market: agents trade with a probability that falls off with
/// the distance of the price from its moving average, and the price follows
/// the multiplicative recursion p(t+1) = p(t) (1 + A_t) / (1 - A_t).
namespace auction::vs {

/// |A_t| is clamped to 1 - clamp_margin.
inline constexpr double clamp_margin = 1e-6;

struct VsConfig {
  std::size_t n_agents = 20000;
  double mu = 100.0;
  std::size_t window = 10000;  ///< moving-average length tau
  std::size_t rounds = 100000;
  double p0 = 131.0725;
  double gamma_a = 0.001;
  double gamma_b = 0.001;
  double delta = 0.02;
  std::uint64_t seed = 1;

  void validate() const;
};

/// exp(-mu |log(p / p_avg)|). Throws DomainError for non-positive prices.
double trade_probability(double p, double p_avg, double mu);

/// Price multiplier (1 + A) / (1 - A).
double price_multiplier(double A);

/// Ring of the last `window` prices with an exact-on-wrap running mean.
class MovingAverage {
 public:
  MovingAverage(std::size_t window, double fill);
  void push(double price);
  double mean() const noexcept { return sum_ / static_cast<double>(values_.size()); }

 private:
  std::vector<double> values_;
  std::size_t next_ = 0;
  double sum_ = 0.0;
};

struct VsRound {
  double A = 0.0;      ///< after clamping
  double price = 0.0;  ///< p(t+1)
  double moving_avg = 0.0;  ///< average used to set this round's participation
  std::size_t participants = 0;
  std::optional<double> spread;
  bool clamped = false;
};

/// Trading decisions of one round: S_i in {-1, 0, +1}.
struct Participation {
  std::vector<int> decisions;
  std::vector<double> quote_noise;
};

class VsMarket {
 public:
  explicit VsMarket(const VsConfig& config);

  double price() const noexcept { return price_; }
  double moving_average() const noexcept { return window_.mean(); }
  std::size_t round() const noexcept { return round_; }
  std::size_t clamp_events() const noexcept { return clamps_; }

  /// Draws every agent's participation and side, then applies them.
  VsRound step();

  /// Applies given decisions (S_i) and quote noise: used by step and tests.
  VsRound apply(const std::vector<int>& decisions, const std::vector<double>& quote_noise);

 private:
  VsConfig config_;
  double price_;
  MovingAverage window_;
  std::size_t round_ = 0;
  std::size_t clamps_ = 0;
  double inv_sqrt_n_;
  Rng rng_;
  Rng quote_rng_;
  std::vector<int> decisions_;
  std::vector<double> quote_noise_;
};

struct VsRun {
  VsConfig config;
  std::vector<VsRound> rounds;
  std::size_t clamp_events = 0;

  /// sgn A_t with A_t = 0 carrying the previous sign forward.
  std::vector<int> signal() const;
  /// p(0), ..., p(T).
  std::vector<double> mid() const;
  std::vector<double> spreads() const;
  double mean_participation() const;
};

VsRun run_vs(const VsConfig& config);

}  // namespace auction::vs
