#include "auction/vikram_sinha.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "auction/error.hpp"

namespace auction::vs {
namespace {

enum Stream : std::uint64_t { kTrade = 1, kQuote = 2 };

}  // namespace

void VsConfig::validate() const {
  if (n_agents == 0) throw ConfigError("vs: need at least one agent");
  if (!(p0 > 0.0) || !std::isfinite(p0)) throw ConfigError("vs: p0 must be positive");
  if (window < 1) throw ConfigError("vs: window must be >= 1");
  if (!(mu >= 0.0)) throw ConfigError("vs: mu must be >= 0");
  if (!(gamma_a >= 0.0) || !(gamma_b >= 0.0)) throw ConfigError("vs: quote noise must be >= 0");
}

double trade_probability(double p, double p_avg, double mu) {
  if (!(p > 0.0) || !(p_avg > 0.0)) throw DomainError("trade_probability: prices must be positive");
  return std::exp(-mu * std::abs(std::log(p / p_avg)));
}

double price_multiplier(double A) { return (1.0 + A) / (1.0 - A); }

MovingAverage::MovingAverage(std::size_t window, double fill)
    : values_(window, fill), sum_(fill * static_cast<double>(window)) {}

void MovingAverage::push(double price) {
  sum_ += price - values_[next_];
  values_[next_] = price;
  if (++next_ == values_.size()) {
    next_ = 0;
    // Resum once per wrap so rounding drift never accumulates.
    sum_ = std::accumulate(values_.begin(), values_.end(), 0.0);
  }
}

VsMarket::VsMarket(const VsConfig& config)
    : config_(config),
      price_(config.p0),
      window_((config.validate(), config.window), config.p0),
      inv_sqrt_n_(1.0 / std::sqrt(static_cast<double>(config.n_agents))),
      rng_(derive_seed(config.seed, kTrade)),
      quote_rng_(derive_seed(config.seed, kQuote)),
      decisions_(config.n_agents, 0),
      quote_noise_(config.n_agents, 0.0) {}

VsRound VsMarket::step() {
  const double p_trade = trade_probability(price_, window_.mean(), config_.mu);
  for (std::size_t i = 0; i < config_.n_agents; ++i) {
    if (rng_.bernoulli(p_trade)) {
      decisions_[i] = rng_.coin();
      quote_noise_[i] = quote_rng_.normal();
    } else {
      decisions_[i] = 0;
    }
  }
  return apply(decisions_, quote_noise_);
}

VsRound VsMarket::apply(const std::vector<int>& decisions, const std::vector<double>& quote_noise) {
  VsRound r;
  r.moving_avg = window_.mean();

  long long sum = 0;
  double best_ask = std::numeric_limits<double>::infinity();
  double best_bid = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    const int s = decisions[i];
    if (s == 0) continue;
    ++r.participants;
    sum += s;
    if (s > 0) {
      best_ask = std::min(best_ask, price_ + config_.gamma_a * quote_noise[i] + config_.delta);
    } else {
      best_bid = std::max(best_bid, price_ + config_.gamma_b * quote_noise[i] - config_.delta);
    }
  }
  if (std::isfinite(best_ask) && std::isfinite(best_bid)) r.spread = best_ask - best_bid;

  double A = static_cast<double>(sum) * inv_sqrt_n_;
  const double limit = 1.0 - clamp_margin;
  if (A > limit || A < -limit) {
    A = A > 0.0 ? limit : -limit;
    r.clamped = true;
    ++clamps_;
  }
  r.A = A;

  window_.push(price_);
  price_ *= price_multiplier(A);
  r.price = price_;
  ++round_;
  return r;
}

std::vector<int> VsRun::signal() const {
  std::vector<int> out;
  out.reserve(rounds.size());
  int last = 1;
  for (const auto& r : rounds) {
    if (r.A > 0.0) last = 1;
    else if (r.A < 0.0) last = -1;
    out.push_back(last);
  }
  return out;
}

std::vector<double> VsRun::mid() const {
  std::vector<double> out;
  out.reserve(rounds.size() + 1);
  out.push_back(config.p0);
  for (const auto& r : rounds) out.push_back(r.price);
  return out;
}

std::vector<double> VsRun::spreads() const {
  std::vector<double> out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.spread.value_or(std::numeric_limits<double>::quiet_NaN()));
  return out;
}

double VsRun::mean_participation() const {
  if (rounds.empty()) return 0.0;
  double total = 0.0;
  for (const auto& r : rounds) total += static_cast<double>(r.participants);
  return total / static_cast<double>(rounds.size()) / static_cast<double>(config.n_agents);
}

VsRun run_vs(const VsConfig& config) {
  if (config.rounds == 0) throw ConfigError("vs: need at least one round");
  VsMarket market(config);
  VsRun out;
  out.config = config;
  out.rounds.reserve(config.rounds);
  for (std::size_t t = 0; t < config.rounds; ++t) out.rounds.push_back(market.step());
  out.clamp_events = market.clamp_events();
  return out;
}

}  // namespace auction::vs
