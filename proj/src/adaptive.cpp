#include "auction/adaptive.hpp"

#include <cassert>
#include <string>

#include "auction/error.hpp"

namespace auction::adapt {

Mode parse_mode(std::string_view name) {
  if (name == "latest") return Mode::latest;
  if (name == "history") return Mode::history;
  throw ConfigError("unknown adaptation mode '" + std::string(name) + "'");
}

std::string_view to_string(Mode mode) { return mode == Mode::latest ? "latest" : "history"; }

void AdaptConfig::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string("adapt: ") + name + " must be in [0, 1]");
  };
  prob(f1, "f1");
  prob(f2, "f2");
  prob(alpha, "alpha");
}

OmegaValue omega(std::span<const int> history) {
  if (history.empty()) throw ConfigError("omega: empty history");
  const std::size_t M = history.size();
  std::int64_t value = 0;
  for (std::size_t tau = 1; tau <= M; ++tau) {
    const int s = history[tau - 1];
    if (s != 1 && s != -1) throw ConfigError("omega: history entries must be +1 or -1");
    value += s * (std::int64_t{1} << (M - tau));
  }
  return OmegaValue{value, M};
}

OmegaValue omega(std::span<const int> history, std::size_t history_len) {
  if (history.size() != history_len) {
    throw ConfigError("omega: expected " + std::to_string(history_len) + " history entries, got " +
                      std::to_string(history.size()));
  }
  return omega(history);
}

double rewrite_probability(const OmegaValue& omega, double alpha) {
  const double magnitude = static_cast<double>(omega.value < 0 ? -omega.value : omega.value);
  return alpha * magnitude / static_cast<double>(std::int64_t{1} << omega.history_len);
}

namespace {

MutationRecord rewrite_row(mg::MinorityGame& game, int value, double probability, Rng& rng) {
  const std::size_t row = game.prepare_round();
  MutationRecord rec;
  rec.value = value;
  rec.probability = probability;
  for (std::size_t i = 0; i < game.config().n_traders; ++i) {
    if (rng.bernoulli(probability)) {
      game.rewrite(i, row, value, value);
      rec.traders.push_back(i);
    }
  }
  return rec;
}

}  // namespace

MutationRecord adapt_latest(mg::MinorityGame& game, double f1, Rng& rng) {
  return rewrite_row(game, game.previous_sign(), f1, rng);
}

MutationRecord adapt_history(mg::MinorityGame& game, double alpha, Rng& rng) {
  game.prepare_round();
  const OmegaValue w = omega(game.information());
  assert(w.value != 0);
  return rewrite_row(game, w.value > 0 ? 1 : -1, rewrite_probability(w, alpha), rng);
}

MutationRecord restore(mg::MinorityGame& game, double f2, Rng& rng) {
  MutationRecord rec;
  rec.probability = f2;
  for (std::size_t i = 0; i < game.config().n_traders; ++i) {
    if (game.modified(i) && rng.bernoulli(f2)) {
      game.restore(i);
      rec.traders.push_back(i);
    }
  }
  return rec;
}

AdaptiveRun run_adaptive(const mg::GameConfig& config, const AdaptConfig& adapt) {
  adapt.validate();
  if (config.rounds == 0) throw ConfigError("mg: need at least one round");
  mg::MinorityGame game(config);
  Rng rng(derive_seed(config.seed, 5));

  AdaptiveRun out;
  out.adapt = adapt;
  out.game.config = config;
  out.game.rounds.reserve(config.rounds);
  out.modified.reserve(config.rounds);
  out.restored.reserve(config.rounds);

  for (std::size_t t = 0; t < config.rounds; ++t) {
    out.restored.push_back(restore(game, adapt.f2, rng).traders.size());
    game.prepare_round();
    std::size_t modified = 0;
    if (adapt.mode == Mode::latest) {
      if (t >= 1) modified = adapt_latest(game, adapt.f1, rng).traders.size();
    } else {
      const OmegaValue w = omega(game.information());
      out.omega.push_back(w.value);
      out.f3.push_back(rewrite_probability(w, adapt.alpha));
      if (t >= 1) modified = adapt_history(game, adapt.alpha, rng).traders.size();
    }
    out.modified.push_back(modified);
    out.game.rounds.push_back(game.play_round());
  }
  mg::summarize(out.game);
  return out;
}

}  // namespace auction::adapt
