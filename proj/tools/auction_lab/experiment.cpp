#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "auction/adaptive.hpp"
#include "auction/error.hpp"
#include "auction/lag_stats.hpp"
#include "auction/minority_game.hpp"
#include "auction/mrr.hpp"
#include "auction/ticks.hpp"
#include "auction/vikram_sinha.hpp"

namespace auction::cli {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Synthetic quote files start here, one tick per second.
const std::chrono::sys_seconds kTickEpoch =
    std::chrono::sys_days{std::chrono::year{2009} / 12 / 24} + std::chrono::seconds{0};

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string lag_table(const stats::LagStatistics& s) {
  std::string out = "lag,C,stderr_C,R,stderr_R\n";
  for (std::size_t i = 0; i < s.max_lag; ++i) {
    out += std::to_string(i + 1) + ',' + format_number(s.C[i]) + ',' + format_number(s.stderr_C[i]) +
           ',' + format_number(s.R[i]) + ',' + format_number(s.stderr_R[i]) + '\n';
  }
  return out;
}

std::string scatter_table(const std::vector<double>& C, const std::vector<double>& R) {
  std::string out = "C,R\n";
  for (std::size_t i = 0; i < C.size(); ++i) out += format_number(C[i]) + ',' + format_number(R[i]) + '\n';
  return out;
}

std::string histogram_table(const ticks::EmpiricalHistogram& h, bool with_gaussian) {
  std::string out = with_gaussian ? "bin_lo,bin_hi,count,gaussian\n" : "bin_lo,bin_hi,count\n";
  const double total =
      static_cast<double>(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}));
  const auto cdf = [&](double x) {
    if (h.gaussian_std <= 0.0) return x < h.gaussian_mean ? 0.0 : 1.0;
    return 0.5 * std::erfc(-(x - h.gaussian_mean) / (h.gaussian_std * std::sqrt(2.0)));
  };
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out += format_number(h.bin_edges[i]) + ',' + format_number(h.bin_edges[i + 1]) + ',' +
           std::to_string(h.counts[i]);
    if (with_gaussian) {
      out += ',' + format_number(total * (cdf(h.bin_edges[i + 1]) - cdf(h.bin_edges[i])));
    }
    out += '\n';
  }
  return out;
}

// Scatter fields of a summary; null when the scatter is degenerate.
void scatter_fields(const std::vector<double>& C, const std::vector<double>& R, Json& into) {
  try {
    const auto d = stats::scatter_diagnostics(C, R);
    into["slope"] = number(d.slope);
    into["intercept"] = number(d.intercept);
    into["r_squared"] = number(d.r_squared);
    into["nonlinearity"] = number(d.nonlinearity);
  } catch (const DomainError&) {
    into["slope"] = into["intercept"] = into["r_squared"] = into["nonlinearity"] = nullptr;
  } catch (const InsufficientData&) {
    into["slope"] = into["intercept"] = into["r_squared"] = into["nonlinearity"] = nullptr;
  }
}

stats::LagRange fit_range(std::size_t first, std::size_t last, const std::vector<double>& C,
                          std::size_t samples) {
  if (last != 0) return {first, last};
  const auto autor = stats::auto_fit_range(C, samples);
  return {first, std::max(first, autor.last)};
}

double median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }), v.end());
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string series_mode(const ParamMap& params) {
  auto mode = get_string(params, "series");
  if (mode != "none" && mode != "first" && mode != "all") {
    throw ConfigError("parameter 'series': expected none, first or all, got '" + mode + "'");
  }
  return mode;
}

std::size_t positive(const ParamMap& params, std::string_view key) {
  const auto v = get_size(params, key);
  if (v == 0) throw ConfigError("parameter '" + std::string(key) + "' must be positive");
  return v;
}

std::string quote_text(std::span<const double> bid, std::span<const double> ask) {
  std::ostringstream out;
  std::vector<ticks::Tick> rows;
  rows.reserve(bid.size());
  for (std::size_t t = 0; t < bid.size(); ++t) {
    rows.push_back(ticks::make_tick(kTickEpoch + std::chrono::seconds(t), bid[t], ask[t]));
  }
  ticks::write_ticks(out, rows);
  return out.str();
}

class MrrExperiment final : public Experiment {
 public:
  explicit MrrExperiment(const ParamMap& params) : Experiment(params) {
    p_.theta = get_double(params, "theta");
    p_.rho = get_double(params, "rho");
    p_.phi = get_double(params, "phi");
    p_.sigma_noise = get_double(params, "sigma");
    p_.p0 = get_double(params, "p0");
    const auto noise = get_string(params, "noise");
    if (noise == "gaussian") {
      p_.noise = mrr::NoiseKind::gaussian;
    } else if (noise == "uniform") {
      p_.noise = mrr::NoiseKind::uniform;
    } else {
      throw ConfigError("parameter 'noise': expected gaussian or uniform, got '" + noise + "'");
    }
    p_.validate();
    T_ = positive(params, "T");
    trials_ = positive(params, "trials");
    vol_max_lag_ = get_size(params, "vol_max_lag");
    ticks_ = get_bool(params, "ticks");
    samples_ = T_ - 1;
  }

  std::size_t trials() const override { return trials_; }

  TrialResult run_trial(std::size_t trial, std::uint64_t seed) const override {
    const auto path = mrr::simulate(p_, T_, seed);
    const std::span<const int> signal(path.signal.data(), path.signal.size() - 1);
    TrialResult r;
    r.seed = seed;
    r.C = stats::autocorrelation(signal, max_lag_);
    r.R = stats::response(signal, path.mid, max_lag_);
    for (std::size_t l = 1; l <= vol_max_lag_; ++l) r.sigma2.push_back(stats::volatility(path.mid, l));
    r.summary["seed"] = seed;
    scatter_fields(r.C, r.R, r.summary);
    if (keep_series(trial)) {
      std::string s = "t,price,bid,ask,mid,signal\n";
      for (std::size_t t = 0; t < T_; ++t) {
        s += std::to_string(t) + ',' + format_number(path.price[t]) + ',' + format_number(path.bid[t]) +
             ',' + format_number(path.ask[t]) + ',' + format_number(path.mid[t]) + ',' +
             std::to_string(path.signal[t]) + '\n';
      }
      r.series = std::move(s);
    }
    if (ticks_ && keep_series(trial)) r.ticks = quote_text(path.bid, path.ask);
    return r;
  }

 protected:
  void finish_extra(const std::filesystem::path& dir, const std::vector<TrialResult>& results,
                    Json& aggregate, std::vector<std::string>& outputs) const override {
    const std::size_t lags = std::max(max_lag_, vol_max_lag_);
    std::string s = "lag,C,R,sigma2,sigma2_exact\n";
    for (std::size_t l = 1; l <= lags; ++l) {
      double var = kNaN;
      try {
        var = mrr::analytic_var(p_.sigma_noise, p_.theta, p_.rho, l);
      } catch (const DomainError&) {
      }
      s += std::to_string(l) + ',' + format_number(mrr::analytic_C(p_.rho, l)) + ',' +
           format_number(mrr::analytic_R(p_.theta, p_.rho, l)) + ',' + format_number(var) + ',' +
           format_number(mrr::analytic_var_exact(p_.sigma_noise, p_.theta, p_.rho, l)) + '\n';
    }
    write_output(dir, "analytic.csv", s, outputs);
    aggregate["sigma2_limit"] = number(mrr::analytic_var_limit(p_.sigma_noise, p_.theta, p_.rho));
    (void)results;
  }

 private:
  mrr::MrrParams p_;
  std::size_t T_ = 0;
  std::size_t trials_ = 0;
  std::size_t vol_max_lag_ = 0;
  bool ticks_ = false;
};

class MgExperiment final : public Experiment {
 public:
  explicit MgExperiment(const ParamMap& params) : Experiment(params) {
    c_.n_traders = get_size(params, "N");
    c_.history_len = get_size(params, "M");
    c_.beta = get_double(params, "beta");
    c_.psi = get_double(params, "psi");
    c_.zeta = get_double(params, "zeta");
    c_.gamma_a = get_double(params, "gamma_a");
    c_.gamma_b = get_double(params, "gamma_b");
    c_.delta = get_double(params, "delta");
    c_.p0 = get_double(params, "p0");
    c_.rounds = positive(params, "T");
    c_.validate();
    const auto mode = get_string(params, "adapt");
    adaptive_ = mode != "none";
    if (adaptive_) {
      a_.mode = adapt::parse_mode(mode);
      a_.f1 = get_double(params, "f1");
      a_.f2 = get_double(params, "f2");
      a_.alpha = get_double(params, "alpha");
      a_.validate();
    }
    trials_ = positive(params, "trials");
    ticks_ = get_bool(params, "ticks");
    samples_ = c_.rounds;
  }

  std::size_t trials() const override { return trials_; }

  TrialResult run_trial(std::size_t trial, std::uint64_t seed) const override {
    auto config = c_;
    config.seed = seed;
    adapt::AdaptiveRun ar;
    if (adaptive_) {
      ar = adapt::run_adaptive(config, a_);
    } else {
      ar.game = mg::run(config);
    }
    const auto& run = ar.game;
    const auto signal = run.signal();
    const auto mid = run.mid();
    const auto spreads = run.spreads();

    TrialResult r;
    r.seed = seed;
    r.C = stats::autocorrelation(signal, max_lag_);
    r.R = stats::response(signal, mid, max_lag_);
    for (double s : spreads) {
      if (std::isfinite(s)) r.spreads.push_back(s);
    }
    r.summary["seed"] = seed;
    r.summary["sigma_A"] = number(run.sigma_A);
    r.summary["spread_missing"] = run.spread_missing;
    r.summary["spread_nonpositive"] = run.spread_nonpositive;
    r.summary["psi_warning"] = run.psi_warning;
    if (adaptive_) {
      const auto mean = [](const std::vector<std::size_t>& v) {
        return v.empty() ? 0.0
                         : static_cast<double>(std::accumulate(v.begin(), v.end(), std::size_t{0})) /
                               static_cast<double>(v.size());
      };
      r.summary["modified_mean"] = number(mean(ar.modified));
      r.summary["restored_mean"] = number(mean(ar.restored));
    }
    scatter_fields(r.C, r.R, r.summary);
    if (run.psi_warning) {
      r.warnings.push_back("trial " + std::to_string(trial) + ": psi " + format_number(c_.psi) +
                           " is not below sigma_A " + format_number(run.sigma_A));
    }

    if (keep_series(trial)) {
      std::string s = "t,A,epsilon,price,spread,n_plus,n_minus";
      s += adaptive_ ? ",modified,restored,f3\n" : "\n";
      for (std::size_t t = 0; t < run.rounds.size(); ++t) {
        const auto& rec = run.rounds[t];
        s += std::to_string(t) + ',' + format_number(rec.A) + ',' + std::to_string(rec.epsilon) + ',' +
             format_number(rec.price) + ',' + format_number(spreads[t]) + ',' +
             std::to_string(rec.n_plus) + ',' + std::to_string(rec.n_minus);
        if (adaptive_) {
          s += ',' + std::to_string(ar.modified[t]) + ',' + std::to_string(ar.restored[t]) + ',' +
               (ar.f3.empty() ? std::string() : format_number(ar.f3[t]));
        }
        s += '\n';
      }
      r.series = std::move(s);
    }
    if (ticks_ && keep_series(trial)) {
      // Quote around p(t) with the round's spread; rounds without a spread
      // repeat the last one (2 delta before the first).
      std::vector<double> bid(run.rounds.size()), ask(run.rounds.size());
      double last = 2.0 * c_.delta;
      for (std::size_t t = 0; t < run.rounds.size(); ++t) {
        if (std::isfinite(spreads[t])) last = spreads[t];
        bid[t] = mid[t] - 0.5 * last;
        ask[t] = mid[t] + 0.5 * last;
      }
      r.ticks = quote_text(bid, ask);
    }
    return r;
  }

 protected:
  void finish_extra(const std::filesystem::path&, const std::vector<TrialResult>& results,
                    Json& aggregate, std::vector<std::string>&) const override {
    double sigma = 0.0;
    std::size_t missing = 0, nonpositive = 0, warned = 0;
    for (const auto& r : results) {
      sigma += r.summary["sigma_A"].get<double>();
      missing += r.summary["spread_missing"].get<std::size_t>();
      nonpositive += r.summary["spread_nonpositive"].get<std::size_t>();
      warned += r.summary["psi_warning"].get<bool>() ? 1 : 0;
    }
    aggregate["sigma_A_mean"] = number(sigma / static_cast<double>(results.size()));
    aggregate["spread_missing"] = missing;
    aggregate["spread_nonpositive"] = nonpositive;
    aggregate["psi_warning_trials"] = warned;
  }

 private:
  mg::GameConfig c_;
  adapt::AdaptConfig a_;
  bool adaptive_ = false;
  std::size_t trials_ = 0;
  bool ticks_ = false;
};

class VsExperiment final : public Experiment {
 public:
  explicit VsExperiment(const ParamMap& params) : Experiment(params) {
    c_.n_agents = get_size(params, "N");
    c_.mu = get_double(params, "mu");
    c_.window = get_size(params, "tau");
    c_.gamma_a = get_double(params, "gamma_a");
    c_.gamma_b = get_double(params, "gamma_b");
    c_.delta = get_double(params, "delta");
    c_.p0 = get_double(params, "p0");
    c_.rounds = positive(params, "T");
    c_.validate();
    trials_ = positive(params, "trials");
    samples_ = c_.rounds;
  }

  std::size_t trials() const override { return trials_; }

  TrialResult run_trial(std::size_t trial, std::uint64_t seed) const override {
    auto config = c_;
    config.seed = seed;
    const auto run = vs::run_vs(config);
    const auto signal = run.signal();
    const auto mid = run.mid();
    const auto spreads = run.spreads();

    TrialResult r;
    r.seed = seed;
    r.C = stats::autocorrelation(signal, max_lag_);
    r.R = stats::response(signal, mid, max_lag_);
    for (double s : spreads) {
      if (std::isfinite(s)) r.spreads.push_back(s);
    }
    r.summary["seed"] = seed;
    r.summary["clamp_events"] = run.clamp_events;
    r.summary["participation"] = number(run.mean_participation());
    r.summary["final_price"] = number(run.rounds.back().price);
    scatter_fields(r.C, r.R, r.summary);
    if (run.clamp_events > 0) {
      r.warnings.push_back("trial " + std::to_string(trial) + ": |A| clamped in " +
                           std::to_string(run.clamp_events) + " rounds");
    }
    if (keep_series(trial)) {
      std::string s = "t,A,price,moving_avg,participants,spread\n";
      for (std::size_t t = 0; t < run.rounds.size(); ++t) {
        const auto& rec = run.rounds[t];
        s += std::to_string(t) + ',' + format_number(rec.A) + ',' + format_number(rec.price) + ',' +
             format_number(rec.moving_avg) + ',' + std::to_string(rec.participants) + ',' +
             format_number(spreads[t]) + '\n';
      }
      r.series = std::move(s);
    }
    return r;
  }

 protected:
  void finish_extra(const std::filesystem::path&, const std::vector<TrialResult>& results,
                    Json& aggregate, std::vector<std::string>&) const override {
    std::size_t clamps = 0;
    double participation = 0.0;
    for (const auto& r : results) {
      clamps += r.summary["clamp_events"].get<std::size_t>();
      participation += r.summary["participation"].get<double>();
    }
    aggregate["clamp_events"] = clamps;
    aggregate["participation_mean"] = number(participation / static_cast<double>(results.size()));
  }

 private:
  vs::VsConfig c_;
  std::size_t trials_ = 0;
};

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_output(const std::filesystem::path& dir, const std::string& name,
                  const std::string& content, std::vector<std::string>& outputs) {
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
  outputs.push_back(name);
}

Experiment::Experiment(const ParamMap& params)
    : max_lag_(positive(params, "max_lag")),
      fit_first_(positive(params, "fit_first")),
      fit_last_(get_size(params, "fit_last")),
      series_mode_(series_mode(params)) {
  if (params.count("bins") != 0) bins_ = positive(params, "bins");
  if (fit_last_ != 0 && fit_last_ < fit_first_) {
    throw ConfigError("fit_last must be 0 or at least fit_first");
  }
  if (std::max(fit_first_, fit_last_) > max_lag_) throw ConfigError("fit range exceeds max_lag");
}

bool Experiment::keep_series(std::size_t trial) const {
  return series_mode_ == "all" || (series_mode_ == "first" && trial == 0);
}

void Experiment::finish_extra(const std::filesystem::path&, const std::vector<TrialResult>&, Json&,
                              std::vector<std::string>&) const {}

Json Experiment::finish(const std::filesystem::path& dir, std::vector<TrialResult>& results,
                        std::vector<std::string>& outputs) const {
  std::vector<std::vector<double>> C, R, V;
  std::vector<double> nonlinearity;
  for (auto& r : results) {
    C.push_back(r.C);
    R.push_back(r.R);
    if (!r.sigma2.empty()) V.push_back(r.sigma2);
    const auto& nl = r.summary["nonlinearity"];
    nonlinearity.push_back(nl.is_number() ? nl.get<double>() : kNaN);
  }
  const auto mean_C = stats::average_trials(C).mean;
  const auto range = fit_range(fit_first_, fit_last_, mean_C, samples_);
  const auto s = stats::combine_trials(C, R, range);

  write_output(dir, "stats.csv", lag_table(s), outputs);
  write_output(dir, "scatter.csv", scatter_table(s.C, s.R), outputs);

  Json aggregate = Json::object();
  aggregate["trials"] = results.size();
  aggregate["samples"] = samples_;
  aggregate["max_lag"] = s.max_lag;
  aggregate["fit_first"] = range.first;
  aggregate["fit_last"] = range.last;
  aggregate["rho_hat"] = number(s.rho_hat);
  aggregate["C1"] = number(s.C[0]);
  aggregate["stderr_C1"] = number(s.stderr_C[0]);
  aggregate["R1"] = number(s.R[0]);
  aggregate["stderr_R1"] = number(s.stderr_R[0]);
  scatter_fields(s.C, s.R, aggregate);
  aggregate["nonlinearity_median"] = number(median(nonlinearity));
  if (results.size() >= 2) {
    const auto d = stats::strongest_response_drop(R);
    aggregate["response_drop"] = {{"first", d.first},
                                  {"second", d.second},
                                  {"drop", number(d.drop)},
                                  {"stderr", number(d.stderr_drop)},
                                  {"z", number(d.z)}};
  } else {
    aggregate["response_drop"] = nullptr;
  }

  if (!V.empty()) {
    const auto v = stats::average_trials(V);
    std::string text = "lag,sigma2,stderr_sigma2\n";
    for (std::size_t i = 0; i < v.mean.size(); ++i) {
      text += std::to_string(i + 1) + ',' + format_number(v.mean[i]) + ',' +
              format_number(v.stderr_mean[i]) + '\n';
    }
    write_output(dir, "volatility.csv", text, outputs);
  }

  std::vector<double> pooled;
  for (const auto& r : results) pooled.insert(pooled.end(), r.spreads.begin(), r.spreads.end());
  if (!pooled.empty()) {
    write_output(dir, "spread_hist.csv", histogram_table(ticks::histogram(pooled, bins_), false),
                 outputs);
  }

  for (std::size_t k = 0; k < results.size(); ++k) {
    if (!results[k].series.empty()) {
      write_output(dir, "series_trial" + std::to_string(k) + ".csv", results[k].series, outputs);
    }
    if (!results[k].ticks.empty()) {
      write_output(dir, "ticks_trial" + std::to_string(k) + ".txt", results[k].ticks, outputs);
    }
  }

  finish_extra(dir, results, aggregate, outputs);

  Json summary = Json::object();
  summary["aggregate"] = aggregate;
  summary["trials"] = Json::array();
  for (const auto& r : results) summary["trials"].push_back(r.summary);
  return summary;
}

std::unique_ptr<Experiment> make_experiment(std::string_view command, const ParamMap& params) {
  if (command == "mrr") return std::make_unique<MrrExperiment>(params);
  if (command == "mg") return std::make_unique<MgExperiment>(params);
  if (command == "vs") return std::make_unique<VsExperiment>(params);
  throw ConfigError("no simulation named '" + std::string(command) + "'");
}

Json run_analyze(const ParamMap& params, const std::filesystem::path& dir,
                 std::vector<std::string>& outputs) {
  const auto input = get_string(params, "input");
  if (input.empty()) throw ConfigError("analyze: no input file");
  const auto policy = ticks::parse_zero_policy(get_string(params, "zero_policy"));
  const auto max_lag = positive(params, "max_lag");
  const auto fit_first = positive(params, "fit_first");
  const auto fit_last = get_size(params, "fit_last");
  const auto bins = positive(params, "bins");
  const auto sbar_text = get_string(params, "sbar");
  double sbar = 0.0;
  if (!sbar_text.empty()) {
    sbar = get_double(params, "sbar");
    if (!(sbar > 0.0)) throw ConfigError("parameter 'sbar' must be positive");
  }

  std::ifstream in(input, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file " + input);
  const auto file = ticks::read_ticks(in);
  const auto series = ticks::derive_series(file.ticks, policy);

  Json summary = Json::object();
  summary["length"] = series.length();
  summary["out_of_order"] = file.out_of_order;
  summary["zero_policy"] = std::string(ticks::to_string(policy));

  std::string text = "t,mid,ret,signal,spread\n";
  for (std::size_t t = 0; t < series.length(); ++t) {
    text += std::to_string(t) + ',' + format_number(series.mid[t]) + ',';
    if (t < series.ret.size()) {
      text += format_number(series.ret[t]) + ',' + std::to_string(series.signal[t]);
    } else {
      text += ',';
    }
    text += ',' + format_number(series.spread[t]) + '\n';
  }
  write_output(dir, "derived.csv", text, outputs);

  const auto rh = ticks::return_histogram(series, bins);
  write_output(dir, "return_hist.csv", histogram_table(rh, true), outputs);
  summary["return_mean"] = number(rh.gaussian_mean);
  summary["return_std"] = number(rh.gaussian_std);
  write_output(dir, "spread_hist.csv", histogram_table(ticks::spread_distribution(series, bins), false),
               outputs);

  if (!sbar_text.empty()) {
    const auto w = stats::extract_waiting_times(series.spread, sbar);
    std::string d;
    for (auto v : w.durations) d += std::to_string(v) + '\n';
    write_output(dir, "waiting_times.txt", d, outputs);
    summary["sbar"] = sbar;
    summary["transactions"] = w.transaction_times.size();
  }

  std::vector<std::vector<double>> C{stats::autocorrelation(series.signal, max_lag)};
  std::vector<std::vector<double>> R{stats::response(series.signal, series.mid, max_lag)};
  const auto range = fit_range(fit_first, fit_last, C[0], series.signal.size());
  if (range.last > max_lag) throw ConfigError("fit range exceeds max_lag");
  const auto s = stats::combine_trials(C, R, range);
  write_output(dir, "stats.csv", lag_table(s), outputs);
  write_output(dir, "scatter.csv", scatter_table(s.C, s.R), outputs);
  summary["fit_first"] = range.first;
  summary["fit_last"] = range.last;
  summary["rho_hat"] = number(s.rho_hat);
  summary["C1"] = number(s.C[0]);
  summary["R1"] = number(s.R[0]);
  scatter_fields(s.C, s.R, summary);
  return summary;
}

}  // namespace auction::cli
