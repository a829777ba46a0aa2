#include "auction/lag_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "auction/error.hpp"

namespace auction::stats {
namespace {

void require_lags(std::size_t length, std::size_t max_lag, const char* what) {
  if (max_lag == 0) throw ConfigError(std::string(what) + ": max_lag must be at least 1");
  if (length <= max_lag) {
    throw InsufficientData(std::string(what) + ": series of length " + std::to_string(length) +
                           " is too short for lag " + std::to_string(max_lag));
  }
}

}  // namespace

std::vector<double> autocorrelation(std::span<const int> signal, std::size_t max_lag) {
  require_lags(signal.size(), max_lag, "autocorrelation");
  const std::size_t T = signal.size();
  std::vector<double> C(max_lag);
  for (std::size_t l = 1; l <= max_lag; ++l) {
    long long sum = 0;
    for (std::size_t t = 0; t + l < T; ++t) sum += signal[t] * signal[t + l];
    C[l - 1] = static_cast<double>(sum) / static_cast<double>(T - l);
  }
  return C;
}

std::vector<double> response(std::span<const int> signal, std::span<const double> mid,
                             std::size_t max_lag) {
  require_lags(signal.size(), max_lag, "response");
  if (mid.size() < signal.size() + 1) {
    throw InsufficientData("response: mid series needs one more entry than the signal");
  }
  std::vector<double> R(max_lag);
  for (std::size_t l = 1; l <= max_lag; ++l) {
    const std::size_t terms = std::min(signal.size(), mid.size() - l);
    double sum = 0.0;
    for (std::size_t t = 0; t < terms; ++t) sum += signal[t] * (mid[t + l] - mid[t]);
    R[l - 1] = sum / static_cast<double>(terms);
  }
  return R;
}

double volatility(std::span<const double> mid, std::size_t lag) {
  require_lags(mid.size(), lag, "volatility");
  const std::size_t terms = mid.size() - lag;
  double sum = 0.0;
  for (std::size_t t = 0; t < terms; ++t) {
    const double d = mid[t + lag] - mid[t];
    sum += d * d;
  }
  return sum / static_cast<double>(terms) / static_cast<double>(lag);
}

double fit_rho(std::span<const double> C, LagRange range) {
  if (range.first < 1 || range.last < range.first || range.last > C.size()) {
    throw ConfigError("fit_rho: lag range [" + std::to_string(range.first) + ", " +
                      std::to_string(range.last) + "] outside 1.." + std::to_string(C.size()));
  }
  double n = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t l = range.first; l <= range.last; ++l) {
    if (C[l - 1] <= 0.0) continue;
    n += 1.0;
    sx += static_cast<double>(l);
    sy += std::log(C[l - 1]);
  }
  if (n < 2.0) throw DomainError("fit_rho: fewer than two positive C(l) values in range");
  const double mx = sx / n;
  const double my = sy / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t l = range.first; l <= range.last; ++l) {
    if (C[l - 1] <= 0.0) continue;
    const double dx = static_cast<double>(l) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(C[l - 1]) - my);
  }
  return std::exp(sxy / sxx);
}

ScatterDiagnostics scatter_diagnostics(std::span<const double> C, std::span<const double> R) {
  if (C.size() != R.size()) throw ConfigError("scatter_diagnostics: C and R differ in length");
  if (C.size() < 3) throw InsufficientData("scatter_diagnostics: need at least 3 points");

  ScatterDiagnostics d;
  const double n = static_cast<double>(C.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < C.size(); ++i) {
    d.points.emplace_back(C[i], R[i]);
    mx += C[i];
    my += R[i];
  }
  mx /= n;
  my /= n;

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < C.size(); ++i) {
    const double dx = C[i] - mx;
    const double dy = R[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw DomainError("scatter_diagnostics: all C values are equal");

  d.slope = sxy / sxx;
  d.intercept = my - d.slope * mx;

  double ss_res = 0.0;
  for (std::size_t i = 0; i < C.size(); ++i) {
    const double e = R[i] - (d.intercept + d.slope * C[i]);
    ss_res += e * e;
  }
  d.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;

  const auto [lo, hi] = std::minmax_element(R.begin(), R.end());
  const double range = *hi - *lo;
  d.nonlinearity = range > 0.0 ? std::sqrt(ss_res / n) / range : 0.0;
  return d;
}

WaitingTimes extract_waiting_times(std::span<const double> spread, double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("waiting times: threshold must be positive");
  WaitingTimes w;
  w.threshold = threshold;
  for (std::size_t t = 0; t < spread.size(); ++t) {
    if (spread[t] < threshold) w.transaction_times.push_back(t);
  }
  for (std::size_t k = 1; k < w.transaction_times.size(); ++k) {
    w.durations.push_back(w.transaction_times[k] - w.transaction_times[k - 1]);
  }
  return w;
}

TrialMean average_trials(std::span<const std::vector<double>> per_trial) {
  if (per_trial.empty()) throw InsufficientData("average_trials: no trials");
  const std::size_t len = per_trial.front().size();
  for (const auto& trial : per_trial) {
    if (trial.size() != len) throw ConfigError("average_trials: trials differ in length");
  }
  const double k = static_cast<double>(per_trial.size());
  TrialMean out;
  out.mean.assign(len, 0.0);
  out.stderr_mean.assign(len, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < len; ++i) {
    double sum = 0.0;
    for (const auto& trial : per_trial) sum += trial[i];
    out.mean[i] = sum / k;
    if (per_trial.size() > 1) {
      double ss = 0.0;
      for (const auto& trial : per_trial) ss += (trial[i] - out.mean[i]) * (trial[i] - out.mean[i]);
      out.stderr_mean[i] = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
    }
  }
  return out;
}

LagStatistics combine_trials(std::span<const std::vector<double>> C_trials,
                             std::span<const std::vector<double>> R_trials, LagRange fit_range) {
  auto c = average_trials(C_trials);
  auto r = average_trials(R_trials);
  if (c.mean.size() != r.mean.size()) throw ConfigError("combine_trials: C and R lag counts differ");

  LagStatistics s;
  s.max_lag = c.mean.size();
  s.C = std::move(c.mean);
  s.stderr_C = std::move(c.stderr_mean);
  s.R = std::move(r.mean);
  s.stderr_R = std::move(r.stderr_mean);
  try {
    s.rho_hat = fit_rho(s.C, fit_range);
  } catch (const DomainError&) {
    s.rho_hat = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

ResponseDrop strongest_response_drop(std::span<const std::vector<double>> R_trials) {
  if (R_trials.size() < 2) throw InsufficientData("response drop: need at least two trials");
  const std::size_t L = R_trials.front().size();
  for (const auto& trial : R_trials) {
    if (trial.size() != L) throw ConfigError("response drop: trials differ in length");
  }
  const double k = static_cast<double>(R_trials.size());
  ResponseDrop best;
  best.z = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < L; ++a) {
    for (std::size_t b = a + 1; b < L; ++b) {
      double mean = 0.0;
      for (const auto& trial : R_trials) mean += trial[a] - trial[b];
      mean /= k;
      double ss = 0.0;
      for (const auto& trial : R_trials) {
        const double d = trial[a] - trial[b] - mean;
        ss += d * d;
      }
      const double se = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
      const double z = se > 0.0 ? mean / se : (mean > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      if (z > best.z) best = ResponseDrop{a + 1, b + 1, mean, se, z};
    }
  }
  return best;
}

LagRange auto_fit_range(std::span<const double> C, std::size_t samples) {
  const double floor = 3.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(samples, 1)));
  const std::size_t cap = std::min<std::size_t>(10, C.size());
  std::size_t last = 0;
  while (last < cap && C[last] > floor) ++last;
  return LagRange{1, std::clamp<std::size_t>(last, std::min<std::size_t>(2, C.size()), cap)};
}

}  // namespace auction::stats
