#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

/// Lag-dependent estimators of a signal/price pair.
///
/// All lag arrays are indexed from lag 1: element `l - 1` holds lag `l`.
/// Every estimator is a finite-sample time average normalized by the number
/// of terms that exist at that lag.
namespace auction::stats {

/// Default maximum lag for C(l) and R(l).
inline constexpr std::size_t default_max_lag = 100;

/// C(l) = <eps_t eps_{t+l}> for l = 1..max_lag.
std::vector<double> autocorrelation(std::span<const int> signal, std::size_t max_lag);

/// R(l) = <eps_t (m_{t+l} - m_t)> for l = 1..max_lag. `mid` needs at least
/// one more entry than `signal`; eps_t is paired with the move out of m_t.
std::vector<double> response(std::span<const int> signal, std::span<const double> mid,
                             std::size_t max_lag);

/// sigma^2(l) = <(m_{t+l} - m_t)^2> / l.
double volatility(std::span<const double> mid, std::size_t lag);

/// Inclusive lag interval.
struct LagRange {
  std::size_t first = 1;
  std::size_t last = 1;
};

/// exp(slope) of the least-squares line through (l, log C(l)) over `range`.
/// Non-positive C values are skipped; fewer than two remaining points throw
/// DomainError. For an alternating C(l) = rho^l with rho < 0 only even lags
/// survive and the estimate is |rho|.
double fit_rho(std::span<const double> C, LagRange range);

/// Least-squares line of R against C with a linearity score.
///
/// `nonlinearity` is the root-mean-square residual divided by the range of
/// R; it is zero for exactly collinear points and for constant R.
struct ScatterDiagnostics {
  std::vector<std::pair<double, double>> points;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double nonlinearity = 0.0;
};

ScatterDiagnostics scatter_diagnostics(std::span<const double> C, std::span<const double> R);

/// Rounds whose spread is below a threshold and the gaps between them.
struct WaitingTimes {
  double threshold = 0.0;
  std::vector<std::size_t> transaction_times;
  std::vector<std::size_t> durations;
};

/// NaN spreads (rounds without a quote on one side) never count as
/// transactions.
WaitingTimes extract_waiting_times(std::span<const double> spread, double threshold);

/// Mean and standard error over trials of equally long per-trial arrays.
/// The standard error is the n-1 sample standard deviation over sqrt(k);
/// it is NaN for a single trial.
struct TrialMean {
  std::vector<double> mean;
  std::vector<double> stderr_mean;
};

TrialMean average_trials(std::span<const std::vector<double>> per_trial);

/// Trial-averaged C, R and optional volatility curve.
struct LagStatistics {
  std::size_t max_lag = 0;
  std::vector<double> C;
  std::vector<double> R;
  std::vector<double> stderr_C;
  std::vector<double> stderr_R;
  /// Empty unless a volatility curve was requested.
  std::vector<double> sigma2;
  std::vector<double> stderr_sigma2;
  /// NaN when the fit is undefined.
  double rho_hat = 0.0;
};

LagStatistics combine_trials(std::span<const std::vector<double>> C_trials,
                             std::span<const std::vector<double>> R_trials, LagRange fit_range);

/// Largest drop R(first) - R(second), first < second, measured in units of
/// its trial-wise standard error (std over trials of the per-trial
/// difference, over sqrt(k)). Needs at least two trials.
struct ResponseDrop {
  std::size_t first = 0;
  std::size_t second = 0;
  double drop = 0.0;
  double stderr_drop = 0.0;
  double z = 0.0;
};

ResponseDrop strongest_response_drop(std::span<const std::vector<double>> R_trials);

/// The lag range used when none is given: from lag 1 up to the last lag of
/// the leading run with C(l) > 3 / sqrt(samples), capped at 10 and never
/// shorter than 2 lags.
LagRange auto_fit_range(std::span<const double> C, std::size_t samples);

}  // namespace auction::stats
