#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "auction/error.hpp"
#include "auction/lag_stats.hpp"
#include "auction/minority_game.hpp"
#include "auction/mrr.hpp"
#include "auction/random.hpp"

using namespace auction;
using namespace auction::stats;

namespace {

// Least squares through the 2x2 normal equations solved by Cramer's rule,
// accumulated in long double.
struct Line {
  double slope, intercept, rms;
};

Line normal_equations(const std::vector<double>& x, const std::vector<double>& y) {
  long double n = x.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double det = n * sxx - sx * sx;
  const long double b = (n * sxy - sx * sy) / det;
  const long double a = (sy * sxx - sx * sxy) / det;
  long double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double e = y[i] - (a + b * x[i]);
    ss += e * e;
  }
  return {static_cast<double>(b), static_cast<double>(a), static_cast<double>(std::sqrt(ss / n))};
}

std::vector<int> coin_flips(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> v(n);
  for (auto& s : v) s = rng.coin();
  return v;
}

}  // namespace

TEST(Autocorrelation, AllPlusOne) {
  const std::vector<int> s(50, 1);
  for (double c : autocorrelation(s, 10)) EXPECT_EQ(c, 1.0);
}

TEST(Autocorrelation, Alternating) {
  std::vector<int> s(51);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = i % 2 == 0 ? 1 : -1;
  const auto C = autocorrelation(s, 4);
  EXPECT_EQ(C[0], -1.0);
  EXPECT_EQ(C[1], 1.0);
  EXPECT_EQ(C[2], -1.0);
}

TEST(Autocorrelation, NormalizesByValidTerms) {
  const std::vector<int> s = {1, 1, -1, 1};
  const auto C = autocorrelation(s, 2);
  EXPECT_DOUBLE_EQ(C[0], (1.0 - 1.0 - 1.0) / 3.0);
  EXPECT_DOUBLE_EQ(C[1], (-1.0 + 1.0) / 2.0);
}

TEST(Autocorrelation, MarkovChain) {
  mrr::MrrParams p;
  p.rho = 0.5;
  const auto path = mrr::simulate(p, 100000, 42);
  const auto C = autocorrelation(path.signal, 2);
  EXPECT_NEAR(C[0], 0.5, 0.02);
  EXPECT_NEAR(C[1], 0.25, 0.02);
}

TEST(Autocorrelation, FairCoinIsUncorrelated) {
  const auto C = autocorrelation(coin_flips(100000, 9), 20);
  for (double c : C) EXPECT_LT(std::abs(c), 0.02);
}

TEST(Autocorrelation, ReversalSymmetry) {
  auto s = coin_flips(1000, 4);
  const auto forward = autocorrelation(s, 30);
  std::reverse(s.begin(), s.end());
  EXPECT_EQ(autocorrelation(s, 30), forward);
}

TEST(Autocorrelation, BoundedByOne) {
  mrr::MrrParams p;
  p.rho = 0.9;
  const auto path = mrr::simulate(p, 5000, 1);
  for (double c : autocorrelation(path.signal, 100)) EXPECT_LE(std::abs(c), 1.0 + 1e-12);
}

TEST(Autocorrelation, TooShort) {
  const std::vector<int> s = {1, -1, 1};
  EXPECT_THROW(autocorrelation(s, 3), InsufficientData);
  EXPECT_NO_THROW(autocorrelation(s, 2));
  EXPECT_THROW(autocorrelation(s, 0), ConfigError);
}

TEST(Response, ConstantMidGivesZero) {
  const auto s = coin_flips(200, 1);
  const std::vector<double> mid(201, 5.0);
  for (double r : response(s, mid, 20)) EXPECT_EQ(r, 0.0);
}

TEST(Response, LinearInMid) {
  const auto s = coin_flips(500, 2);
  Rng rng(3);
  std::vector<double> mid(501), scaled(501);
  for (std::size_t i = 0; i < mid.size(); ++i) {
    mid[i] = rng.normal();
    scaled[i] = 4.0 * mid[i];
  }
  const auto R = response(s, mid, 30);
  const auto R4 = response(s, scaled, 30);
  for (std::size_t l = 0; l < R.size(); ++l) EXPECT_EQ(R4[l], 4.0 * R[l]);
}

TEST(Response, HandComputed) {
  const std::vector<int> s = {1, -1, 1};
  const std::vector<double> m = {0.0, 1.0, 3.0, 2.0};
  const auto R = response(s, m, 2);
  EXPECT_DOUBLE_EQ(R[0], (1.0 * 1.0 + -1.0 * 2.0 + 1.0 * -1.0) / 3.0);
  EXPECT_DOUBLE_EQ(R[1], (1.0 * 3.0 + -1.0 * 1.0) / 2.0);
}

TEST(Response, MidMustBeLonger) {
  const std::vector<int> s = {1, -1, 1, 1};
  const std::vector<double> m = {0.0, 1.0, 3.0, 2.0};
  EXPECT_THROW(response(s, m, 2), InsufficientData);
}

TEST(Response, MrrNoiselessMatchesClosedFormWithinThreeStderr) {
  mrr::MrrParams p;
  p.theta = 1.5;
  p.rho = 0.5;
  p.sigma_noise = 0.0;
  std::vector<std::vector<double>> Rs, Cs;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto path = mrr::simulate(p, 100000, trial_seed(7, 0, k));
    const std::span<const int> sig(path.signal.data(), path.signal.size() - 1);
    Rs.push_back(response(sig, path.mid, 20));
    Cs.push_back(autocorrelation(sig, 20));
  }
  const auto s = combine_trials(Cs, Rs, {1, 5});
  EXPECT_LE(std::abs(s.R[0] - 0.75), 3.0 * s.stderr_R[0] + 1e-12);
  EXPECT_LE(std::abs(s.R[19] - 1.5), 3.0 * s.stderr_R[19]);
}

TEST(Volatility, Ramp) {
  std::vector<double> m(100);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.3 * static_cast<double>(i);
  for (std::size_t l = 1; l <= 10; ++l) {
    EXPECT_NEAR(volatility(m, l), static_cast<double>(l) * 0.09, 1e-12);
  }
  EXPECT_THROW(volatility(m, 100), InsufficientData);
}

TEST(Volatility, MrrEndpoints) {
  mrr::MrrParams p;
  const auto path = mrr::simulate(p, 100000, 5);
  EXPECT_NEAR(volatility(path.mid, 1), 1.5625, 0.02 * 1.5625);
  // One path has only ~T/200 independent blocks at lag 200; use ten.
  std::vector<double> v;
  for (std::uint64_t k = 0; k < 10; ++k) v.push_back(volatility(mrr::simulate(p, 100000, trial_seed(5, 0, k)).mid, 200));
  double mean = 0.0, ss = 0.0;
  for (double x : v) mean += x / 10.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double se = std::sqrt(ss / 9.0 / 10.0);
  EXPECT_NEAR(mean, mrr::analytic_var_exact(p.sigma_noise, p.theta, p.rho, 200), 3.0 * se);
}

TEST(FitRho, ExactGeometric) {
  for (double rho : {0.5, 0.24}) {
    std::vector<double> C(10);
    for (std::size_t l = 1; l <= 10; ++l) C[l - 1] = std::pow(rho, static_cast<double>(l));
    EXPECT_NEAR(fit_rho(C, {1, 10}), rho, 1e-12);
  }
}

TEST(FitRho, AlternatingUsesPositiveLags) {
  std::vector<double> C(10);
  for (std::size_t l = 1; l <= 10; ++l) C[l - 1] = std::pow(-0.6, static_cast<double>(l));
  EXPECT_NEAR(fit_rho(C, {1, 10}), 0.6, 1e-12);
}

TEST(FitRho, Errors) {
  const std::vector<double> C = {-0.1, 0.2, -0.05, -0.01};
  EXPECT_THROW(fit_rho(C, {1, 4}), DomainError);
  EXPECT_THROW(fit_rho(C, {0, 2}), ConfigError);
  EXPECT_THROW(fit_rho(C, {1, 5}), ConfigError);
}

TEST(Scatter, ExactLinearLaw) {
  std::vector<double> C, R;
  for (std::size_t l = 1; l <= 30; ++l) {
    C.push_back(std::pow(0.5, static_cast<double>(l)));
    R.push_back(1.5 * (1.0 - C.back()));
  }
  const auto d = scatter_diagnostics(C, R);
  EXPECT_NEAR(d.slope, -1.5, 1e-12);
  EXPECT_NEAR(d.intercept, 1.5, 1e-12);
  EXPECT_NEAR(d.r_squared, 1.0, 1e-12);
  EXPECT_NEAR(d.nonlinearity, 0.0, 1e-12);
  EXPECT_EQ(d.points.size(), 30u);
}

TEST(Scatter, ParabolaAgreesWithNormalEquations) {
  std::vector<double> C, R;
  for (int i = 0; i <= 20; ++i) {
    C.push_back(-1.0 + 0.1 * i);
    R.push_back(C.back() * C.back());
  }
  const auto d = scatter_diagnostics(C, R);
  const auto ref = normal_equations(C, R);
  const double range = *std::max_element(R.begin(), R.end()) - *std::min_element(R.begin(), R.end());
  EXPECT_NEAR(d.slope, ref.slope, 1e-10);
  EXPECT_NEAR(d.intercept, ref.intercept, 1e-10);
  EXPECT_NEAR(d.nonlinearity, ref.rms / range, 1e-10);
  EXPECT_GT(d.nonlinearity, 0.1);
}

TEST(Scatter, RandomPointsAgreeWithNormalEquations) {
  Rng rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> C(40), R(40);
    for (std::size_t i = 0; i < C.size(); ++i) {
      C[i] = rng.normal();
      R[i] = 0.3 * C[i] + rng.normal();
    }
    const auto d = scatter_diagnostics(C, R);
    const auto ref = normal_equations(C, R);
    const double range = *std::max_element(R.begin(), R.end()) - *std::min_element(R.begin(), R.end());
    EXPECT_NEAR(d.slope, ref.slope, 1e-10);
    EXPECT_NEAR(d.nonlinearity, ref.rms / range, 1e-10);
    EXPECT_GE(d.r_squared, 0.0);
    EXPECT_LE(d.r_squared, 1.0);
  }
}

TEST(Scatter, ConstantRIsLinear) {
  const std::vector<double> C = {0.1, 0.2, 0.3};
  const std::vector<double> R = {2.0, 2.0, 2.0};
  const auto d = scatter_diagnostics(C, R);
  EXPECT_EQ(d.nonlinearity, 0.0);
  EXPECT_EQ(d.r_squared, 1.0);
}

TEST(Scatter, Errors) {
  EXPECT_THROW(scatter_diagnostics(std::vector<double>{1, 2}, std::vector<double>{1, 2}),
               InsufficientData);
  EXPECT_THROW(scatter_diagnostics(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
               DomainError);
  EXPECT_THROW(scatter_diagnostics(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}),
               ConfigError);
}

TEST(WaitingTimes, Example) {
  const auto w = extract_waiting_times(std::vector<double>{0.1, 0.5, 0.1, 0.1}, 0.2);
  EXPECT_EQ(w.transaction_times, (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_EQ(w.durations, (std::vector<std::size_t>{2, 1}));
}

TEST(WaitingTimes, NoneBelowThreshold) {
  const auto w = extract_waiting_times(std::vector<double>{0.3, 0.5}, 0.2);
  EXPECT_TRUE(w.transaction_times.empty());
  EXPECT_TRUE(w.durations.empty());
}

TEST(WaitingTimes, MissingSpreadsNeverCount) {
  const double nan = std::nan("");
  const auto w = extract_waiting_times(std::vector<double>{0.1, nan, 0.1}, 0.2);
  EXPECT_EQ(w.transaction_times, (std::vector<std::size_t>{0, 2}));
}

TEST(WaitingTimes, ThresholdMustBePositive) {
  EXPECT_THROW(extract_waiting_times(std::vector<double>{0.1}, 0.0), ConfigError);
}

TEST(WaitingTimes, MinorityGameMedianThreshold) {
  mg::GameConfig c;
  c.rounds = 5000;
  const auto run = mg::run(c);
  auto spreads = run.spreads();
  std::vector<double> finite;
  for (double s : spreads) {
    if (std::isfinite(s)) finite.push_back(s);
  }
  std::nth_element(finite.begin(), finite.begin() + finite.size() / 2, finite.end());
  const auto w = extract_waiting_times(spreads, finite[finite.size() / 2]);
  for (auto d : w.durations) EXPECT_GT(d, 0u);
  EXPECT_EQ(w.durations.size(), w.transaction_times.size() - 1);
  EXPECT_GE(std::set<std::size_t>(w.durations.begin(), w.durations.end()).size(), 2u);
}

TEST(AverageTrials, MeanAndStderr) {
  const std::vector<std::vector<double>> t = {{1.0, 2.0}, {3.0, 2.0}, {5.0, 2.0}};
  const auto m = average_trials(t);
  EXPECT_DOUBLE_EQ(m.mean[0], 3.0);
  EXPECT_DOUBLE_EQ(m.stderr_mean[0], 2.0 / std::sqrt(3.0));
  EXPECT_EQ(m.stderr_mean[1], 0.0);
}

TEST(AverageTrials, SingleTrialHasNoStderr) {
  const std::vector<std::vector<double>> t = {{1.0}};
  EXPECT_TRUE(std::isnan(average_trials(t).stderr_mean[0]));
}

TEST(AverageTrials, Errors) {
  EXPECT_THROW(average_trials(std::vector<std::vector<double>>{}), InsufficientData);
  EXPECT_THROW(average_trials(std::vector<std::vector<double>>{{1.0}, {1.0, 2.0}}), ConfigError);
}

TEST(CombineTrials, TrialwiseDiffersFromPooled) {
  const auto a = coin_flips(300, 1);
  const auto b = coin_flips(300, 2);
  std::vector<int> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::vector<std::vector<double>> Cs = {autocorrelation(a, 5), autocorrelation(b, 5)};
  const std::vector<std::vector<double>> Rs = {std::vector<double>(5, 0.0), std::vector<double>(5, 0.0)};
  const auto s = combine_trials(Cs, Rs, {1, 5});
  EXPECT_NE(s.C, autocorrelation(pooled, 5));
  for (std::size_t l = 0; l < 5; ++l) EXPECT_DOUBLE_EQ(s.C[l], 0.5 * (Cs[0][l] + Cs[1][l]));
  EXPECT_EQ(s.max_lag, 5u);
}

TEST(CombineTrials, UndefinedFitIsNaN) {
  const std::vector<std::vector<double>> Cs = {{-0.5, -0.2, -0.1}};
  const auto s = combine_trials(Cs, Cs, {1, 3});
  EXPECT_TRUE(std::isnan(s.rho_hat));
}

TEST(ResponseDrop, FindsPeak) {
  // R rises to lag 3 then falls; trial noise is small.
  std::vector<std::vector<double>> trials;
  Rng rng(6);
  for (int k = 0; k < 8; ++k) {
    trials.push_back({1.0, 2.0, 3.0, 2.5, 2.0});
    for (auto& r : trials.back()) r += 0.01 * rng.normal();
  }
  const auto d = strongest_response_drop(trials);
  EXPECT_EQ(d.first, 3u);
  EXPECT_EQ(d.second, 5u);
  EXPECT_NEAR(d.drop, 1.0, 0.05);
  EXPECT_GT(d.z, 3.0);
}

TEST(ResponseDrop, IncreasingCurveHasNoSignificantDrop) {
  std::vector<std::vector<double>> trials;
  Rng rng(7);
  for (int k = 0; k < 10; ++k) {
    trials.push_back({});
    for (int l = 1; l <= 20; ++l) trials.back().push_back(l + 0.01 * rng.normal());
  }
  EXPECT_LT(strongest_response_drop(trials).z, 0.0);
  EXPECT_THROW(strongest_response_drop(std::vector<std::vector<double>>{{1.0, 2.0}}), InsufficientData);
}

TEST(AutoFitRange, LeadingSignificantRun) {
  const std::vector<double> C = {0.5, 0.25, 0.125, 0.01, 0.2, 0.1};
  // 3 / sqrt(10000) = 0.03
  const auto r = auto_fit_range(C, 10000);
  EXPECT_EQ(r.first, 1u);
  EXPECT_EQ(r.last, 3u);
  EXPECT_EQ(auto_fit_range(std::vector<double>{0.0, 0.0, 0.0}, 100).last, 2u);
  std::vector<double> slow(50, 0.9);
  EXPECT_EQ(auto_fit_range(slow, 100000).last, 10u);
}
