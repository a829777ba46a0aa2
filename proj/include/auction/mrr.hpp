#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "auction/random.hpp"

/// Madhavan-Richardson-Roomans price process with Markov trade signs and a
/// constant quoted spread, plus its closed-form lag statistics.
namespace auction::mrr {

enum class NoiseKind {
  gaussian,  ///< xi ~ N(0, sigma^2)
  uniform,   ///< xi ~ U(-sqrt(3) sigma, sqrt(3) sigma), same first two moments
};

struct MrrParams {
  double theta = 1.5;        ///< price impact of a signed trade
  double rho = 0.5;          ///< persistence of the trade sign
  double phi = 0.0;          ///< transaction cost
  double sigma_noise = 1.0;  ///< std of the public-information noise
  double p0 = 100.0;
  NoiseKind noise = NoiseKind::gaussian;

  /// Throws ConfigError unless |rho| <= 1, sigma >= 0 and theta + phi > 0.
  void validate() const;
};

/// One simulated path, all arrays of length T indexed by t = 0..T-1.
struct MrrPath {
  std::vector<double> price;
  std::vector<double> ask;
  std::vector<double> bid;
  std::vector<double> mid;
  std::vector<int> signal;
  /// xi_t, the noise added between p_t and p_{t+1}.
  std::vector<double> noise;
  /// eps_{-1}, the sign preceding the first round.
  int initial_signal = 1;
};

/// Next sign of the Markov chain: repeats `prev` with probability (1+rho)/2.
int sample_signal(int prev, double rho, Rng& rng);

/// Draws eps_{-1} uniformly, then runs the recurrence for T rounds.
MrrPath simulate(const MrrParams& params, std::size_t T, std::uint64_t seed);

/// Same recurrence driven by a fixed sign sequence; only the noise is drawn.
MrrPath simulate_with_signals(const MrrParams& params, std::span<const int> signals,
                              int initial_signal, std::uint64_t seed);

/// C(l) = rho^l.
double analytic_C(double rho, std::size_t l);

/// R(l) = theta (1 - rho^l).
double analytic_R(double theta, double rho, std::size_t l);

/// R(infinity) = theta.
double analytic_R_limit(double theta);

/// Volatility curve in the closed form
///   Sigma^2 + theta^2 (1-rho)^2 {1 + 2 rho (1 - rho^(l-1)) / (1-rho)}.
/// It is exact at l = 1 and as l -> infinity; analytic_var_exact gives the
/// finite-l value. Throws DomainError at rho = 1.
double analytic_var(double sigma_noise, double theta, double rho, std::size_t l);

/// Sigma^2 + theta^2 (1 - rho^2).
double analytic_var_limit(double sigma_noise, double theta, double rho);

/// <(m_{t+l} - m_t)^2> / l for the stationary chain at finite l:
///   Sigma^2 + theta^2 (1-rho)^2 {1 + (2/l) sum_{k=1}^{l-1} (l-k) rho^k}.
double analytic_var_exact(double sigma_noise, double theta, double rho, std::size_t l);

}  // namespace auction::mrr
