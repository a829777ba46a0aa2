#include "auction/mrr.hpp"

#include <cmath>
#include <string>

#include "auction/error.hpp"

namespace auction::mrr {

void MrrParams::validate() const {
  if (!(std::abs(rho) <= 1.0)) throw ConfigError("mrr: |rho| must be <= 1");
  if (!(sigma_noise >= 0.0)) throw ConfigError("mrr: sigma must be >= 0");
  if (!(theta + phi > 0.0)) throw ConfigError("mrr: theta + phi must be positive");
  if (!std::isfinite(p0)) throw ConfigError("mrr: p0 must be finite");
}

int sample_signal(int prev, double rho, Rng& rng) {
  return rng.bernoulli((1.0 + rho) / 2.0) ? prev : -prev;
}

namespace {

double draw_noise(const MrrParams& params, Rng& rng) {
  if (params.sigma_noise == 0.0) return 0.0;
  switch (params.noise) {
    case NoiseKind::gaussian: return params.sigma_noise * rng.normal();
    case NoiseKind::uniform: return params.sigma_noise * std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
  }
  return 0.0;
}

enum Stream : std::uint64_t { kSignal = 1, kNoise = 2 };

template <class NextSignal>
MrrPath run(const MrrParams& params, std::size_t T, int initial_signal, Rng& noise_rng,
            NextSignal next_signal) {
  if (T < 2) throw ConfigError("mrr: need at least 2 rounds");
  MrrPath path;
  path.initial_signal = initial_signal;
  path.price.resize(T);
  path.ask.resize(T);
  path.bid.resize(T);
  path.mid.resize(T);
  path.signal.resize(T);
  path.noise.resize(T);

  const double theta = params.theta;
  const double rho = params.rho;
  double p = params.p0;
  int prev = initial_signal;
  for (std::size_t t = 0; t < T; ++t) {
    const int eps = next_signal(t, prev);
    const double xi = draw_noise(params, noise_rng);
    path.price[t] = p;
    path.ask[t] = p + theta * (1.0 - rho * prev) + params.phi;
    path.bid[t] = p + theta * (-1.0 - rho * prev) - params.phi;
    path.mid[t] = p - theta * rho * prev;
    path.signal[t] = eps;
    path.noise[t] = xi;
    p = p + theta * (eps - rho * prev) + xi;
    prev = eps;
  }
  return path;
}

}  // namespace

MrrPath simulate(const MrrParams& params, std::size_t T, std::uint64_t seed) {
  params.validate();
  Rng signal_rng(derive_seed(seed, kSignal));
  Rng noise_rng(derive_seed(seed, kNoise));
  const int initial = signal_rng.coin();
  return run(params, T, initial, noise_rng,
             [&](std::size_t, int prev) { return sample_signal(prev, params.rho, signal_rng); });
}

MrrPath simulate_with_signals(const MrrParams& params, std::span<const int> signals,
                              int initial_signal, std::uint64_t seed) {
  params.validate();
  Rng noise_rng(derive_seed(seed, kNoise));
  return run(params, signals.size(), initial_signal, noise_rng,
             [&](std::size_t t, int) { return signals[t]; });
}

double analytic_C(double rho, std::size_t l) { return std::pow(rho, static_cast<double>(l)); }

double analytic_R(double theta, double rho, std::size_t l) {
  return theta * (1.0 - analytic_C(rho, l));
}

double analytic_R_limit(double theta) { return theta; }

double analytic_var(double sigma_noise, double theta, double rho, std::size_t l) {
  if (rho == 1.0) throw DomainError("analytic_var: rho = 1 is a pole of the volatility formula");
  if (l < 1) throw ConfigError("analytic_var: lag must be >= 1");
  const double tail = 2.0 * rho * (1.0 - std::pow(rho, static_cast<double>(l) - 1.0)) / (1.0 - rho);
  return sigma_noise * sigma_noise + theta * theta * (1.0 - rho) * (1.0 - rho) * (1.0 + tail);
}

double analytic_var_limit(double sigma_noise, double theta, double rho) {
  return sigma_noise * sigma_noise + theta * theta * (1.0 - rho * rho);
}

double analytic_var_exact(double sigma_noise, double theta, double rho, std::size_t l) {
  if (l < 1) throw ConfigError("analytic_var_exact: lag must be >= 1");
  double sum = 0.0;
  double rk = 1.0;
  for (std::size_t k = 1; k < l; ++k) {
    rk *= rho;
    sum += static_cast<double>(l - k) * rk;
  }
  const double ld = static_cast<double>(l);
  return sigma_noise * sigma_noise + theta * theta * (1.0 - rho) * (1.0 - rho) * (1.0 + 2.0 * sum / ld);
}

}  // namespace auction::mrr
