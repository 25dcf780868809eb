#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace exdist::stats {

constexpr double kLn10 = 2.302585092994045684;

double normal_pdf(double z);
double normal_cdf(double z);

/// Inverse of the standard normal CDF (Wichura's PPND16 rational
/// approximation, accurate to ~1e-15). Requires 0 < p < 1.
double normal_quantile(double p);

double mean(std::span<const double> xs);

/// Population (divide-by-n) variance.
double variance(std::span<const double> xs);
double stddev(std::span<const double> xs);

/// Survival function of the Kolmogorov distribution,
/// Q(x) = 2 * sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_survival(double x);

/// Asymptotic critical value of the KS statistic at level alpha for sample
/// size n (classical fixed-distribution calibration, not valid when
/// parameters are estimated from the sample).
double ks_naive_threshold(double alpha, std::size_t n);

/// Asymptotic critical value of the Cramer-von Mises W^2 statistic at level
/// alpha (same caveat as ks_naive_threshold). Interpolated from the standard
/// table; alpha must lie in [0.001, 0.25].
double cvm_naive_threshold(double alpha);

/// y = a + b x + c x^2 least-squares fit.
struct Parabola {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double r_squared = 1.0;

  double operator()(double x) const { return a + b * x + c * x * x; }
};

Parabola fit_parabola(std::span<const double> x, std::span<const double> y);

/// Mixes two 64-bit values into a stream seed (splitmix64 finalizer).
/// Used to derive independent per-country / per-replicate seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Deterministic portable generator: mt19937_64 with a fixed 53-bit
/// uniform mapping and inverse-CDF normal draws. Identical seeds give
/// bit-identical streams on any platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in the open interval (0, 1).
  double uniform01() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double normal() { return normal_quantile(uniform01()); }
  double normal(double mu, double sd) { return mu + sd * normal(); }

  std::uint64_t next_u64() { return gen_(); }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_u64() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  std::mt19937_64 gen_;
};

}  // namespace exdist::stats
