#include "exdist/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "exdist/common.hpp"

namespace exdist::stats {

double normal_pdf(double z) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.7071067811865475244); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error("normal_quantile: p must be in (0,1)");
  const double q = p - 0.5;
  double num, den, r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    num = ((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
               6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
             1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
           1.3314166789178437745e+2) * r + 3.3871328727963666080e+0;
    den = ((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
               3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
             5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
           4.2313330701600911252e+1) * r + 1.0;
    return q * num / den;
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    num = ((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
               2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
             3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
           4.63033784615654529590e+0) * r + 1.42343711074968357734e+0;
    den = ((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
               1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
             6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
           2.05319162663775882187e+0) * r + 1.0;
    val = num / den;
  } else {
    r -= 5.0;
    num = ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
               1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
             2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
           5.46378491116411436990e+0) * r + 6.65790464350110377720e+0;
    den = ((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
               1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
             1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
           5.99832206555887937690e-1) * r + 1.0;
    val = num / den;
  }
  return (q < 0.0) ? -val : val;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw Error("mean: empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs) { return std::sqrt(variance(xs)); }

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 1.18) {
    // Jacobi theta form, fast for small x.
    const double pi = 3.14159265358979323846;
    const double t = pi * pi / (8.0 * x * x);
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double term = std::exp(-t * (2 * k - 1) * (2 * k - 1));
      cdf += term;
      if (term < 1e-17 * cdf) break;
    }
    cdf *= std::sqrt(2.0 * pi) / x;
    return 1.0 - cdf;
  }
  double q = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    q += sign * term;
    sign = -sign;
    if (term < 1e-17) break;
  }
  return 2.0 * q;
}

double ks_naive_threshold(double alpha, std::size_t n) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("ks_naive_threshold: alpha must be in (0,1)");
  if (n == 0) throw Error("ks_naive_threshold: n must be positive");
  double lo = 0.01, hi = 5.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (kolmogorov_survival(mid) > alpha)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi) / std::sqrt(static_cast<double>(n));
}

double cvm_naive_threshold(double alpha) {
  // Asymptotic upper percentage points of W^2 (classical tables).
  static const std::array<std::pair<double, double>, 8> table = {{
      {0.25, 0.20939},
      {0.15, 0.28406},
      {0.10, 0.34730},
      {0.05, 0.46136},
      {0.025, 0.58061},
      {0.01, 0.74346},
      {0.005, 0.86912},
      {0.001, 1.16786},
  }};
  if (alpha > table.front().first || alpha < table.back().first)
    throw Error("cvm_naive_threshold: alpha outside tabulated range [0.001, 0.25]");
  for (std::size_t i = 0; i + 1 < table.size(); ++i) {
    const auto [a_hi, w_lo] = table[i];
    const auto [a_lo, w_hi] = table[i + 1];
    if (alpha <= a_hi && alpha >= a_lo) {
      if (a_hi == a_lo) return w_lo;
      // log-log interpolation in alpha
      const double t = (std::log(alpha) - std::log(a_hi)) / (std::log(a_lo) - std::log(a_hi));
      return std::exp(std::log(w_lo) + t * (std::log(w_hi) - std::log(w_lo)));
    }
  }
  return table.back().second;
}

Parabola fit_parabola(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("fit_parabola: size mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw Error("fit_parabola: need at least 3 points");

  // Center x for conditioning; de-center coefficients afterwards.
  const double x0 = mean(x);
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  double t0 = 0, t1 = 0, t2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = x[i] - x0;
    const double u2 = u * u;
    s1 += u;
    s2 += u2;
    s3 += u2 * u;
    s4 += u2 * u2;
    t0 += y[i];
    t1 += u * y[i];
    t2 += u2 * y[i];
  }
  const double s0 = static_cast<double>(n);
  // Solve [s0 s1 s2; s1 s2 s3; s2 s3 s4] (A,B,C)^T = (t0,t1,t2)^T by Cramer.
  auto det3 = [](double a11, double a12, double a13, double a21, double a22, double a23,
                 double a31, double a32, double a33) {
    return a11 * (a22 * a33 - a23 * a32) - a12 * (a21 * a33 - a23 * a31) +
           a13 * (a21 * a32 - a22 * a31);
  };
  const double d = det3(s0, s1, s2, s1, s2, s3, s2, s3, s4);
  if (d == 0.0) throw Error("fit_parabola: singular design (degenerate x values)");
  const double A = det3(t0, s1, s2, t1, s2, s3, t2, s3, s4) / d;
  const double B = det3(s0, t0, s2, s1, t1, s3, s2, t2, s4) / d;
  const double C = det3(s0, s1, t0, s1, s2, t1, s2, s3, t2) / d;

  Parabola p;
  p.c = C;
  p.b = B - 2.0 * C * x0;
  p.a = A - B * x0 + C * x0 * x0;

  const double ybar = t0 / s0;
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - p(x[i]);
    ss_res += e * e;
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  p.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  return p;
}

static std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) + b);
}

}  // namespace exdist::stats
