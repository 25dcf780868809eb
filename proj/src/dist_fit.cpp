#include "exdist/dist_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "exdist/gof.hpp"

namespace exdist {

using stats::kLn10;
using stats::normal_cdf;
using stats::normal_pdf;
using stats::normal_quantile;

const char* to_string(ShapeClass c) {
  switch (c) {
    case ShapeClass::TruncatedLogNormal: return "TruncatedLogNormal";
    case ShapeClass::FullLogNormal: return "FullLogNormal";
    case ShapeClass::ParetoLogNormal: return "ParetoLogNormal";
    default: return "Indeterminate";
  }
}

Histogram log_histogram(std::span<const double> sample, const BinningRule& rule) {
  if (sample.empty()) throw Error("log_histogram: empty sample");
  if (rule.width_decades <= 0.0) throw Error("log_histogram: bin width must be positive");
  double lo_val = sample[0], hi_val = sample[0];
  for (double x : sample) {
    if (!(x > 0.0)) throw Error("log_histogram: sample values must be positive");
    lo_val = std::min(lo_val, x);
    hi_val = std::max(hi_val, x);
  }
  const double lo = std::floor(std::log10(lo_val));
  const double hi = std::floor(std::log10(hi_val)) + 1.0;  // strictly above the max
  const double w = rule.width_decades;
  const auto nbins = static_cast<std::size_t>(std::ceil((hi - lo) / w - 1e-12));

  Histogram h;
  h.bin_edges.resize(nbins + 1);
  for (std::size_t i = 0; i <= nbins; ++i) h.bin_edges[i] = lo + w * static_cast<double>(i);
  h.counts.assign(nbins, 0.0);
  for (double x : sample) {
    auto ix = static_cast<std::ptrdiff_t>((std::log10(x) - lo) / w);
    ix = std::clamp<std::ptrdiff_t>(ix, 0, static_cast<std::ptrdiff_t>(nbins) - 1);
    h.counts[static_cast<std::size_t>(ix)] += 1.0;
  }
  return h;
}

double empirical_mode_log10(const Histogram& hist) {
  if (hist.bins() == 0) throw Error("empirical_mode_log10: empty histogram");
  std::size_t best = 0;
  for (std::size_t i = 1; i < hist.bins(); ++i)
    if (hist.counts[i] > hist.counts[best]) best = i;
  return hist.bin_center(best);
}

double lognormal_cdf(double x, const LogNormalFit& fit) {
  if (x <= 0.0) return 0.0;
  const double z = (std::log(x) - fit.mu) / fit.sigma;
  if (!fit.truncated()) return normal_cdf(z);
  const double zt = (*fit.right_truncation_log - fit.mu) / fit.sigma;
  return std::min(1.0, normal_cdf(z) / normal_cdf(zt));
}

double lognormal_loglik(std::span<const double> sample, const LogNormalFit& fit) {
  static const double ln_sqrt_2pi = 0.9189385332046727418;
  double acc = 0.0;
  const double log_trunc_mass =
      fit.truncated() ? std::log(normal_cdf((*fit.right_truncation_log - fit.mu) / fit.sigma))
                      : 0.0;
  for (double x : sample) {
    const double y = std::log(x);
    const double z = (y - fit.mu) / fit.sigma;
    acc += -0.5 * z * z - ln_sqrt_2pi - std::log(fit.sigma) - y - log_trunc_mass;
  }
  return acc;
}

LogNormalFit fit_lognormal(std::span<const double> sample) {
  if (sample.size() < 2) throw Error("fit_lognormal: need at least 2 observations");
  std::vector<double> logs;
  logs.reserve(sample.size());
  for (double x : sample) {
    if (!(x > 0.0)) throw Error("fit_lognormal: sample values must be positive");
    logs.push_back(std::log(x));
  }
  LogNormalFit fit;
  fit.n = sample.size();
  fit.mu = stats::mean(logs);
  fit.sigma = stats::stddev(logs);
  if (fit.sigma <= 0.0) throw Error("fit_lognormal: degenerate sample (sigma = 0)");
  fit.mode_log10 = (fit.mu - fit.sigma * fit.sigma) / kLn10;
  fit.log_likelihood = lognormal_loglik(sample, fit);
  return fit;
}

namespace {

double mills_lower(double a) { return normal_pdf(a) / normal_cdf(a); }

// Variance-over-gap ratio of a right-truncated normal as a function of the
// standardized truncation point; decreasing from ~1 toward 0.
double truncation_ratio(double a) {
  const double lam = mills_lower(a);
  return (1.0 - a * lam - lam * lam) / ((a + lam) * (a + lam));
}

}  // namespace

LogNormalFit fit_lognormal_right_truncated(std::span<const double> sample, double truncation_log) {
  if (sample.size() < 2) throw Error("truncated fit: need at least 2 observations");
  std::vector<double> logs;
  logs.reserve(sample.size());
  for (double x : sample) {
    if (!(x > 0.0)) throw Error("truncated fit: sample values must be positive");
    const double y = std::log(x);
    if (y > truncation_log + 1e-12) throw Error("truncated fit: observation above the truncation point");
    logs.push_back(y);
  }
  const double ybar = stats::mean(logs);
  const double s2 = stats::variance(logs);
  if (s2 <= 0.0) throw Error("truncated fit: degenerate sample (sigma = 0)");
  const double gap = truncation_log - ybar;
  if (gap <= 0.0) throw Error("truncated fit: truncation point at or below the sample mean");

  LogNormalFit fit;
  fit.n = sample.size();
  fit.right_truncation_log = truncation_log;

  // The likelihood equations match the first two truncated moments; solve
  // for the standardized truncation point by bisection.
  const double ratio = s2 / (gap * gap);
  double lo = -10.0, hi = 10.0;
  if (ratio >= truncation_ratio(lo)) {
    // heavier than exponential near the edge; pin to the extreme
    hi = lo;
  } else if (ratio <= truncation_ratio(hi)) {
    // truncation correction below double precision: plain MLE
    fit.mu = ybar;
    fit.sigma = std::sqrt(s2);
    fit.mode_log10 = (fit.mu - fit.sigma * fit.sigma) / kLn10;
    fit.log_likelihood = lognormal_loglik(sample, fit);
    return fit;
  } else {
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (truncation_ratio(mid) > ratio)
        lo = mid;
      else
        hi = mid;
    }
  }
  const double a = 0.5 * (lo + hi);
  fit.sigma = gap / (a + mills_lower(a));
  fit.mu = truncation_log - a * fit.sigma;
  fit.mode_log10 = (fit.mu - fit.sigma * fit.sigma) / kLn10;
  fit.log_likelihood = lognormal_loglik(sample, fit);
  return fit;
}

LogNormalFit refit_left_of_mode(std::span<const double> sample, const LogNormalFit& full_fit,
                                const BinningRule& rule) {
  if (full_fit.n != sample.size()) throw Error("refit_left_of_mode: fit does not match the sample");
  const Histogram hist = log_histogram(sample, rule);
  const double mode10 = empirical_mode_log10(hist);
  std::vector<double> left;
  for (double x : sample)
    if (std::log10(x) <= mode10) left.push_back(x);
  if (left.size() < 10) throw Error("refit_left_of_mode: too few left-of-mode points");
  return fit_lognormal_right_truncated(left, mode10 * kLn10);
}

ShapeResult classify_shape(std::span<const double> sample, const LogNormalFit& full_fit,
                           const LogNormalFit& left_fit, const GofResult& gof,
                           const ClassifierConfig& cfg) {
  if (sample.empty()) throw Error("classify_shape: empty sample");
  if (!left_fit.truncated()) throw Error("classify_shape: left fit must be a truncated refit");

  ShapeResult out;
  out.mode_log10 = full_fit.mode_log10;

  double min_x = sample[0];
  for (double x : sample) min_x = std::min(min_x, x);
  out.left_truncation_score = normal_cdf((std::log(min_x) - full_fit.mu) / full_fit.sigma);

  // Bump detection: mass above the 90th percentile of the left fit's
  // underlying law, in excess of the 10% that fit predicts there.
  const double x90 = std::exp(left_fit.mu + normal_quantile(0.9) * left_fit.sigma);
  std::size_t above = 0;
  for (double x : sample)
    if (x > x90) ++above;
  out.right_excess_score =
      static_cast<double>(above) / static_cast<double>(sample.size()) - 0.1;

  // Quality of the left fit on its own subsample (same tolerance as the
  // truncated fitter, so the boundary point set matches the refit).
  std::vector<double> left;
  for (double x : sample)
    if (std::log(x) <= *left_fit.right_truncation_log + 1e-12) left.push_back(x);
  out.left_cvm_stat = cvm_statistic(left, left_fit);
  bool left_passes;
  if (cfg.left_bootstrap_replicates > 0) {
    out.left_cvm_pvalue = bootstrap_pvalue_for_fit(left, left_fit, StatKind::CvM,
                                                   cfg.left_bootstrap_replicates, cfg.seed);
    left_passes = out.left_cvm_pvalue > cfg.alpha_cvm_left;
  } else {
    out.left_cvm_pvalue = std::numeric_limits<double>::quiet_NaN();
    left_passes = out.left_cvm_stat < stats::cvm_naive_threshold(cfg.alpha_cvm_left);
  }

  if (out.right_excess_score > cfg.right_excess_threshold && left_passes) {
    out.shape = ShapeClass::ParetoLogNormal;
  } else if (out.mode_log10 < cfg.mode_log10_low &&
             out.left_truncation_score > cfg.left_mass_threshold) {
    out.shape = ShapeClass::TruncatedLogNormal;
  } else if (!gof.reject_cvm) {
    out.shape = ShapeClass::FullLogNormal;
  } else {
    out.shape = ShapeClass::Indeterminate;
  }
  return out;
}

stats::Parabola histogram_parabola(const Histogram& hist, double min_count) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    if (hist.counts[i] >= min_count && hist.counts[i] > 0.0) {
      xs.push_back(hist.bin_center(i));
      ys.push_back(std::log(hist.counts[i]));
    }
  }
  if (xs.size() < 3) throw Error("histogram_parabola: fewer than 3 occupied bins");
  return stats::fit_parabola(xs, ys);
}

}  // namespace exdist
