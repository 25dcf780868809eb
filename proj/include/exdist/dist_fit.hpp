#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "exdist/common.hpp"
#include "exdist/stats.hpp"

namespace exdist {

struct GofResult;  // gof.hpp

/// Log-normal fit of a positive sample. mu/sigma parametrize the natural
/// log of the volume; mode_log10 locates the density mode of the volume
/// itself in base-10 log units. For a left-of-mode refit,
/// right_truncation_log records the truncation point (natural log of
/// volume) and mu/sigma describe the underlying untruncated law.
struct LogNormalFit {
  double mu = 0.0;
  double sigma = 0.0;
  std::size_t n = 0;
  double log_likelihood = 0.0;
  double mode_log10 = 0.0;
  std::optional<double> right_truncation_log;

  bool truncated() const { return right_truncation_log.has_value(); }
};

/// Histogram over log10(volume).
struct Histogram {
  std::vector<double> bin_edges;  // increasing, in log10 units
  std::vector<double> counts;
  bool normalized = false;

  std::size_t bins() const { return counts.size(); }
  double bin_center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
};

struct BinningRule {
  double width_decades = 0.25;
};

enum class ShapeClass { TruncatedLogNormal, FullLogNormal, ParetoLogNormal, Indeterminate };

const char* to_string(ShapeClass c);

struct ShapeResult {
  ShapeClass shape = ShapeClass::Indeterminate;
  double left_truncation_score = 0.0;  // fitted mass below the sample minimum
  double right_excess_score = 0.0;     // empirical minus fitted mass above the left-fit q90
  double mode_log10 = 0.0;             // from the full fit
  double left_cvm_stat = 0.0;          // left-of-mode fit quality on the left subsample
  double left_cvm_pvalue = 0.0;        // NaN when evaluated against the naive threshold
};

struct ClassifierConfig {
  double mode_log10_low = 3.0;
  double mode_log10_high = 7.0;  // descriptive band for summaries, not a decision input
  double left_mass_threshold = 0.05;
  // The right-excess score inherits the sampling noise of the left fit's
  // extrapolated q90 (sd ~0.05-0.06 even for clean samples of ~1000), so its
  // default sits about two sigma above that floor.
  double right_excess_threshold = 0.12;
  double alpha_cvm_left = 0.01;
  int left_bootstrap_replicates = 200;  // 0 = use the naive asymptotic threshold
  std::uint64_t seed = 1;
};

Histogram log_histogram(std::span<const double> sample, const BinningRule& rule = {});

/// Midpoint of the highest-count bin, ties broken toward the lower bin.
double empirical_mode_log10(const Histogram& hist);

/// Maximum-likelihood log-normal fit (population-variance sigma).
LogNormalFit fit_lognormal(std::span<const double> sample);

/// MLE of an underlying log-normal observed only at or below
/// exp(truncation_log), using the right-truncated normal likelihood in log
/// space. All sample values must satisfy ln(x) <= truncation_log.
LogNormalFit fit_lognormal_right_truncated(std::span<const double> sample, double truncation_log);

/// Refits the left wing: keeps the points at or below the empirical modal
/// volume and fits them with the right-truncated likelihood, so a deformed
/// right side cannot contaminate the parameters. Needs >= 10 such points.
LogNormalFit refit_left_of_mode(std::span<const double> sample, const LogNormalFit& full_fit,
                                const BinningRule& rule = {});

/// Three-way shape decision with diagnostics. Checks, in order: a grafted
/// right tail over a sound left wing, a left-truncated shape with a low
/// mode, and plain acceptance of log-normality.
ShapeResult classify_shape(std::span<const double> sample, const LogNormalFit& full_fit,
                           const LogNormalFit& left_fit, const GofResult& gof,
                           const ClassifierConfig& cfg = {});

/// Diagnostic parabola through (bin center, ln count) for bins with at
/// least min_count entries; a log-normal sample should track it closely.
stats::Parabola histogram_parabola(const Histogram& hist, double min_count = 1.0);

double lognormal_cdf(double x, const LogNormalFit& fit);
double lognormal_loglik(std::span<const double> sample, const LogNormalFit& fit);

}  // namespace exdist
