#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "exdist/dist_fit.hpp"
#include "exdist/stats.hpp"

namespace exdist {

/// Empirical CDF: step function with plateaus at k/N over the sorted sample.
struct Ecdf {
  std::vector<double> sorted_values;

  /// Fraction of observations <= x.
  double operator()(double x) const;
  std::size_t size() const { return sorted_values.size(); }
};

Ecdf ecdf(std::span<const double> sample);

enum class StatKind { KS, CvM };

struct GofConfig {
  double alpha_ks = 0.05;
  double alpha_cvm = 0.01;
  int bootstrap_replicates = 1000;  // 0 = naive thresholds only
  std::uint64_t seed = 1;
};

/// Test outcome for one sample. With bootstrap_replicates = 0 the p-values
/// are NaN and the reject flags come from the naive asymptotic thresholds
/// (which ignore parameter estimation); otherwise reject means p <= alpha.
struct GofResult {
  std::size_t n = 0;
  double ks_stat = 0.0;
  double cvm_stat = 0.0;
  double ks_pvalue = 0.0;
  double cvm_pvalue = 0.0;
  double alpha_ks = 0.05;
  double alpha_cvm = 0.01;
  bool reject_ks = false;
  bool reject_cvm = false;
  int bootstrap_replicates = 0;
  std::uint64_t seed = 0;
  double ks_naive_threshold = 0.0;
  double cvm_naive_threshold = 0.0;
};

/// Two-sided Kolmogorov-Smirnov distance between the sample and the fitted
/// CDF (truncated fits are compared against their truncated CDF).
double ks_statistic(std::span<const double> sample, const LogNormalFit& fit);

/// Cramer-von Mises W^2 = 1/(12N) + sum((2i-1)/(2N) - F(x_(i)))^2.
double cvm_statistic(std::span<const double> sample, const LogNormalFit& fit);

/// Parametric bootstrap p-value with parameters re-estimated on every
/// replicate (the fit is estimated from the tested sample, so classical
/// critical values do not apply). p = (1 + #{boot >= observed}) / (B + 1).
double bootstrap_pvalue(std::span<const double> sample, StatKind kind, int replicates,
                        std::uint64_t seed);

/// Same resampling scheme for an externally supplied fit (plain or
/// truncated); returns just the p-value for the requested statistic.
double bootstrap_pvalue_for_fit(std::span<const double> sample, const LogNormalFit& fit,
                                StatKind kind, int replicates, std::uint64_t seed);

/// Full evaluation used by the pipeline: both statistics, one shared set of
/// bootstrap replicates (identical to running each kind separately with the
/// same seed), naive thresholds for comparison.
GofResult evaluate_gof(std::span<const double> sample, const LogNormalFit& fit,
                       const GofConfig& cfg);

struct GofProfileRow {
  int fitness_rank = 0;
  std::string country;
  double cvm_stat = 0.0;
  double ks_pvalue = 0.0;
};

/// Per-country test scores laid out against the fitness ranking, with
/// least-squares parabolas over rank vs CvM statistic (and rank vs KS
/// p-value when p-values exist).
struct GofProfile {
  std::vector<GofProfileRow> rows;  // ordered by fitness rank
  stats::Parabola cvm_parabola;
  stats::Parabola ks_pvalue_parabola;
  bool has_pvalues = false;
};

GofProfile gof_profile(const std::vector<std::string>& countries,
                       const std::vector<int>& fitness_ranks,
                       const std::vector<GofResult>& results);

}  // namespace exdist
