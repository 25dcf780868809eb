#include "exdist/gof.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace exdist {

using stats::normal_cdf;
using stats::normal_quantile;

Ecdf ecdf(std::span<const double> sample) {
  if (sample.empty()) throw Error("ecdf: empty sample");
  Ecdf e;
  e.sorted_values.assign(sample.begin(), sample.end());
  std::sort(e.sorted_values.begin(), e.sorted_values.end());
  return e;
}

double Ecdf::operator()(double x) const {
  const auto it = std::upper_bound(sorted_values.begin(), sorted_values.end(), x);
  return static_cast<double>(it - sorted_values.begin()) /
         static_cast<double>(sorted_values.size());
}

namespace {

std::vector<double> sorted_copy(std::span<const double> sample) {
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  return xs;
}

double ks_from_sorted(const std::vector<double>& xs, const LogNormalFit& fit) {
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = lognormal_cdf(xs[i], fit);
    const double hi = (static_cast<double>(i) + 1.0) / n - f;
    const double lo = f - static_cast<double>(i) / n;
    d = std::max({d, hi, lo});
  }
  return d;
}

double cvm_from_sorted(const std::vector<double>& xs, const LogNormalFit& fit) {
  const double n = static_cast<double>(xs.size());
  double w2 = 1.0 / (12.0 * n);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = lognormal_cdf(xs[i], fit);
    const double t = (2.0 * static_cast<double>(i) + 1.0) / (2.0 * n) - f;
    w2 += t * t;
  }
  return w2;
}

void check_fit(std::span<const double> sample, const LogNormalFit& fit) {
  if (sample.empty()) throw Error("gof: empty sample");
  if (!(fit.sigma > 0.0)) throw Error("gof: fit has sigma = 0");
}

// One replicate from the fitted law (truncated fits draw from the truncated
// law and are refit with the truncation point held fixed).
std::vector<double> draw_replicate(const LogNormalFit& fit, std::size_t n, stats::Rng& rng) {
  std::vector<double> xs(n);
  if (fit.truncated()) {
    const double mass = normal_cdf((*fit.right_truncation_log - fit.mu) / fit.sigma);
    for (auto& x : xs)
      x = std::exp(fit.mu + fit.sigma * normal_quantile(rng.uniform01() * mass));
  } else {
    for (auto& x : xs) x = std::exp(fit.mu + fit.sigma * rng.normal());
  }
  return xs;
}

LogNormalFit refit_like(const LogNormalFit& fit, std::span<const double> replicate) {
  if (fit.truncated()) return fit_lognormal_right_truncated(replicate, *fit.right_truncation_log);
  return fit_lognormal(replicate);
}

}  // namespace

double ks_statistic(std::span<const double> sample, const LogNormalFit& fit) {
  check_fit(sample, fit);
  return ks_from_sorted(sorted_copy(sample), fit);
}

double cvm_statistic(std::span<const double> sample, const LogNormalFit& fit) {
  check_fit(sample, fit);
  return cvm_from_sorted(sorted_copy(sample), fit);
}

double bootstrap_pvalue_for_fit(std::span<const double> sample, const LogNormalFit& fit,
                                StatKind kind, int replicates, std::uint64_t seed) {
  check_fit(sample, fit);
  if (replicates < 100) throw Error("bootstrap: need at least 100 replicates");
  const auto xs = sorted_copy(sample);
  const double observed =
      (kind == StatKind::KS) ? ks_from_sorted(xs, fit) : cvm_from_sorted(xs, fit);
  std::size_t at_least = 0;
  for (int b = 1; b <= replicates; ++b) {
    stats::Rng rng(stats::mix_seed(seed, static_cast<std::uint64_t>(b)));
    auto rep = draw_replicate(fit, xs.size(), rng);
    std::sort(rep.begin(), rep.end());
    const LogNormalFit rep_fit = refit_like(fit, rep);
    const double stat =
        (kind == StatKind::KS) ? ks_from_sorted(rep, rep_fit) : cvm_from_sorted(rep, rep_fit);
    if (stat >= observed) ++at_least;
  }
  return static_cast<double>(1 + at_least) / static_cast<double>(replicates + 1);
}

double bootstrap_pvalue(std::span<const double> sample, StatKind kind, int replicates,
                        std::uint64_t seed) {
  const LogNormalFit fit = fit_lognormal(sample);
  return bootstrap_pvalue_for_fit(sample, fit, kind, replicates, seed);
}

GofResult evaluate_gof(std::span<const double> sample, const LogNormalFit& fit,
                       const GofConfig& cfg) {
  check_fit(sample, fit);
  const auto xs = sorted_copy(sample);

  GofResult r;
  r.n = xs.size();
  r.alpha_ks = cfg.alpha_ks;
  r.alpha_cvm = cfg.alpha_cvm;
  r.bootstrap_replicates = cfg.bootstrap_replicates;
  r.seed = cfg.seed;
  r.ks_stat = ks_from_sorted(xs, fit);
  r.cvm_stat = cvm_from_sorted(xs, fit);
  r.ks_naive_threshold = stats::ks_naive_threshold(cfg.alpha_ks, xs.size());
  r.cvm_naive_threshold = stats::cvm_naive_threshold(cfg.alpha_cvm);

  if (cfg.bootstrap_replicates > 0) {
    if (cfg.bootstrap_replicates < 100) throw Error("bootstrap: need at least 100 replicates");
    std::size_t ks_ge = 0, cvm_ge = 0;
    for (int b = 1; b <= cfg.bootstrap_replicates; ++b) {
      stats::Rng rng(stats::mix_seed(cfg.seed, static_cast<std::uint64_t>(b)));
      auto rep = draw_replicate(fit, xs.size(), rng);
      std::sort(rep.begin(), rep.end());
      const LogNormalFit rep_fit = refit_like(fit, rep);
      if (ks_from_sorted(rep, rep_fit) >= r.ks_stat) ++ks_ge;
      if (cvm_from_sorted(rep, rep_fit) >= r.cvm_stat) ++cvm_ge;
    }
    const double denom = static_cast<double>(cfg.bootstrap_replicates + 1);
    r.ks_pvalue = static_cast<double>(1 + ks_ge) / denom;
    r.cvm_pvalue = static_cast<double>(1 + cvm_ge) / denom;
    r.reject_ks = r.ks_pvalue <= cfg.alpha_ks;
    r.reject_cvm = r.cvm_pvalue <= cfg.alpha_cvm;
  } else {
    r.ks_pvalue = std::numeric_limits<double>::quiet_NaN();
    r.cvm_pvalue = std::numeric_limits<double>::quiet_NaN();
    r.reject_ks = r.ks_stat > r.ks_naive_threshold;
    r.reject_cvm = r.cvm_stat > r.cvm_naive_threshold;
  }
  return r;
}

GofProfile gof_profile(const std::vector<std::string>& countries,
                       const std::vector<int>& fitness_ranks,
                       const std::vector<GofResult>& results) {
  if (countries.size() != fitness_ranks.size() || countries.size() != results.size())
    throw Error("gof_profile: input lengths differ");
  if (countries.size() < 3) throw Error("gof_profile: need at least 3 countries");

  GofProfile profile;
  profile.rows.resize(countries.size());
  for (std::size_t i = 0; i < countries.size(); ++i)
    profile.rows[i] = {fitness_ranks[i], countries[i], results[i].cvm_stat, results[i].ks_pvalue};
  std::sort(profile.rows.begin(), profile.rows.end(),
            [](const auto& a, const auto& b) { return a.fitness_rank < b.fitness_rank; });

  std::vector<double> xs, cvm, ksp;
  profile.has_pvalues = true;
  for (const auto& row : profile.rows) {
    xs.push_back(static_cast<double>(row.fitness_rank));
    cvm.push_back(row.cvm_stat);
    ksp.push_back(row.ks_pvalue);
    if (std::isnan(row.ks_pvalue)) profile.has_pvalues = false;
  }
  profile.cvm_parabola = stats::fit_parabola(xs, cvm);
  if (profile.has_pvalues) profile.ks_pvalue_parabola = stats::fit_parabola(xs, ksp);
  return profile;
}

}  // namespace exdist
