#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "exdist/dist_fit.hpp"
#include "exdist/gof.hpp"
#include "exdist/stats.hpp"
#include "exdist/synth.hpp"

using namespace exdist;

namespace {

std::vector<double> lognormal_sample(double mu, double sigma, std::size_t n, std::uint64_t seed) {
  stats::Rng rng(seed);
  std::vector<double> xs(n);
  for (auto& x : xs) x = std::exp(mu + sigma * rng.normal());
  return xs;
}

SynthCountrySpec truncated_country(std::uint64_t seed) {
  SynthCountrySpec sp;
  sp.n_products = 1100;
  sp.k_capabilities = 4;
  sp.capability_log_mean = 1.1;
  sp.capability_log_sd = 1.0;
  sp.left_threshold =
      std::exp(sp.total_log_mean() + sp.total_log_sd() * stats::normal_quantile(0.2));
  sp.seed = seed;
  return sp;
}

SynthCountrySpec pareto_country(std::uint64_t seed) {
  SynthCountrySpec sp;
  sp.n_products = 1100;
  sp.k_capabilities = 16;
  sp.capability_log_mean = 0.95;
  sp.capability_log_sd = 0.45;
  RightCap cap;
  cap.cap_quantile = 0.9;
  cap.pareto_alpha = 1.7550 / sp.total_log_sd() / 5.0;
  sp.right_cap = cap;
  sp.seed = seed;
  return sp;
}

SynthCountrySpec plain_country(int n, std::uint64_t seed) {
  SynthCountrySpec sp;
  sp.n_products = n;
  sp.k_capabilities = 9;
  sp.capability_log_mean = 1.2;
  sp.capability_log_sd = 0.55;
  sp.seed = seed;
  return sp;
}

}  // namespace

TEST_CASE("log histogram bins decades") {
  auto h = log_histogram(std::vector<double>{1.0, 10.0, 100.0}, BinningRule{1.0});
  REQUIRE(h.bins() == 3);
  CHECK(h.bin_edges.front() == doctest::Approx(0.0));
  CHECK(h.bin_edges.back() == doctest::Approx(3.0));
  CHECK(h.counts == std::vector<double>{1, 1, 1});

  auto one_bin = log_histogram(std::vector<double>{5, 5, 5, 5});
  double occupied = 0, total = 0;
  for (double c : one_bin.counts) {
    if (c > 0) occupied += 1;
    total += c;
  }
  CHECK(occupied == 1);
  CHECK(total == 4);

  CHECK_THROWS_AS(log_histogram(std::vector<double>{}), Error);
  CHECK_THROWS_AS(log_histogram(std::vector<double>{1.0, -2.0}), Error);
}

TEST_CASE("histogram ignores sample order") {
  auto xs = lognormal_sample(2.0, 1.0, 300, 8);
  auto shuffled = xs;
  std::reverse(shuffled.begin(), shuffled.end());
  std::swap(shuffled[7], shuffled[130]);
  auto a = log_histogram(xs), b = log_histogram(shuffled);
  CHECK(a.bin_edges == b.bin_edges);
  CHECK(a.counts == b.counts);
  double total = 0;
  for (double c : a.counts) total += c;
  CHECK(total == 300);
}

TEST_CASE("histogram mode ties break toward the lower bin") {
  auto h = log_histogram(std::vector<double>{1.0, 10.0}, BinningRule{1.0});
  CHECK(empirical_mode_log10(h) == doctest::Approx(0.5));
}

TEST_CASE("log-normal sample gives a parabolic log histogram") {
  auto xs = lognormal_sample(5.0, 1.0, 10000, 1);
  auto parabola = histogram_parabola(log_histogram(xs));
  CHECK(parabola.r_squared > 0.95);
  CHECK(parabola.c < 0.0);
}

TEST_CASE("fit_lognormal closed-form hand check") {
  const auto fit = fit_lognormal(std::vector<double>{1.0, std::exp(2.0)});
  CHECK(fit.mu == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fit.sigma == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fit.n == 2);
  CHECK(fit.mode_log10 == doctest::Approx(0.0 / stats::kLn10).epsilon(1e-12));

  CHECK_THROWS_AS(fit_lognormal(std::vector<double>{3.0}), Error);
  CHECK_THROWS_AS(fit_lognormal(std::vector<double>{2.0, 2.0, 2.0}), Error);
}

TEST_CASE("scaling the sample shifts mu and leaves sigma") {
  auto xs = lognormal_sample(2.0, 0.7, 500, 4);
  auto scaled = xs;
  const double k = 37.25;
  for (auto& x : scaled) x *= k;
  auto f1 = fit_lognormal(xs);
  auto f2 = fit_lognormal(scaled);
  CHECK(f2.mu - f1.mu == doctest::Approx(std::log(k)).epsilon(1e-12));
  CHECK(f2.sigma == doctest::Approx(f1.sigma).epsilon(1e-12));
}

TEST_CASE("MLE recovers generator parameters within 3 standard errors") {
  auto xs = lognormal_sample(5.0, 1.0, 10000, 2024);
  auto fit = fit_lognormal(xs);
  CHECK(std::abs(fit.mu - 5.0) < 0.03);      // 3 * sigma/sqrt(n)
  CHECK(std::abs(fit.sigma - 1.0) < 0.022);  // 3 * sigma/sqrt(2n)
}

TEST_CASE("perturbing the MLE never increases the likelihood") {
  auto xs = lognormal_sample(1.0, 0.8, 400, 77);
  auto fit = fit_lognormal(xs);
  for (double dm : {-1e-3, 0.0, 1e-3}) {
    for (double ds : {-1e-3, 0.0, 1e-3}) {
      LogNormalFit moved = fit;
      moved.mu += dm;
      moved.sigma += ds;
      CHECK(lognormal_loglik(xs, moved) <= fit.log_likelihood + 1e-9);
    }
  }
}

TEST_CASE("truncated fit equals the plain fit when truncation is inactive") {
  auto xs = lognormal_sample(3.0, 1.2, 300, 5);
  double top = std::log(*std::max_element(xs.begin(), xs.end()));
  auto plain = fit_lognormal(xs);
  auto trunc = fit_lognormal_right_truncated(xs, top + 40.0);
  CHECK(trunc.mu == doctest::Approx(plain.mu).epsilon(1e-12));
  CHECK(trunc.sigma == doctest::Approx(plain.sigma).epsilon(1e-12));
}

TEST_CASE("truncated fit maximizes the truncated likelihood") {
  stats::Rng rng(11);
  std::vector<double> xs;
  while (xs.size() < 300) {
    const double y = 1.0 + 1.5 * rng.normal();
    if (y <= 1.8) xs.push_back(std::exp(y));
  }
  auto fit = fit_lognormal_right_truncated(xs, 1.8);
  for (double dm : {-1e-3, 0.0, 1e-3}) {
    for (double ds : {-1e-3, 0.0, 1e-3}) {
      LogNormalFit moved = fit;
      moved.mu += dm;
      moved.sigma += ds;
      CHECK(lognormal_loglik(xs, moved) <= fit.log_likelihood + 1e-9);
    }
  }
}

TEST_CASE("left-of-mode refit agrees with the full fit on clean samples") {
  // Sampling-oracle SE constants for the ~50% right-truncated MLE,
  // measured at n_w=500: sd(mu) = 4.378*sigma/sqrt(n_w), sd(sigma) = 1.919*sigma/sqrt(n_w).
  int ok_mu = 0, ok_sigma = 0, frac_ok = 0;
  const int trials = 100;
  for (int s = 0; s < trials; ++s) {
    auto xs = lognormal_sample(3.0, 2.0, 2000, stats::mix_seed(404, s));
    auto full = fit_lognormal(xs);
    auto left = refit_left_of_mode(xs, full);
    const double se_mu = 4.378 * full.sigma / std::sqrt(static_cast<double>(left.n));
    const double se_sigma = 1.919 * full.sigma / std::sqrt(static_cast<double>(left.n));
    if (std::abs(left.mu - full.mu) < 2 * se_mu) ++ok_mu;
    if (std::abs(left.sigma - full.sigma) < 2 * se_sigma) ++ok_sigma;
    const double frac = static_cast<double>(left.n) / xs.size();
    if (frac > 0.30 && frac < 0.72) ++frac_ok;  // symmetric log density keeps about half
  }
  CHECK(ok_mu >= 88);
  CHECK(ok_sigma >= 88);
  CHECK(frac_ok == trials);
}

TEST_CASE("refit needs enough left-of-mode points") {
  // 8 points in the modal low bin, the rest spread thin above it.
  std::vector<double> xs(8, 1.05);
  for (int i = 0; i < 30; ++i) xs.push_back(10.0 * std::pow(1.6, i));
  auto full_like = fit_lognormal(xs);
  CHECK_THROWS_AS(refit_left_of_mode(xs, full_like), Error);
}

TEST_CASE("grafted tail inflates the full fit but not the left fit") {
  int sigma_ok = 0, excess_ok = 0, class_ok = 0;
  for (int s = 0; s < 10; ++s) {
    auto sp = pareto_country(stats::mix_seed(1212, s));
    auto xs = gen_country(sp);
    auto full = fit_lognormal(xs);
    GofConfig g;
    g.bootstrap_replicates = 200;
    g.seed = stats::mix_seed(1313, s);
    auto gof = evaluate_gof(xs, full, g);
    auto left = refit_left_of_mode(xs, full);
    ClassifierConfig cc;
    cc.seed = stats::mix_seed(1414, s);
    auto shape = classify_shape(xs, full, left, gof, cc);
    if (left.sigma < full.sigma) ++sigma_ok;
    if (shape.right_excess_score > 0.0) ++excess_ok;
    if (shape.shape == ShapeClass::ParetoLogNormal) ++class_ok;
  }
  CHECK(sigma_ok == 10);
  CHECK(excess_ok == 10);
  CHECK(class_ok >= 9);
}

TEST_CASE("left-truncated generator samples classify as truncated") {
  for (int s = 1; s <= 3; ++s) {
    auto sp = truncated_country(stats::mix_seed(606, s));
    auto xs = gen_country(sp);
    auto full = fit_lognormal(xs);
    GofConfig g;
    g.bootstrap_replicates = 200;
    g.seed = stats::mix_seed(707, s);
    auto gof = evaluate_gof(xs, full, g);
    auto left = refit_left_of_mode(xs, full);
    ClassifierConfig cc;
    cc.seed = stats::mix_seed(808, s);
    auto shape = classify_shape(xs, full, left, gof, cc);
    CHECK(shape.shape == ShapeClass::TruncatedLogNormal);
    CHECK(shape.left_truncation_score > 0.05);
    CHECK(shape.mode_log10 < 3.0);
  }
}

TEST_CASE("clean log-normal samples classify as full at least 95% of the time") {
  int full_cnt = 0;
  const int trials = 60;
  for (int s = 0; s < trials; ++s) {
    auto xs = gen_country(plain_country(800, stats::mix_seed(909, s)));
    auto full = fit_lognormal(xs);
    GofConfig g;
    g.bootstrap_replicates = 300;
    g.seed = stats::mix_seed(1010, s);
    auto gof = evaluate_gof(xs, full, g);
    auto left = refit_left_of_mode(xs, full);
    ClassifierConfig cc;
    cc.seed = stats::mix_seed(1111, s);
    if (classify_shape(xs, full, left, gof, cc).shape == ShapeClass::FullLogNormal) ++full_cnt;
  }
  CHECK(full_cnt >= 57);
}

TEST_CASE("classification diagnostics are scale equivariant") {
  auto xs = gen_country(plain_country(600, 31));
  auto scaled = xs;
  const double k = 1000.0;  // whole decades keep the histogram alignment
  for (auto& x : scaled) x *= k;

  auto f1 = fit_lognormal(xs);
  auto f2 = fit_lognormal(scaled);
  CHECK(f2.mu - f1.mu == doctest::Approx(std::log(k)).epsilon(1e-10));
  CHECK(f2.sigma == doctest::Approx(f1.sigma).epsilon(1e-10));

  GofConfig g;
  g.bootstrap_replicates = 0;
  auto gof1 = evaluate_gof(xs, f1, g);
  auto gof2 = evaluate_gof(scaled, f2, g);
  CHECK(gof2.ks_stat == doctest::Approx(gof1.ks_stat).epsilon(1e-10));
  CHECK(gof2.cvm_stat == doctest::Approx(gof1.cvm_stat).epsilon(1e-10));

  auto l1 = refit_left_of_mode(xs, f1);
  auto l2 = refit_left_of_mode(scaled, f2);
  CHECK(l2.n == l1.n);
  ClassifierConfig cc;
  cc.left_bootstrap_replicates = 0;
  auto s1 = classify_shape(xs, f1, l1, gof1, cc);
  auto s2 = classify_shape(scaled, f2, l2, gof2, cc);
  CHECK(s2.left_truncation_score == doctest::Approx(s1.left_truncation_score).epsilon(1e-10));
  CHECK(s2.right_excess_score == doctest::Approx(s1.right_excess_score).epsilon(1e-10));
  CHECK(s2.shape == s1.shape);
}

TEST_CASE("classification is deterministic") {
  auto xs = gen_country(plain_country(500, 99));
  auto full = fit_lognormal(xs);
  GofConfig g;
  g.bootstrap_replicates = 150;
  g.seed = 5;
  auto gof = evaluate_gof(xs, full, g);
  auto left = refit_left_of_mode(xs, full);
  ClassifierConfig cc;
  cc.seed = 6;
  auto a = classify_shape(xs, full, left, gof, cc);
  auto b = classify_shape(xs, full, left, gof, cc);
  CHECK(a.shape == b.shape);
  CHECK(a.left_cvm_pvalue == b.left_cvm_pvalue);
  CHECK(a.right_excess_score == b.right_excess_score);
}
