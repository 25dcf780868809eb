#include "exdist/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "exdist/stats.hpp"

namespace exdist {

using stats::normal_cdf;
using stats::normal_pdf;
using stats::normal_quantile;

double SynthCountrySpec::total_log_mean() const {
  return static_cast<double>(k_capabilities) * capability_log_mean;
}

double SynthCountrySpec::total_log_sd() const {
  return std::sqrt(static_cast<double>(k_capabilities)) * capability_log_sd;
}

void SynthCountrySpec::validate() const {
  if (n_products < 1) throw Error("synth: n_products must be >= 1");
  if (k_capabilities < 1) throw Error("synth: k_capabilities must be >= 1");
  if (!std::isfinite(capability_log_mean) || !std::isfinite(capability_log_sd) ||
      capability_log_sd < 0.0)
    throw Error("synth: capability parameters must be finite, sd >= 0");
  if (left_threshold && !(*left_threshold > 0.0))
    throw Error("synth: left_threshold must be positive");
  if (right_cap) {
    if (!(right_cap->cap_quantile > 0.0 && right_cap->cap_quantile < 1.0))
      throw Error("synth: cap_quantile must lie in (0,1)");
    if (!(right_cap->pareto_alpha > 0.0)) throw Error("synth: pareto_alpha must be positive");
    if (capability_log_sd <= 0.0) throw Error("synth: right_cap needs capability_log_sd > 0");
  }
}

GraftParams graft_params(const SynthCountrySpec& spec) {
  spec.validate();
  if (!spec.right_cap) throw Error("graft_params: spec has no right_cap");
  const double mu = spec.total_log_mean();
  const double sd = spec.total_log_sd();
  const double q = spec.right_cap->cap_quantile;
  const double zq = normal_quantile(q);
  GraftParams gp;
  gp.graft_point = std::exp(mu + sd * zq);
  gp.body_mass = q;
  gp.tail_mass = spec.right_cap->hard_ceiling
                     ? 0.0
                     : normal_pdf(zq) / (sd * spec.right_cap->pareto_alpha);
  gp.normalizer = spec.right_cap->hard_ceiling ? q : q + gp.tail_mass;
  return gp;
}

double synth_density(const SynthCountrySpec& spec, double x) {
  spec.validate();
  if (!(x > 0.0)) return 0.0;
  const double mu = spec.total_log_mean();
  const double sd = spec.total_log_sd();
  auto base_density = [&](double v) {
    const double z = (std::log(v) - mu) / sd;
    return normal_pdf(z) / (sd * v);
  };
  if (!spec.right_cap) return base_density(x);
  const GraftParams gp = graft_params(spec);
  if (spec.right_cap->hard_ceiling)
    return x <= gp.graft_point ? base_density(x) / gp.normalizer : 0.0;
  if (x <= gp.graft_point) return base_density(x) / gp.normalizer;
  const double a = spec.right_cap->pareto_alpha;
  return base_density(gp.graft_point) * std::pow(x / gp.graft_point, -a - 1.0) / gp.normalizer;
}

std::vector<double> gen_country_cells(const SynthCountrySpec& spec) {
  spec.validate();
  if (!spec.seed) throw Error("gen_country: spec has no seed");
  stats::Rng rng(*spec.seed);

  const double m = spec.capability_log_mean;
  const double s = spec.capability_log_sd;
  const double mu = spec.total_log_mean();
  const double sd = spec.total_log_sd();

  double graft = 0.0, q = 0.0, tail_prob = 0.0, alpha = 0.0;
  bool hard = false;
  if (spec.right_cap) {
    const GraftParams gp = graft_params(spec);
    graft = gp.graft_point;
    q = gp.body_mass;
    alpha = spec.right_cap->pareto_alpha;
    hard = spec.right_cap->hard_ceiling;
    tail_prob = hard ? 0.0 : gp.tail_mass / gp.normalizer;
  }
  auto body_redraw = [&]() { return std::exp(mu + sd * normal_quantile(rng.uniform01() * q)); };
  auto tail_draw = [&]() { return graft * std::pow(1.0 - rng.uniform01(), -1.0 / alpha); };

  std::vector<double> cells(static_cast<std::size_t>(spec.n_products));
  for (auto& cell : cells) {
    double ln_x = 0.0;
    for (int j = 0; j < spec.k_capabilities; ++j) ln_x += m + s * rng.normal();
    double x = std::exp(ln_x);

    if (spec.right_cap) {
      if (hard) {
        if (x > graft) x = body_redraw();
      } else {
        const double base_tail = 1.0 - q;
        if (tail_prob >= base_tail) {
          // Heavy graft: some body draws migrate into the tail.
          if (x > graft) {
            x = tail_draw();
          } else if (rng.uniform01() < (tail_prob - base_tail) / q) {
            x = tail_draw();
          }
        } else {
          // Light graft: some above-cap draws fall back into the body.
          if (x > graft) x = (rng.uniform01() < tail_prob / base_tail) ? tail_draw() : body_redraw();
        }
      }
    }
    if (spec.left_threshold && x < *spec.left_threshold) x = 0.0;
    cell = x;
  }
  return cells;
}

std::vector<double> gen_country(const SynthCountrySpec& spec) {
  auto cells = gen_country_cells(spec);
  std::vector<double> sample;
  sample.reserve(cells.size());
  for (double v : cells)
    if (v > 0.0) sample.push_back(v);
  if (sample.empty())
    throw Error("empty synthetic sample" +
                (spec.code.empty() ? std::string() : " for country " + spec.code));
  return sample;
}

namespace {

std::string default_code(std::size_t i) {
  std::string code = "AAA";
  code[2] = static_cast<char>('A' + i % 26);
  code[1] = static_cast<char>('A' + (i / 26) % 26);
  code[0] = static_cast<char>('A' + (i / 676) % 26);
  return code;
}

std::string product_code(std::size_t i) {
  std::string code = "0000";
  std::size_t v = i + 1;
  for (int pos = 3; pos >= 0 && v > 0; --pos, v /= 10)
    code[static_cast<std::size_t>(pos)] = static_cast<char>('0' + v % 10);
  return code;
}

}  // namespace

SynthCorpus gen_corpus(const SynthCorpusSpec& spec) {
  if (spec.countries.empty()) throw Error("gen_corpus: no country specs");

  std::vector<SynthCountrySpec> resolved = spec.countries;
  for (std::size_t i = 0; i < resolved.size(); ++i) {
    auto& cs = resolved[i];
    cs.validate();
    if (cs.code.empty()) cs.code = default_code(i);
    if (cs.code.size() != 3) throw Error("gen_corpus: country codes must have length 3");
    if (!cs.seed) cs.seed = stats::mix_seed(spec.seed, static_cast<std::uint64_t>(i));
  }
  std::sort(resolved.begin(), resolved.end(),
            [](const auto& a, const auto& b) { return a.code < b.code; });
  for (std::size_t i = 0; i + 1 < resolved.size(); ++i)
    if (resolved[i].code == resolved[i + 1].code)
      throw Error("gen_corpus: duplicate country code " + resolved[i].code);

  std::size_t max_products = 0;
  for (const auto& cs : resolved) max_products = std::max(max_products, static_cast<std::size_t>(cs.n_products));
  if (max_products > 9999) throw Error("gen_corpus: more than 9999 products cannot be coded in 4 digits");

  SynthCorpus corpus;
  TradeMatrix& m = corpus.matrix;
  m.year = spec.year;
  for (const auto& cs : resolved) m.countries.push_back(cs.code);
  for (std::size_t p = 0; p < max_products; ++p) m.products.push_back(product_code(p));
  m.product_category.assign(max_products, "");
  m.volumes = DenseMatrix(resolved.size(), max_products);

  for (std::size_t c = 0; c < resolved.size(); ++c) {
    const auto cells = gen_country_cells(resolved[c]);
    bool any = false;
    for (std::size_t p = 0; p < cells.size(); ++p) {
      m.volumes.at(c, p) = cells[p];
      any = any || cells[p] > 0.0;
    }
    if (!any) throw Error("empty synthetic sample for country " + resolved[c].code);
    corpus.labels.push_back(resolved[c].intended_class);
  }
  corpus.resolved = std::move(resolved);
  return corpus;
}

}  // namespace exdist
