#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "exdist/ingest.hpp"

namespace exdist {

/// Right-side modification of the generated law. The default grafts a
/// Pareto tail with continuous density at the graft point (the whole
/// density is renormalized, so a heavy tail carries more than 1-q of the
/// mass). hard_ceiling instead redraws everything above the graft point
/// back into the body, a pure right truncation.
struct RightCap {
  double cap_quantile = 0.9;
  double pareto_alpha = 1.0;
  bool hard_ceiling = false;
};

/// One synthetic country: each product volume is the product of
/// k_capabilities i.i.d. log-normal capability factors, so the log-volume
/// is exactly normal with mean k*m and variance k*s^2 before modifications.
struct SynthCountrySpec {
  std::string code;  // 3-letter; auto-assigned by gen_corpus when empty
  int n_products = 0;
  int k_capabilities = 1;
  double capability_log_mean = 0.0;
  double capability_log_sd = 1.0;
  std::optional<double> left_threshold;  // volumes strictly below are discarded
  std::optional<RightCap> right_cap;
  std::string intended_class;  // label carried into the corpus label table
  std::optional<std::uint64_t> seed;

  double total_log_mean() const;
  double total_log_sd() const;
  void validate() const;
};

struct SynthCorpusSpec {
  std::vector<SynthCountrySpec> countries;
  std::uint64_t seed = 1;
  int year = 2010;
};

/// Derived graft geometry of a RightCap on top of the country's base law.
struct GraftParams {
  double graft_point = 0.0;   // volume at the cap quantile
  double body_mass = 0.0;     // unnormalized, equals cap_quantile
  double tail_mass = 0.0;     // unnormalized Pareto tail mass
  double normalizer = 0.0;    // body_mass + tail_mass
};

GraftParams graft_params(const SynthCountrySpec& spec);

/// Density of the modified (grafted) law at x, ignoring any left threshold.
double synth_density(const SynthCountrySpec& spec, double x);

/// Surviving volumes of one country (deterministic in spec.seed, which must
/// be set). Throws if the left threshold discards everything.
std::vector<double> gen_country(const SynthCountrySpec& spec);

/// Per-product cells including exact zeros where the left threshold
/// discarded the draw; same RNG stream as gen_country.
std::vector<double> gen_country_cells(const SynthCountrySpec& spec);

struct SynthCorpus {
  TradeMatrix matrix;
  std::vector<std::string> labels;          // aligned with matrix.countries
  std::vector<SynthCountrySpec> resolved;   // specs with codes and seeds filled in
};

/// Assembles a corpus matrix: country i exports products 0..n_products-1 of
/// a shared 4-digit code list, so richer specs nest over poorer ones.
/// Missing per-country seeds derive from the corpus seed.
SynthCorpus gen_corpus(const SynthCorpusSpec& spec);

}  // namespace exdist
