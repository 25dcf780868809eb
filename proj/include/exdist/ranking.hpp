#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "exdist/common.hpp"

namespace exdist {

/// A country's export volumes sorted descending; index+1 is the rank.
struct RankingCurve {
  std::string country;
  std::vector<double> volumes;  // non-increasing, all > 0

  std::size_t size() const { return volumes.size(); }
};

RankingCurve ranking_curve(std::span<const double> sample, std::string country);

/// Number of strict sign alternations of a_r - b_r over the overlapping
/// rank range; zero differences inherit the previous nonzero sign.
int count_crossings(const RankingCurve& a, const RankingCurve& b);

struct DominancePair {
  std::size_t a = 0;  // indices into DominanceSummary::countries
  std::size_t b = 0;
  double frac_a_above = 0.0;  // fraction of overlapping ranks with a_r > b_r
  int crossings = 0;
};

struct DominanceSummary {
  std::vector<std::string> countries;
  std::vector<DominancePair> pairs;   // all ordered pairs a != b
  double zero_crossing_share = 0.0;   // over unordered pairs; NaN when < 2 curves
};

DominanceSummary dominance_matrix(const std::vector<RankingCurve>& curves);

/// Dense descending rank of an indicator plus a normalized [0,1] color
/// index ((rank-1)/(C-1), 0 for a single country). Ties break by country
/// code. A missing value is an error naming the countries.
struct IndicatorColoring {
  std::string indicator;
  std::vector<std::string> countries;
  std::vector<int> ranks;         // permutation of 1..C
  std::vector<double> color_index;
};

IndicatorColoring indicator_ranks(const std::vector<std::string>& countries,
                                  const std::vector<std::optional<double>>& values,
                                  const std::string& indicator_name);

}  // namespace exdist
