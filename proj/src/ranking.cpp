#include "exdist/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace exdist {

RankingCurve ranking_curve(std::span<const double> sample, std::string country) {
  if (sample.empty()) throw Error("ranking_curve: empty sample");
  RankingCurve curve;
  curve.country = std::move(country);
  curve.volumes.assign(sample.begin(), sample.end());
  for (double v : curve.volumes)
    if (!(v > 0.0)) throw Error("ranking_curve: volumes must be positive");
  std::sort(curve.volumes.begin(), curve.volumes.end(), std::greater<>());
  return curve;
}

int count_crossings(const RankingCurve& a, const RankingCurve& b) {
  if (a.volumes.empty() || b.volumes.empty()) throw Error("count_crossings: empty curve");
  const std::size_t overlap = std::min(a.size(), b.size());
  int crossings = 0;
  int last_sign = 0;
  for (std::size_t r = 0; r < overlap; ++r) {
    const double d = a.volumes[r] - b.volumes[r];
    const int sign = (d > 0.0) - (d < 0.0);
    if (sign == 0) continue;  // inherits the previous nonzero sign
    if (last_sign != 0 && sign != last_sign) ++crossings;
    last_sign = sign;
  }
  return crossings;
}

DominanceSummary dominance_matrix(const std::vector<RankingCurve>& curves) {
  DominanceSummary out;
  for (const auto& c : curves) out.countries.push_back(c.country);
  if (curves.size() < 2) {
    out.zero_crossing_share = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  std::size_t zero_cross = 0, unordered = 0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t j = 0; j < curves.size(); ++j) {
      if (i == j) continue;
      DominancePair pair;
      pair.a = i;
      pair.b = j;
      const std::size_t overlap = std::min(curves[i].size(), curves[j].size());
      std::size_t above = 0;
      for (std::size_t r = 0; r < overlap; ++r)
        if (curves[i].volumes[r] > curves[j].volumes[r]) ++above;
      pair.frac_a_above = static_cast<double>(above) / static_cast<double>(overlap);
      pair.crossings = count_crossings(curves[i], curves[j]);
      if (i < j) {
        ++unordered;
        if (pair.crossings == 0) ++zero_cross;
      }
      out.pairs.push_back(pair);
    }
  }
  out.zero_crossing_share = static_cast<double>(zero_cross) / static_cast<double>(unordered);
  return out;
}

IndicatorColoring indicator_ranks(const std::vector<std::string>& countries,
                                  const std::vector<std::optional<double>>& values,
                                  const std::string& indicator_name) {
  if (countries.size() != values.size()) throw Error("indicator_ranks: input lengths differ");
  if (countries.empty()) throw Error("indicator_ranks: no countries");
  std::string missing;
  for (std::size_t i = 0; i < countries.size(); ++i)
    if (!values[i]) missing += " " + countries[i];
  if (!missing.empty())
    throw Error("indicator_ranks: missing " + indicator_name + " for:" + missing);

  const std::size_t C = countries.size();
  std::vector<std::size_t> idx(C);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (*values[a] != *values[b]) return *values[a] > *values[b];
    return countries[a] < countries[b];
  });

  IndicatorColoring out;
  out.indicator = indicator_name;
  out.countries = countries;
  out.ranks.assign(C, 0);
  out.color_index.assign(C, 0.0);
  for (std::size_t pos = 0; pos < C; ++pos) out.ranks[idx[pos]] = static_cast<int>(pos) + 1;
  for (std::size_t i = 0; i < C; ++i)
    out.color_index[i] =
        (C > 1) ? static_cast<double>(out.ranks[i] - 1) / static_cast<double>(C - 1) : 0.0;
  return out;
}

}  // namespace exdist
