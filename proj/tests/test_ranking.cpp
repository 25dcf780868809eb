#include <doctest.h>

#include <cmath>

#include "exdist/gof.hpp"
#include "exdist/ranking.hpp"
#include "exdist/stats.hpp"

using namespace exdist;

TEST_CASE("ranking curve sorts descending and keeps ties") {
  CHECK(ranking_curve(std::vector<double>{2, 9, 5}, "AAA").volumes ==
        std::vector<double>{9, 5, 2});
  CHECK(ranking_curve(std::vector<double>{4, 4}, "AAA").volumes == std::vector<double>{4, 4});
  CHECK(ranking_curve(std::vector<double>{7}, "AAA").volumes == std::vector<double>{7});
  CHECK_THROWS_AS(ranking_curve(std::vector<double>{}, "AAA"), Error);
  CHECK_THROWS_AS(ranking_curve(std::vector<double>{1, 0}, "AAA"), Error);
}

TEST_CASE("crossing counts follow the sign-alternation rule") {
  auto a = ranking_curve(std::vector<double>{10, 5, 1}, "AAA");
  auto b = ranking_curve(std::vector<double>{8, 4, 0.5}, "BBB");
  CHECK(count_crossings(a, b) == 0);

  auto c = ranking_curve(std::vector<double>{8, 6, 0.5}, "CCC");
  CHECK(count_crossings(a, c) == 2);  // signs +,-,+
  CHECK(count_crossings(c, a) == 2);  // symmetric

  CHECK(count_crossings(a, a) == 0);  // all zero differences

  // zeros inherit the previous sign: +,0,- is one crossing
  auto d = ranking_curve(std::vector<double>{9, 5, 1.5}, "DDD");
  CHECK(count_crossings(a, d) == 1);
}

TEST_CASE("dominance matrix on nested scalar curves") {
  std::vector<RankingCurve> curves;
  const std::vector<double> base{13, 8, 5, 2, 1};
  for (int i = 0; i < 4; ++i) {
    std::vector<double> scaled;
    for (double v : base) scaled.push_back(v * std::pow(3.0, i));
    curves.push_back(ranking_curve(scaled, "C" + std::to_string(i)));
  }
  auto dom = dominance_matrix(curves);
  CHECK(dom.zero_crossing_share == doctest::Approx(1.0));
  CHECK(dom.pairs.size() == 12);  // ordered pairs
  for (const auto& p : dom.pairs) {
    CHECK(p.crossings == 0);
    CHECK((p.frac_a_above == doctest::Approx(1.0) || p.frac_a_above == doctest::Approx(0.0)));
  }
}

TEST_CASE("dominance matrix of the two-curve crossing example") {
  std::vector<RankingCurve> curves{ranking_curve(std::vector<double>{10, 5, 1}, "AAA"),
                                   ranking_curve(std::vector<double>{8, 6, 0.5}, "BBB")};
  auto dom = dominance_matrix(curves);
  CHECK(dom.pairs.size() == 2);
  CHECK(dom.zero_crossing_share == doctest::Approx(0.0));
  CHECK(dom.pairs[0].crossings == 2);
  CHECK(dom.pairs[0].frac_a_above == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("single-country dominance is empty") {
  std::vector<RankingCurve> one{ranking_curve(std::vector<double>{3, 2}, "AAA")};
  auto dom = dominance_matrix(one);
  CHECK(dom.pairs.empty());
  CHECK(std::isnan(dom.zero_crossing_share));
}

TEST_CASE("dominant curves stay dominant under mild rescaling") {
  auto a = ranking_curve(std::vector<double>{10, 5, 1}, "AAA");
  auto b = ranking_curve(std::vector<double>{8, 4, 0.5}, "BBB");
  REQUIRE(count_crossings(a, b) == 0);
  auto scaled = a;
  for (auto& v : scaled.volumes) v *= 1.05;  // still above b everywhere
  CHECK(count_crossings(scaled, b) == 0);
}

TEST_CASE("indicator ranks assign a permutation with code tiebreaks") {
  std::vector<std::string> countries{"AAA", "BBB", "CCC"};
  auto coloring = indicator_ranks(countries, {3.2, 1.1, 7.8}, "gdp");
  CHECK(coloring.ranks == std::vector<int>{2, 3, 1});
  CHECK(coloring.color_index[0] == doctest::Approx(0.5));
  CHECK(coloring.color_index[1] == doctest::Approx(1.0));
  CHECK(coloring.color_index[2] == doctest::Approx(0.0));

  auto tied = indicator_ranks(countries, {5.0, 5.0, 1.0}, "gdp");
  CHECK(tied.ranks == std::vector<int>{1, 2, 3});

  auto single = indicator_ranks({"AAA"}, {std::optional<double>(9.0)}, "fitness");
  CHECK(single.ranks == std::vector<int>{1});
  CHECK(single.color_index[0] == 0.0);

  CHECK_THROWS_WITH_AS(
      static_cast<void>(indicator_ranks(countries, {1.0, std::nullopt, 2.0}, "gdp")),
      doctest::Contains("BBB"), Error);
}

TEST_CASE("indicator ranks are always a permutation") {
  stats::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t C = 1 + rng.next_u64() % 12;
    std::vector<std::string> countries;
    std::vector<std::optional<double>> values;
    for (std::size_t i = 0; i < C; ++i) {
      countries.push_back("C" + std::to_string(10 + i));
      values.push_back(static_cast<double>(rng.next_u64() % 5));  // many ties
    }
    auto coloring = indicator_ranks(countries, values, "x");
    std::vector<int> sorted = coloring.ranks;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < C; ++i) CHECK(sorted[i] == static_cast<int>(i) + 1);
  }
}
