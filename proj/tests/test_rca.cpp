#include <doctest.h>

#include <random>

#include "exdist/rca.hpp"

using namespace exdist;

namespace {

TradeMatrix make_matrix(std::vector<std::vector<double>> rows) {
  TradeMatrix m;
  for (std::size_t c = 0; c < rows.size(); ++c) m.countries.push_back("A" + std::to_string(c + 10));
  for (std::size_t p = 0; p < rows[0].size(); ++p) m.products.push_back("000" + std::to_string(p + 1));
  m.volumes = DenseMatrix(rows.size(), rows[0].size());
  for (std::size_t c = 0; c < rows.size(); ++c)
    for (std::size_t p = 0; p < rows[c].size(); ++p) m.volumes.at(c, p) = rows[c][p];
  return m;
}

}  // namespace

TEST_CASE("rca of a symmetric matrix is all ones") {
  auto rca = rca_matrix(make_matrix({{1, 1}, {1, 1}}));
  for (double v : rca.data) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("rca hand values") {
  auto diag = rca_matrix(make_matrix({{10, 0}, {0, 10}}));
  CHECK(diag.at(0, 0) == doctest::Approx(2.0));
  CHECK(diag.at(0, 1) == doctest::Approx(0.0));
  CHECK(diag.at(1, 1) == doctest::Approx(2.0));

  auto r = rca_matrix(make_matrix({{4, 1}, {1, 4}}));
  CHECK(r.at(0, 0) == doctest::Approx(1.6));
  CHECK(r.at(0, 1) == doctest::Approx(0.4));
  CHECK(r.at(1, 0) == doctest::Approx(0.4));
  CHECK(r.at(1, 1) == doctest::Approx(1.6));
}

TEST_CASE("degenerate rows and columns get rca zero") {
  auto r = rca_matrix(make_matrix({{1, 2, 0}, {0, 0, 0}, {3, 1, 0}}));
  for (std::size_t p = 0; p < 3; ++p) CHECK(r.at(1, p) == 0.0);
  for (std::size_t c = 0; c < 3; ++c) CHECK(r.at(c, 2) == 0.0);
  CHECK_THROWS_AS(rca_matrix(TradeMatrix{}), Error);
}

TEST_CASE("binarize thresholds inclusively") {
  auto m = make_matrix({{4, 1}, {1, 4}});
  auto b = binarize(m, 1.0);
  CHECK(b.at(0, 0) == 1);
  CHECK(b.at(0, 1) == 0);
  CHECK(b.at(1, 0) == 0);
  CHECK(b.at(1, 1) == 1);

  auto ones = binarize(make_matrix({{1, 1}, {1, 1}}), 1.0);  // all-ones rca, boundary inclusive
  for (auto v : ones.m) CHECK(v == 1);
  CHECK_THROWS_AS(binarize(m, 0.0), Error);
}

TEST_CASE("rca is invariant under global rescaling") {
  auto base = make_matrix({{4, 1, 7}, {1, 4, 0}, {2, 2, 2}});
  auto scaled = base;
  for (auto& v : scaled.volumes.data) v *= 1737.25;
  auto r1 = rca_matrix(base);
  auto r2 = rca_matrix(scaled);
  for (std::size_t i = 0; i < r1.data.size(); ++i)
    CHECK(r2.data[i] == doctest::Approx(r1.data[i]).epsilon(1e-12));
}

TEST_CASE("rca commutes with row and column permutations") {
  auto base = make_matrix({{4, 1, 7}, {1, 4, 0}, {2, 2, 2}});
  auto permuted = make_matrix({{0, 4, 1}, {2, 2, 2}, {7, 1, 4}});  // rows (2,0,1), cols reversed
  auto r = rca_matrix(base);
  auto rp = rca_matrix(permuted);
  const std::size_t row_map[3] = {2, 0, 1};
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t p = 0; p < 3; ++p)
      CHECK(rp.at(row_map[c], 2 - p) == doctest::Approx(r.at(c, p)).epsilon(1e-12));
}

TEST_CASE("export-share-weighted mean rca is one for every traded product") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t C = 2 + gen() % 8, P = 2 + gen() % 10;
    TradeMatrix m;
    for (std::size_t c = 0; c < C; ++c) m.countries.push_back("C" + std::to_string(c + 10));
    for (std::size_t p = 0; p < P; ++p) m.products.push_back("P" + std::to_string(p + 10));
    m.volumes = DenseMatrix(C, P);
    for (auto& v : m.volumes.data)
      if (gen() % 3) v = static_cast<double>(gen() % 1000) / 3.0;
    double total = 0.0;
    std::vector<double> row_tot(C, 0.0), col_tot(P, 0.0);
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t p = 0; p < P; ++p) {
        row_tot[c] += m.volumes.at(c, p);
        col_tot[p] += m.volumes.at(c, p);
        total += m.volumes.at(c, p);
      }
    if (total == 0.0) continue;
    auto r = rca_matrix(m);
    for (std::size_t p = 0; p < P; ++p) {
      if (col_tot[p] == 0.0) continue;
      double weighted = 0.0;
      for (std::size_t c = 0; c < C; ++c) weighted += (row_tot[c] / total) * r.at(c, p);
      CHECK(weighted == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}
