#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "exdist/ingest.hpp"
#include "exdist/stats.hpp"

using namespace exdist;

namespace {

ParseResult parse(const std::string& text, ColumnConfig cfg = {}) {
  std::istringstream in(text);
  return parse_records(in, cfg);
}

}  // namespace

TEST_CASE("parse_records maps well-formed rows") {
  auto r = parse("year,country,product,volume\n2010,ARG,8703,1250.5\n");
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].year == 2010);
  CHECK(r.records[0].country == "ARG");
  CHECK(r.records[0].product == "8703");
  CHECK(r.records[0].volume == doctest::Approx(1250.5));
  CHECK(r.rejects.empty());
}

TEST_CASE("parse_records rejects bad rows with line numbers") {
  auto r = parse(
      "year,country,product,volume\n"
      "2010,ARG,8703,-5\n"
      "2010,ARG,8703,abc\n"
      "2010,ARGX,8703,1\n"
      "2010,ARG,87,1\n"     // 2-digit is fine at parse time
      "2010,ARG,870,1\n");  // 3-digit is not a valid code length
  CHECK(r.records.size() == 1);
  REQUIRE(r.rejects.size() == 4);
  CHECK(r.rejects[0].line == 2);
  CHECK(r.rejects[0].reason == "negative volume");
  CHECK(r.rejects[1].reason == "unparseable volume");
  CHECK(r.rejects[2].reason == "bad country code");
  CHECK(r.rejects[3].line == 6);
}

TEST_CASE("parse_records keeps 6-digit codes until aggregation") {
  auto r = parse("year,country,product,volume\n2010,CHN,870323,10\n");
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].product == "870323");
}

TEST_CASE("missing mandatory column is a hard error") {
  CHECK_THROWS_AS(parse("year,country,volume\n2010,ARG,5\n"), Error);
}

TEST_CASE("column mapping and delimiter are configurable") {
  ColumnConfig cfg;
  cfg.delimiter = ';';
  cfg.volume_col = "value_kusd";
  auto r = parse("country;product;value_kusd;year\nGHA;0101;3.5;1999\n", cfg);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].country == "GHA");
  CHECK(r.records[0].year == 1999);
}

TEST_CASE("aggregate sums 6-digit codes into their 4-digit prefix") {
  std::vector<ExportRecord> recs = {
      {2010, "CHN", "870323", 10.0, "", 1},
      {2010, "CHN", "870324", 5.0, "", 2},
  };
  auto agg = aggregate_to_4digit(recs);
  REQUIRE(agg.matrix.countries == std::vector<std::string>{"CHN"});
  REQUIRE(agg.matrix.products == std::vector<std::string>{"8703"});
  CHECK(agg.matrix.volumes.at(0, 0) == doctest::Approx(15.0));
}

TEST_CASE("aggregate merges duplicate country-product pairs") {
  std::vector<ExportRecord> recs = {
      {2010, "ARG", "8703", 7.0, "", 1},
      {2010, "ARG", "8703", 3.0, "", 2},
  };
  auto agg = aggregate_to_4digit(recs);
  CHECK(agg.matrix.volumes.at(0, 0) == doctest::Approx(10.0));
}

TEST_CASE("aggregate rejects 2-digit codes and mixed years") {
  std::vector<ExportRecord> recs = {
      {2010, "GHA", "27", 100.0, "", 5},
      {2010, "GHA", "2701", 1.0, "", 6},
  };
  auto agg = aggregate_to_4digit(recs);
  REQUIRE(agg.rejects.size() == 1);
  CHECK(agg.rejects[0].line == 5);
  CHECK(agg.rejects[0].reason == "2-digit code");

  std::vector<ExportRecord> mixed = {
      {2010, "GHA", "2701", 1.0, "", 1},
      {2011, "GHA", "2701", 1.0, "", 2},
  };
  CHECK_THROWS_AS(aggregate_to_4digit(mixed), Error);
}

TEST_CASE("aggregation conserves volume and ignores input order") {
  std::mt19937_64 gen(7);
  std::vector<ExportRecord> recs;
  double total = 0.0;
  const char* countries[] = {"AAA", "BBB", "CCC", "DDD"};
  for (int i = 0; i < 500; ++i) {
    ExportRecord r;
    r.year = 2010;
    r.country = countries[gen() % 4];
    const int base = 1000 + static_cast<int>(gen() % 30);
    r.product = std::to_string(base);
    if (gen() % 2) r.product += std::to_string(10 + gen() % 90);  // 6-digit variant
    r.volume = static_cast<double>(gen() % 10000) / 8.0;
    r.line = static_cast<std::size_t>(i) + 2;
    total += r.volume;
    recs.push_back(r);
  }
  auto agg = aggregate_to_4digit(recs);
  double matrix_total = 0.0;
  for (double v : agg.matrix.volumes.data) matrix_total += v;
  CHECK(matrix_total == doctest::Approx(total).epsilon(1e-9));

  auto shuffled = recs;
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  auto agg2 = aggregate_to_4digit(shuffled);
  CHECK(agg2.matrix.countries == agg.matrix.countries);
  CHECK(agg2.matrix.products == agg.matrix.products);
  for (std::size_t i = 0; i < agg.matrix.volumes.data.size(); ++i)
    CHECK(agg2.matrix.volumes.data[i] == doctest::Approx(agg.matrix.volumes.data[i]).epsilon(1e-12));
}

TEST_CASE("country_volume_sample filters zeros") {
  TradeMatrix m;
  m.countries = {"AAA", "BBB"};
  m.products = {"0001", "0002", "0003", "0004"};
  m.volumes = DenseMatrix(2, 4);
  m.volumes.at(0, 1) = 5.0;
  m.volumes.at(0, 3) = 2.0;
  auto s = country_volume_sample(m, "AAA");
  std::sort(s.begin(), s.end());
  CHECK(s == std::vector<double>{2.0, 5.0});
  CHECK(country_volume_sample(m, "BBB").empty());  // all-zero row: caller decides
  CHECK_THROWS_AS(country_volume_sample(m, "ZZZ"), Error);

  TradeMatrix ones;
  ones.countries = {"AAA"};
  ones.products = {"0001", "0002", "0003"};
  ones.volumes = DenseMatrix(1, 3, 1.0);
  CHECK(country_volume_sample(ones, "AAA").size() == 3);
}

TEST_CASE("indicator table parses subsets of columns and validates") {
  std::istringstream in("country,gdp,total_export\nAAA,100,7\nBBB,50,\n");
  auto table = parse_indicators(in);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].gdp == 100.0);
  CHECK(table.rows[0].total_export == 7.0);
  CHECK_FALSE(table.rows[1].total_export.has_value());
  CHECK_FALSE(table.rows[0].gdp_pc.has_value());

  TradeMatrix m;
  m.countries = {"AAA", "BBB"};
  m.products = {"0001", "0002"};
  m.volumes = DenseMatrix(2, 2);
  m.volumes.at(0, 0) = 3.0;
  m.volumes.at(0, 1) = 4.0;
  m.volumes.at(1, 0) = 1.0;
  CHECK_NOTHROW(validate_indicators(table, m));  // 7 == 3+4

  m.volumes.at(0, 1) = 5.0;  // derived total 8 vs stated 7: off by >1%
  CHECK_THROWS_AS(validate_indicators(table, m), Error);

  std::istringstream in2("country,gdp\nZZZ,1\n");
  auto stranger = parse_indicators(in2);
  m.volumes.at(0, 1) = 4.0;
  CHECK_THROWS_AS(validate_indicators(stranger, m), Error);
}
