#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "exdist/common.hpp"

namespace exdist {

/// One raw export observation: country exported `volume` (thousands of USD)
/// of product `product` in `year`. Product codes are 2, 4 or 6 digit strings;
/// 6-digit codes are later summed into their 4-digit prefix.
struct ExportRecord {
  int year = 0;
  std::string country;   // 3-letter code
  std::string product;   // digit string, length 2, 4 or 6
  double volume = 0.0;   // >= 0, thousands of USD
  std::string category;  // optional 2-digit category label
  std::size_t line = 0;  // 1-based source line, for reject reports
};

struct RejectedRow {
  std::size_t line = 0;
  std::string reason;
};

/// Column mapping for delimiter-separated input with a header row.
struct ColumnConfig {
  char delimiter = ',';
  std::string year_col = "year";
  std::string country_col = "country";
  std::string product_col = "product";
  std::string volume_col = "volume";
  std::string category_col = "category";  // optional in the file
};

struct ParseResult {
  std::vector<ExportRecord> records;
  std::vector<RejectedRow> rejects;
};

/// Country x product export-volume matrix. Codes are sorted
/// lexicographically; zero cells mean "not exported".
struct TradeMatrix {
  std::vector<std::string> countries;
  std::vector<std::string> products;
  DenseMatrix volumes;  // countries.size() x products.size()
  int year = 0;
  std::vector<std::string> product_category;  // aligned with products; "" if unknown

  std::size_t country_index(const std::string& code) const;  // throws if unknown
  double row_sum(std::size_t c) const;
};

struct AggregationResult {
  TradeMatrix matrix;
  std::vector<RejectedRow> rejects;  // 2-digit records, with source lines
};

/// Per-country macro indicators. Missing columns stay unset.
struct IndicatorRow {
  std::string country;
  std::optional<double> gdp;
  std::optional<double> gdp_pc;
  std::optional<double> total_export;
};

struct IndicatorTable {
  std::vector<IndicatorRow> rows;

  const IndicatorRow* find(const std::string& country) const;
};

/// Parses delimiter-separated export records. Malformed rows land in the
/// reject list with their line number; a missing mandatory column is a hard
/// error.
ParseResult parse_records(std::istream& in, const ColumnConfig& cfg = {});

/// Sums 6-digit products into their 4-digit prefix, merges duplicate
/// (country, product) pairs and builds the sorted matrix. 2-digit records
/// are rejected (too coarse to disaggregate). All records must share one
/// year.
AggregationResult aggregate_to_4digit(const std::vector<ExportRecord>& records);

/// All strictly positive volumes of one country's row (zeros are absent
/// trade, not observations).
std::vector<double> country_volume_sample(const TradeMatrix& m, const std::string& country);

IndicatorTable parse_indicators(std::istream& in, char delimiter = ',');

/// Checks that indicator countries are a subset of the matrix countries and
/// that an explicit total_export agrees with the matrix row sum within 1%.
void validate_indicators(const IndicatorTable& table, const TradeMatrix& matrix);

}  // namespace exdist
