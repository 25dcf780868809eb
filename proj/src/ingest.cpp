#include "exdist/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace exdist {

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delim)) out.push_back(field);
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_int(const std::string& s, int& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool all_alnum(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c); });
}

}  // namespace

std::size_t TradeMatrix::country_index(const std::string& code) const {
  auto it = std::lower_bound(countries.begin(), countries.end(), code);
  if (it == countries.end() || *it != code) throw Error("unknown country: " + code);
  return static_cast<std::size_t>(it - countries.begin());
}

double TradeMatrix::row_sum(std::size_t c) const {
  double s = 0.0;
  for (std::size_t p = 0; p < products.size(); ++p) s += volumes.at(c, p);
  return s;
}

ParseResult parse_records(std::istream& in, const ColumnConfig& cfg) {
  std::string line;
  if (!std::getline(in, line)) throw Error("parse_records: empty input, no header row");

  const auto header = split(line, cfg.delimiter);
  auto find_col = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (strip(header[i]) == name) return static_cast<int>(i);
    return -1;
  };
  const int year_ix = find_col(cfg.year_col);
  const int country_ix = find_col(cfg.country_col);
  const int product_ix = find_col(cfg.product_col);
  const int volume_ix = find_col(cfg.volume_col);
  const int category_ix = find_col(cfg.category_col);
  if (year_ix < 0 || country_ix < 0 || product_ix < 0 || volume_ix < 0) {
    std::string missing;
    if (year_ix < 0) missing += " " + cfg.year_col;
    if (country_ix < 0) missing += " " + cfg.country_col;
    if (product_ix < 0) missing += " " + cfg.product_col;
    if (volume_ix < 0) missing += " " + cfg.volume_col;
    throw Error("parse_records: missing mandatory column(s):" + missing);
  }
  const int max_ix = std::max({year_ix, country_ix, product_ix, volume_ix, category_ix});

  ParseResult result;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const auto fields = split(line, cfg.delimiter);
    auto reject = [&](const std::string& reason) {
      result.rejects.push_back({line_no, reason});
    };
    if (static_cast<int>(fields.size()) <= max_ix) {
      reject("too few fields");
      continue;
    }
    ExportRecord rec;
    rec.line = line_no;
    if (!parse_int(strip(fields[year_ix]), rec.year)) {
      reject("unparseable year");
      continue;
    }
    rec.country = strip(fields[country_ix]);
    if (rec.country.size() != 3 || !all_alnum(rec.country)) {
      reject("bad country code");
      continue;
    }
    rec.product = strip(fields[product_ix]);
    const auto len = rec.product.size();
    if (!all_digits(rec.product) || (len != 2 && len != 4 && len != 6)) {
      reject("bad product code");
      continue;
    }
    if (!parse_double(strip(fields[volume_ix]), rec.volume)) {
      reject("unparseable volume");
      continue;
    }
    if (!std::isfinite(rec.volume)) {
      reject("non-finite volume");
      continue;
    }
    if (rec.volume < 0.0) {
      reject("negative volume");
      continue;
    }
    if (category_ix >= 0) rec.category = strip(fields[category_ix]);
    result.records.push_back(std::move(rec));
  }
  return result;
}

AggregationResult aggregate_to_4digit(const std::vector<ExportRecord>& records) {
  AggregationResult out;
  std::map<std::pair<std::string, std::string>, double> cells;
  std::map<std::string, std::string> categories;
  std::optional<int> year;

  for (const auto& rec : records) {
    if (year && rec.year != *year)
      throw Error("aggregate_to_4digit: mixed years in input (" + std::to_string(*year) +
                  " and " + std::to_string(rec.year) + ")");
    year = rec.year;
    if (rec.product.size() == 2) {
      out.rejects.push_back({rec.line, "2-digit code"});
      continue;
    }
    const std::string product4 = rec.product.substr(0, 4);
    cells[{rec.country, product4}] += rec.volume;
    if (!rec.category.empty()) categories[product4] = rec.category;
  }

  std::set<std::string> country_set, product_set;
  for (const auto& [key, _] : cells) {
    country_set.insert(key.first);
    product_set.insert(key.second);
  }
  TradeMatrix& m = out.matrix;
  m.countries.assign(country_set.begin(), country_set.end());
  m.products.assign(product_set.begin(), product_set.end());
  m.year = year.value_or(0);
  m.volumes = DenseMatrix(m.countries.size(), m.products.size());
  m.product_category.assign(m.products.size(), "");
  for (std::size_t p = 0; p < m.products.size(); ++p) {
    auto it = categories.find(m.products[p]);
    if (it != categories.end()) m.product_category[p] = it->second;
  }
  for (const auto& [key, vol] : cells) {
    const auto c = m.country_index(key.first);
    const auto p = static_cast<std::size_t>(
        std::lower_bound(m.products.begin(), m.products.end(), key.second) - m.products.begin());
    m.volumes.at(c, p) = vol;
  }
  return out;
}

std::vector<double> country_volume_sample(const TradeMatrix& m, const std::string& country) {
  const std::size_t c = m.country_index(country);
  std::vector<double> sample;
  for (std::size_t p = 0; p < m.products.size(); ++p) {
    const double v = m.volumes.at(c, p);
    if (v > 0.0) sample.push_back(v);
  }
  return sample;
}

IndicatorTable parse_indicators(std::istream& in, char delimiter) {
  std::string line;
  if (!std::getline(in, line)) throw Error("parse_indicators: empty input, no header row");
  const auto header = split(line, delimiter);
  int country_ix = -1, gdp_ix = -1, gdp_pc_ix = -1, total_ix = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = strip(header[i]);
    if (name == "country") country_ix = static_cast<int>(i);
    else if (name == "gdp") gdp_ix = static_cast<int>(i);
    else if (name == "gdp_pc") gdp_pc_ix = static_cast<int>(i);
    else if (name == "total_export") total_ix = static_cast<int>(i);
  }
  if (country_ix < 0) throw Error("parse_indicators: missing mandatory column: country");

  IndicatorTable table;
  std::set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const auto fields = split(line, delimiter);
    auto get = [&](int ix) -> std::optional<double> {
      if (ix < 0 || ix >= static_cast<int>(fields.size())) return std::nullopt;
      const std::string s = strip(fields[ix]);
      if (s.empty()) return std::nullopt;
      double v;
      if (!parse_double(s, v) || !std::isfinite(v) || v < 0.0)
        throw Error("parse_indicators: bad value at line " + std::to_string(line_no));
      return v;
    };
    IndicatorRow row;
    row.country = strip(fields[country_ix]);
    if (row.country.size() != 3)
      throw Error("parse_indicators: bad country code at line " + std::to_string(line_no));
    if (!seen.insert(row.country).second)
      throw Error("parse_indicators: duplicate country " + row.country);
    row.gdp = get(gdp_ix);
    row.gdp_pc = get(gdp_pc_ix);
    row.total_export = get(total_ix);
    table.rows.push_back(std::move(row));
  }
  return table;
}

const IndicatorRow* IndicatorTable::find(const std::string& country) const {
  for (const auto& row : rows)
    if (row.country == country) return &row;
  return nullptr;
}

void validate_indicators(const IndicatorTable& table, const TradeMatrix& matrix) {
  std::string unknown, mismatched;
  for (const auto& row : table.rows) {
    auto it = std::lower_bound(matrix.countries.begin(), matrix.countries.end(), row.country);
    if (it == matrix.countries.end() || *it != row.country) {
      unknown += " " + row.country;
      continue;
    }
    if (row.total_export) {
      const double derived = matrix.row_sum(static_cast<std::size_t>(it - matrix.countries.begin()));
      const double scale = std::max(std::abs(derived), std::abs(*row.total_export));
      if (scale > 0.0 && std::abs(derived - *row.total_export) > 0.01 * scale)
        mismatched += " " + row.country;
    }
  }
  if (!unknown.empty())
    throw Error("indicator table names countries absent from the matrix:" + unknown);
  if (!mismatched.empty())
    throw Error("total_export disagrees with matrix row sums by more than 1% for:" + mismatched);
}

}  // namespace exdist
