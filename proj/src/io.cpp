#include "exdist/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace exdist::io {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delim)) out.push_back(field);
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

}  // namespace

void write_named_matrix(std::ostream& out, const std::vector<std::string>& countries,
                        const std::vector<std::string>& products, const DenseMatrix& values,
                        char delimiter) {
  out << "country";
  for (const auto& p : products) out << delimiter << p;
  out << "\n";
  for (std::size_t c = 0; c < countries.size(); ++c) {
    out << countries[c];
    for (std::size_t p = 0; p < products.size(); ++p)
      out << delimiter << format_number(values.at(c, p));
    out << "\n";
  }
}

void write_matrix(std::ostream& out, const TradeMatrix& m, char delimiter) {
  out << "# exdist-matrix v1\n";
  out << "# year=" << m.year << "\n";
  write_named_matrix(out, m.countries, m.products, m.volumes, delimiter);
}

TradeMatrix read_matrix(std::istream& in, char delimiter) {
  TradeMatrix m;
  std::string line;
  bool header_seen = false;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_codes;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("year=");
      if (pos != std::string::npos) m.year = std::atoi(line.c_str() + pos + 5);
      continue;
    }
    auto fields = split(line, delimiter);
    if (!header_seen) {
      if (fields.empty() || fields[0] != "country")
        throw Error("read_matrix: header must start with 'country'");
      m.products.assign(fields.begin() + 1, fields.end());
      header_seen = true;
      continue;
    }
    if (fields.size() != m.products.size() + 1)
      throw Error("read_matrix: row for " + (fields.empty() ? std::string("?") : fields[0]) +
                  " has the wrong number of cells");
    row_codes.push_back(fields[0]);
    std::vector<double> vals(m.products.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const auto& s = fields[i + 1];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), vals[i]);
      if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(vals[i]) ||
          vals[i] < 0.0)
        throw Error("read_matrix: bad volume '" + s + "' in row " + fields[0]);
    }
    rows.push_back(std::move(vals));
  }
  if (!header_seen) throw Error("read_matrix: missing header row");
  if (rows.empty()) throw Error("read_matrix: no country rows");

  // Canonical order regardless of how the file was arranged.
  std::vector<std::size_t> c_order(row_codes.size()), p_order(m.products.size());
  std::iota(c_order.begin(), c_order.end(), 0);
  std::iota(p_order.begin(), p_order.end(), 0);
  std::sort(c_order.begin(), c_order.end(),
            [&](std::size_t a, std::size_t b) { return row_codes[a] < row_codes[b]; });
  std::sort(p_order.begin(), p_order.end(),
            [&](std::size_t a, std::size_t b) { return m.products[a] < m.products[b]; });
  for (std::size_t i = 0; i + 1 < c_order.size(); ++i)
    if (row_codes[c_order[i]] == row_codes[c_order[i + 1]])
      throw Error("read_matrix: duplicate country " + row_codes[c_order[i]]);
  for (std::size_t i = 0; i + 1 < p_order.size(); ++i)
    if (m.products[p_order[i]] == m.products[p_order[i + 1]])
      throw Error("read_matrix: duplicate product " + m.products[p_order[i]]);

  std::vector<std::string> sorted_products(m.products.size());
  for (std::size_t i = 0; i < p_order.size(); ++i) sorted_products[i] = m.products[p_order[i]];
  m.volumes = DenseMatrix(row_codes.size(), m.products.size());
  for (std::size_t c = 0; c < c_order.size(); ++c) {
    m.countries.push_back(row_codes[c_order[c]]);
    for (std::size_t p = 0; p < p_order.size(); ++p)
      m.volumes.at(c, p) = rows[c_order[c]][p_order[p]];
  }
  m.products = std::move(sorted_products);
  m.product_category.assign(m.products.size(), "");
  return m;
}

void write_binary_matrix(std::ostream& out, const BinaryExportMatrix& m, char delimiter) {
  out << "country";
  for (const auto& p : m.products) out << delimiter << p;
  out << "\n";
  for (std::size_t c = 0; c < m.rows(); ++c) {
    out << m.countries[c];
    for (std::size_t p = 0; p < m.cols(); ++p) out << delimiter << int(m.at(c, p));
    out << "\n";
  }
}

void write_records(std::ostream& out, const TradeMatrix& m, char delimiter) {
  out << "year" << delimiter << "country" << delimiter << "product" << delimiter << "volume\n";
  for (std::size_t c = 0; c < m.countries.size(); ++c)
    for (std::size_t p = 0; p < m.products.size(); ++p) {
      const double v = m.volumes.at(c, p);
      if (v > 0.0)
        out << m.year << delimiter << m.countries[c] << delimiter << m.products[p] << delimiter
            << format_number(v) << "\n";
    }
}

void write_reject_report(std::ostream& out, const std::vector<RejectedRow>& rejects) {
  for (const auto& r : rejects) out << r.line << "," << r.reason << "\n";
}

}  // namespace exdist::io
