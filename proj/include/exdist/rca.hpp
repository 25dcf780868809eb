#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "exdist/common.hpp"
#include "exdist/ingest.hpp"

namespace exdist {

/// Binary export matrix: m(c,p) = 1 iff country c has a revealed
/// comparative advantage of at least `threshold` in product p.
struct BinaryExportMatrix {
  std::vector<std::string> countries;
  std::vector<std::string> products;
  std::vector<std::uint8_t> m;  // row-major, countries x products
  double threshold = 1.0;

  std::size_t rows() const { return countries.size(); }
  std::size_t cols() const { return products.size(); }
  std::uint8_t at(std::size_t c, std::size_t p) const { return m[c * cols() + p]; }
};

/// Balassa index: (E_cp / country total) / (product world total / world
/// total). Countries or products with a zero total get RCA 0.
DenseMatrix rca_matrix(const TradeMatrix& t);

BinaryExportMatrix binarize(const DenseMatrix& rca, const std::vector<std::string>& countries,
                            const std::vector<std::string>& products, double threshold = 1.0);

BinaryExportMatrix binarize(const TradeMatrix& t, double threshold = 1.0);

}  // namespace exdist
