#include "exdist/rca.hpp"

#include <cmath>

namespace exdist {

DenseMatrix rca_matrix(const TradeMatrix& t) {
  const std::size_t C = t.countries.size();
  const std::size_t P = t.products.size();
  if (C == 0 || P == 0) throw Error("rca_matrix: empty trade matrix");

  std::vector<double> row_tot(C, 0.0), col_tot(P, 0.0);
  double total = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t p = 0; p < P; ++p) {
      const double v = t.volumes.at(c, p);
      row_tot[c] += v;
      col_tot[p] += v;
      total += v;
    }
  }
  if (total <= 0.0) throw Error("rca_matrix: world total is zero");

  DenseMatrix rca(C, P);
  for (std::size_t c = 0; c < C; ++c) {
    if (row_tot[c] == 0.0) continue;
    for (std::size_t p = 0; p < P; ++p) {
      if (col_tot[p] == 0.0) continue;
      rca.at(c, p) = (t.volumes.at(c, p) / row_tot[c]) / (col_tot[p] / total);
    }
  }
  return rca;
}

BinaryExportMatrix binarize(const DenseMatrix& rca, const std::vector<std::string>& countries,
                            const std::vector<std::string>& products, double threshold) {
  if (threshold <= 0.0) throw Error("binarize: threshold must be positive");
  if (rca.rows != countries.size() || rca.cols != products.size())
    throw Error("binarize: code lists do not match the matrix shape");
  BinaryExportMatrix out;
  out.countries = countries;
  out.products = products;
  out.threshold = threshold;
  out.m.resize(rca.rows * rca.cols);
  for (std::size_t i = 0; i < rca.data.size(); ++i)
    out.m[i] = rca.data[i] >= threshold ? 1 : 0;
  return out;
}

BinaryExportMatrix binarize(const TradeMatrix& t, double threshold) {
  return binarize(rca_matrix(t), t.countries, t.products, threshold);
}

}  // namespace exdist
