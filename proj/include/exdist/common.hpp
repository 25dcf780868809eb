#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace exdist {

/// Error type thrown by all modules on contract violations and bad input.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  bool empty() const { return rows == 0 || cols == 0; }
};

}  // namespace exdist
