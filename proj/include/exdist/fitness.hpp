#pragma once

#include <string>
#include <utility>
#include <vector>

#include "exdist/rca.hpp"

namespace exdist {

enum class ConvergenceMode { value, rank, none };

const char* to_string(ConvergenceMode m);

struct FitnessConfig {
  int max_iterations = 1000;
  double value_tolerance = 1e-9;  // max relative change of both vectors
  int rank_patience = 20;         // consecutive iterations with stable rankings
  double zero_floor = 1e-300;     // fitness at or below this is pinned to exact 0
  bool keep_trace = false;

  void validate() const;
};

struct FitnessIterationStats {
  double max_rel_dfitness = 0.0;
  double max_rel_dcomplexity = 0.0;
  int country_rank_changes = 0;
  int product_rank_changes = 0;
  double mean_fitness_dev = 0.0;     // |mean - 1| over iterated entries
  double mean_complexity_dev = 0.0;  // |mean - 1| over iterated entries
};

struct FitnessResult {
  std::vector<std::string> countries;
  std::vector<std::string> products;
  std::vector<double> fitness;     // aligned with countries; dropped rows get exact 0
  std::vector<double> complexity;  // aligned with products; dropped columns get exact 0
  int iterations_run = 0;
  bool converged = false;
  ConvergenceMode mode = ConvergenceMode::none;
  double final_max_rel_dfitness = 0.0;
  double final_max_rel_dcomplexity = 0.0;
  std::vector<std::size_t> dropped_countries;  // indices into countries
  std::vector<std::size_t> dropped_products;   // indices into products
  std::vector<FitnessIterationStats> trace;    // filled when cfg.keep_trace
};

/// One coupled update step. Each country's score is the summed complexity of
/// its export basket; each product's score is the harmonic-style penalty
/// dominated by its least fit exporter; both vectors are then divided by
/// their means. Zero-column products map to 0, zero-row countries map to 0.
/// Entries of `fitness` must be positive for every country with a nonzero
/// row (apply a zero floor upstream).
std::pair<std::vector<double>, std::vector<double>> iterate_once(
    const BinaryExportMatrix& m, const std::vector<double>& fitness,
    const std::vector<double>& complexity);

/// Runs the iteration from the uniform starting point until value
/// convergence, rank convergence, or the iteration cap. Empty rows and
/// columns are dropped before iterating and reported with exact-zero scores.
FitnessResult solve(const BinaryExportMatrix& m, const FitnessConfig& cfg = {});

/// Dense 1-based ranking by descending fitness, ties broken by country code.
std::vector<int> fitness_rank(const FitnessResult& result);

}  // namespace exdist
