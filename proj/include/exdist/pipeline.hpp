#pragma once

#include <optional>
#include <string>
#include <vector>

#include "exdist/dist_fit.hpp"
#include "exdist/fitness.hpp"
#include "exdist/gof.hpp"
#include "exdist/ingest.hpp"
#include "exdist/ranking.hpp"
#include "exdist/rca.hpp"

namespace exdist {

inline constexpr const char* kVersion = "0.1.0";

/// Everything a full analysis run needs; loadable from a JSON config file
/// with CLI flags layered on top.
struct RunConfig {
  std::string trade_file;
  std::string indicator_file;
  std::string out_dir = "out";
  ColumnConfig columns;
  double rca_threshold = 1.0;
  FitnessConfig fitness;
  BinningRule binning;
  GofConfig gof;
  ClassifierConfig classifier;
  std::uint64_t seed = 1;
  int jobs = 0;  // 0 = hardware concurrency
  bool dump_histograms = false;
  bool dump_curves = true;
};

RunConfig load_run_config(const std::string& path);
std::string run_config_json(const RunConfig& cfg);

struct CountryAnalysis {
  std::string country;
  std::size_t n = 0;
  bool analyzed = false;
  std::string skip_reason;  // set when not analyzed or only partially analyzed
  LogNormalFit full_fit;
  std::optional<LogNormalFit> left_fit;
  GofResult gof;
  ShapeResult shape;
};

struct AnalyzeResult {
  TradeMatrix matrix;
  DenseMatrix rca;
  BinaryExportMatrix binary;
  FitnessResult fitness;
  std::vector<int> fitness_ranks;
  std::vector<CountryAnalysis> per_country;  // aligned with matrix.countries
  std::vector<RankingCurve> curves;          // countries with at least one volume
  DominanceSummary dominance;
  std::vector<IndicatorColoring> colorings;
  std::vector<std::string> skipped_indicators;  // partial coverage in the table
  GofProfile profile;
  bool has_profile = false;
  double wall_seconds = 0.0;
};

/// Runs the full chain on an ingested matrix: comparative-advantage
/// binarization, the fitness solve, per-country fits and tests (fanned out
/// over a worker pool, merged in country order), curve analytics, indicator
/// colorings and the rank profile. Deterministic given (input, config).
AnalyzeResult analyze(const TradeMatrix& matrix, const IndicatorTable* indicators,
                      const RunConfig& cfg);

/// Writes the output bundle (summary, dumps, manifest) into cfg.out_dir.
/// Everything is computed before anything is written; on failure the
/// partially written files are removed. Returns the written paths.
std::vector<std::string> write_analysis_outputs(const AnalyzeResult& result, const RunConfig& cfg);

}  // namespace exdist
