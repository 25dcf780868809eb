#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "exdist/io.hpp"
#include "exdist/pipeline.hpp"
#include "exdist/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace exdist;

namespace {

std::ofstream open_out(const fs::path& p) {
  fs::create_directories(p.parent_path().empty() ? "." : p.parent_path());
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

std::ifstream open_in(const std::string& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot open " + p);
  return in;
}

TradeMatrix load_matrix(const std::string& path) {
  auto in = open_in(path);
  return io::read_matrix(in);
}

SynthCorpusSpec load_corpus_spec(const std::string& path) {
  auto in = open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("bad corpus spec JSON in " + path + ": " + e.what());
  }
  SynthCorpusSpec spec;
  spec.seed = j.value("seed", spec.seed);
  spec.year = j.value("year", spec.year);
  if (!j.contains("countries") || !j["countries"].is_array() || j["countries"].empty())
    throw Error("corpus spec: 'countries' must be a non-empty array");
  for (const auto& c : j["countries"]) {
    SynthCountrySpec cs;
    cs.code = c.value("code", cs.code);
    cs.n_products = c.value("n_products", cs.n_products);
    cs.k_capabilities = c.value("k_capabilities", cs.k_capabilities);
    cs.capability_log_mean = c.value("capability_log_mean", cs.capability_log_mean);
    cs.capability_log_sd = c.value("capability_log_sd", cs.capability_log_sd);
    if (c.contains("left_threshold")) cs.left_threshold = c["left_threshold"].get<double>();
    if (c.contains("right_cap")) {
      RightCap cap;
      const auto& rc = c["right_cap"];
      cap.cap_quantile = rc.value("cap_quantile", cap.cap_quantile);
      cap.pareto_alpha = rc.value("pareto_alpha", cap.pareto_alpha);
      cap.hard_ceiling = rc.value("hard_ceiling", cap.hard_ceiling);
      cs.right_cap = cap;
    }
    cs.intended_class = c.value("intended_class", cs.intended_class);
    if (c.contains("seed")) cs.seed = c["seed"].get<std::uint64_t>();
    spec.countries.push_back(std::move(cs));
  }
  return spec;
}

int run_ingest(const RunConfig& cfg, const std::string& trade_file) {
  auto in = open_in(trade_file);
  ParseResult parsed = parse_records(in, cfg.columns);
  AggregationResult agg = aggregate_to_4digit(parsed.records);

  std::vector<RejectedRow> rejects = parsed.rejects;
  rejects.insert(rejects.end(), agg.rejects.begin(), agg.rejects.end());
  std::sort(rejects.begin(), rejects.end(),
            [](const RejectedRow& a, const RejectedRow& b) { return a.line < b.line; });

  {
    auto out = open_out(fs::path(cfg.out_dir) / "matrix.csv");
    io::write_matrix(out, agg.matrix);
  }
  {
    auto out = open_out(fs::path(cfg.out_dir) / "rejects.csv");
    io::write_reject_report(out, rejects);
  }
  // typical per-country item counts run from about 100 to 1131; flag outliers
  std::size_t unusual = 0;
  for (std::size_t c = 0; c < agg.matrix.countries.size(); ++c) {
    std::size_t items = 0;
    for (std::size_t p = 0; p < agg.matrix.products.size(); ++p)
      if (agg.matrix.volumes.at(c, p) > 0.0) ++items;
    if (items < 100 || items > 1131) ++unusual;
  }
  if (unusual > 0)
    std::cerr << "warning: " << unusual
              << " countries have item counts outside the typical 100-1131 range\n";
  std::cout << "ingested " << agg.matrix.countries.size() << " countries x "
            << agg.matrix.products.size() << " products (year " << agg.matrix.year << "), "
            << rejects.size() << " rejected rows\n";
  return rejects.empty() ? 0 : 2;
}

int run_analyze(const RunConfig& cfg, const std::string& matrix_file,
                const std::string& indicator_file) {
  const TradeMatrix matrix = load_matrix(matrix_file);
  std::optional<IndicatorTable> indicators;
  if (!indicator_file.empty()) {
    auto in = open_in(indicator_file);
    indicators = parse_indicators(in, cfg.columns.delimiter);
  }
  const AnalyzeResult result = analyze(matrix, indicators ? &*indicators : nullptr, cfg);
  const auto written = write_analysis_outputs(result, cfg);
  std::cout << "analyzed " << matrix.countries.size() << " countries, wrote " << written.size()
            << " files to " << cfg.out_dir << " in " << io::format_number(result.wall_seconds)
            << " s\n";
  return 0;
}

int run_synth(const RunConfig& cfg, const std::string& spec_file) {
  const SynthCorpusSpec spec = load_corpus_spec(spec_file);
  const SynthCorpus corpus = gen_corpus(spec);
  {
    auto out = open_out(fs::path(cfg.out_dir) / "trade.csv");
    io::write_records(out, corpus.matrix);
  }
  {
    auto out = open_out(fs::path(cfg.out_dir) / "labels.csv");
    out << "country,intended_class,n_products,k_capabilities,capability_log_mean,"
           "capability_log_sd,left_threshold,cap_quantile,pareto_alpha,hard_ceiling,seed\n";
    for (const auto& cs : corpus.resolved) {
      out << cs.code << "," << cs.intended_class << "," << cs.n_products << ","
          << cs.k_capabilities << "," << io::format_number(cs.capability_log_mean) << ","
          << io::format_number(cs.capability_log_sd) << ","
          << (cs.left_threshold ? io::format_number(*cs.left_threshold) : "") << ","
          << (cs.right_cap ? io::format_number(cs.right_cap->cap_quantile) : "") << ","
          << (cs.right_cap ? io::format_number(cs.right_cap->pareto_alpha) : "") << ","
          << (cs.right_cap ? (cs.right_cap->hard_ceiling ? "1" : "0") : "") << "," << *cs.seed
          << "\n";
    }
  }
  std::cout << "generated " << corpus.matrix.countries.size() << " countries x "
            << corpus.matrix.products.size() << " products\n";
  return 0;
}

int run_fitness(const RunConfig& cfg, const std::string& matrix_file, bool dump_rca, bool dump_m) {
  const TradeMatrix matrix = load_matrix(matrix_file);
  const DenseMatrix rca = rca_matrix(matrix);
  const BinaryExportMatrix binary = binarize(rca, matrix.countries, matrix.products, cfg.rca_threshold);
  const FitnessResult fr = solve(binary, cfg.fitness);
  const auto ranks = fitness_rank(fr);

  {
    auto out = open_out(fs::path(cfg.out_dir) / "fitness.csv");
    out << "country,fitness,rank\n";
    for (std::size_t c = 0; c < matrix.countries.size(); ++c)
      out << matrix.countries[c] << "," << io::format_number(fr.fitness[c]) << "," << ranks[c]
          << "\n";
  }
  {
    auto out = open_out(fs::path(cfg.out_dir) / "complexity.csv");
    out << "product,complexity\n";
    for (std::size_t p = 0; p < matrix.products.size(); ++p)
      out << matrix.products[p] << "," << io::format_number(fr.complexity[p]) << "\n";
  }
  {
    auto out = open_out(fs::path(cfg.out_dir) / "convergence.csv");
    out << "converged,mode,iterations,max_rel_dfitness,max_rel_dcomplexity,dropped_countries,"
           "dropped_products\n";
    out << (fr.converged ? 1 : 0) << "," << to_string(fr.mode) << "," << fr.iterations_run << ","
        << io::format_number(fr.final_max_rel_dfitness) << ","
        << io::format_number(fr.final_max_rel_dcomplexity) << "," << fr.dropped_countries.size()
        << "," << fr.dropped_products.size() << "\n";
  }
  if (dump_rca) {
    auto out = open_out(fs::path(cfg.out_dir) / "rca.csv");
    io::write_named_matrix(out, matrix.countries, matrix.products, rca);
  }
  if (dump_m) {
    auto out = open_out(fs::path(cfg.out_dir) / "m.csv");
    io::write_binary_matrix(out, binary);
  }
  std::cout << "fitness " << (fr.converged ? "converged" : "did not converge") << " ("
            << to_string(fr.mode) << ") after " << fr.iterations_run << " iterations\n";
  return 0;
}

int run_gof(const RunConfig& cfg, const std::string& matrix_file) {
  const TradeMatrix matrix = load_matrix(matrix_file);
  auto out = open_out(fs::path(cfg.out_dir) / "gof.csv");
  out << "country,n,ks_stat,ks_pvalue,reject_ks,ks_naive_threshold,cvm_stat,cvm_pvalue,"
         "reject_cvm,cvm_naive_threshold,alpha_ks,alpha_cvm,bootstrap_replicates,seed\n";
  for (std::size_t c = 0; c < matrix.countries.size(); ++c) {
    const auto sample = country_volume_sample(matrix, matrix.countries[c]);
    out << matrix.countries[c] << "," << sample.size();
    if (sample.size() >= 2) {
      const LogNormalFit fit = fit_lognormal(sample);
      GofConfig gof_cfg = cfg.gof;
      gof_cfg.seed = stats::mix_seed(cfg.seed, 2 * c);
      const GofResult g = evaluate_gof(sample, fit, gof_cfg);
      out << "," << io::format_number(g.ks_stat) << "," << io::format_number(g.ks_pvalue) << ","
          << (g.reject_ks ? 1 : 0) << "," << io::format_number(g.ks_naive_threshold) << ","
          << io::format_number(g.cvm_stat) << "," << io::format_number(g.cvm_pvalue) << ","
          << (g.reject_cvm ? 1 : 0) << "," << io::format_number(g.cvm_naive_threshold) << ","
          << io::format_number(g.alpha_ks) << "," << io::format_number(g.alpha_cvm) << ","
          << g.bootstrap_replicates << "," << g.seed << "\n";
    } else {
      out << ",,,,,,,,,,,,\n";
    }
  }
  std::cout << "wrote gof.csv for " << matrix.countries.size() << " countries\n";
  return 0;
}

int run_rank(const RunConfig& cfg, const std::string& matrix_file) {
  const TradeMatrix matrix = load_matrix(matrix_file);
  std::vector<RankingCurve> curves;
  for (const auto& country : matrix.countries) {
    const auto sample = country_volume_sample(matrix, country);
    if (!sample.empty()) curves.push_back(ranking_curve(sample, country));
  }
  for (const auto& curve : curves) {
    auto out = open_out(fs::path(cfg.out_dir) / "curves" / (curve.country + ".csv"));
    out << "rank,volume\n";
    for (std::size_t i = 0; i < curve.size(); ++i)
      out << (i + 1) << "," << io::format_number(curve.volumes[i]) << "\n";
  }
  const DominanceSummary dom = dominance_matrix(curves);
  {
    auto out = open_out(fs::path(cfg.out_dir) / "dominance.csv");
    out << "country_a,country_b,frac_a_above,crossings\n";
    for (const auto& pair : dom.pairs)
      out << dom.countries[pair.a] << "," << dom.countries[pair.b] << ","
          << io::format_number(pair.frac_a_above) << "," << pair.crossings << "\n";
    out << "# zero_crossing_share=" << io::format_number(dom.zero_crossing_share) << "\n";
  }
  std::cout << "wrote curves for " << curves.size() << " countries, zero-crossing share "
            << io::format_number(dom.zero_crossing_share) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"export-volume distribution toolkit: ingestion, comparative advantage, "
               "fitness-complexity ranking, log-normal fits and tests, synthetic corpora"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir, trade_file, matrix_file, indicator_file, spec_file;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  app.add_option("--config", config_path, "JSON run configuration file")->group("Global");
  app.add_option("--out-dir", out_dir, "output directory (overrides config)")->group("Global");
  app.add_option("--seed", seed, "master seed (overrides config)")->group("Global");
  app.add_option("--jobs", jobs, "worker count, 0 = all processors")->group("Global");

  auto* ingest = app.add_subcommand("ingest", "parse and aggregate raw export records");
  ingest->add_option("--trade", trade_file, "delimiter-separated record file");

  auto* analyze_cmd = app.add_subcommand("analyze", "full pipeline on an ingested matrix");
  analyze_cmd->add_option("--matrix", matrix_file, "canonical matrix file from ingest");
  analyze_cmd->add_option("--indicators", indicator_file, "per-country indicator table");
  bool dump_histograms = false;
  analyze_cmd->add_flag("--dump-histograms", dump_histograms, "write per-country histograms");

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--spec", spec_file, "corpus spec JSON")->required();

  auto* fitness_cmd = app.add_subcommand("fitness", "competitiveness solve only");
  fitness_cmd->add_option("--matrix", matrix_file, "canonical matrix file");
  bool dump_rca = false, dump_m = false;
  fitness_cmd->add_flag("--dump-rca", dump_rca, "also write the comparative-advantage matrix");
  fitness_cmd->add_flag("--dump-m", dump_m, "also write the binary export matrix");

  auto* gof_cmd = app.add_subcommand("gof", "log-normality tests only");
  gof_cmd->add_option("--matrix", matrix_file, "canonical matrix file");

  auto* rank_cmd = app.add_subcommand("rank", "ranking curves and dominance only");
  rank_cmd->add_option("--matrix", matrix_file, "canonical matrix file");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_run_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed) cfg.seed = *seed;
    if (jobs) cfg.jobs = *jobs;
    if (!trade_file.empty()) cfg.trade_file = trade_file;
    if (!indicator_file.empty()) cfg.indicator_file = indicator_file;

    if (ingest->parsed()) {
      if (cfg.trade_file.empty()) throw Error("ingest: no trade file (use --trade or the config)");
      return run_ingest(cfg, cfg.trade_file);
    }
    if (analyze_cmd->parsed()) {
      if (matrix_file.empty()) throw Error("analyze: --matrix is required");
      if (dump_histograms) cfg.dump_histograms = true;
      return run_analyze(cfg, matrix_file, cfg.indicator_file);
    }
    if (synth->parsed()) return run_synth(cfg, spec_file);
    if (fitness_cmd->parsed()) {
      if (matrix_file.empty()) throw Error("fitness: --matrix is required");
      return run_fitness(cfg, matrix_file, dump_rca, dump_m);
    }
    if (gof_cmd->parsed()) {
      if (matrix_file.empty()) throw Error("gof: --matrix is required");
      return run_gof(cfg, matrix_file);
    }
    if (rank_cmd->parsed()) {
      if (matrix_file.empty()) throw Error("rank: --matrix is required");
      return run_rank(cfg, matrix_file);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
