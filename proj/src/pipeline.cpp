#include "exdist/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "exdist/io.hpp"
#include "exdist/stats.hpp"

namespace exdist {

namespace fs = std::filesystem;
using nlohmann::json;

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("bad config JSON in " + path + ": " + e.what());
  }
  RunConfig cfg;
  cfg.trade_file = j.value("trade_file", cfg.trade_file);
  cfg.indicator_file = j.value("indicator_file", cfg.indicator_file);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  if (j.contains("columns")) {
    const auto& c = j["columns"];
    std::string delim = c.value("delimiter", std::string(1, cfg.columns.delimiter));
    if (delim.size() != 1) throw Error("config: delimiter must be a single character");
    cfg.columns.delimiter = delim[0];
    cfg.columns.year_col = c.value("year", cfg.columns.year_col);
    cfg.columns.country_col = c.value("country", cfg.columns.country_col);
    cfg.columns.product_col = c.value("product", cfg.columns.product_col);
    cfg.columns.volume_col = c.value("volume", cfg.columns.volume_col);
    cfg.columns.category_col = c.value("category", cfg.columns.category_col);
  }
  cfg.rca_threshold = j.value("rca_threshold", cfg.rca_threshold);
  if (j.contains("fitness")) {
    const auto& f = j["fitness"];
    cfg.fitness.max_iterations = f.value("max_iterations", cfg.fitness.max_iterations);
    cfg.fitness.value_tolerance = f.value("value_tolerance", cfg.fitness.value_tolerance);
    cfg.fitness.rank_patience = f.value("rank_patience", cfg.fitness.rank_patience);
    cfg.fitness.zero_floor = f.value("zero_floor", cfg.fitness.zero_floor);
    cfg.fitness.keep_trace = f.value("keep_trace", cfg.fitness.keep_trace);
  }
  if (j.contains("histogram"))
    cfg.binning.width_decades = j["histogram"].value("bin_width_decades", cfg.binning.width_decades);
  if (j.contains("gof")) {
    const auto& g = j["gof"];
    cfg.gof.alpha_ks = g.value("alpha_ks", cfg.gof.alpha_ks);
    cfg.gof.alpha_cvm = g.value("alpha_cvm", cfg.gof.alpha_cvm);
    cfg.gof.bootstrap_replicates = g.value("bootstrap_replicates", cfg.gof.bootstrap_replicates);
  }
  if (j.contains("classifier")) {
    const auto& c = j["classifier"];
    cfg.classifier.mode_log10_low = c.value("mode_log10_low", cfg.classifier.mode_log10_low);
    cfg.classifier.mode_log10_high = c.value("mode_log10_high", cfg.classifier.mode_log10_high);
    cfg.classifier.left_mass_threshold =
        c.value("left_mass_threshold", cfg.classifier.left_mass_threshold);
    cfg.classifier.right_excess_threshold =
        c.value("right_excess_threshold", cfg.classifier.right_excess_threshold);
    cfg.classifier.alpha_cvm_left = c.value("alpha_cvm_left", cfg.classifier.alpha_cvm_left);
    cfg.classifier.left_bootstrap_replicates =
        c.value("left_bootstrap_replicates", cfg.classifier.left_bootstrap_replicates);
  }
  cfg.seed = j.value("seed", cfg.seed);
  cfg.jobs = j.value("jobs", cfg.jobs);
  cfg.dump_histograms = j.value("dump_histograms", cfg.dump_histograms);
  cfg.dump_curves = j.value("dump_curves", cfg.dump_curves);
  return cfg;
}

std::string run_config_json(const RunConfig& cfg) {
  json j;
  j["trade_file"] = cfg.trade_file;
  j["indicator_file"] = cfg.indicator_file;
  j["out_dir"] = cfg.out_dir;
  j["columns"] = {{"delimiter", std::string(1, cfg.columns.delimiter)},
                  {"year", cfg.columns.year_col},
                  {"country", cfg.columns.country_col},
                  {"product", cfg.columns.product_col},
                  {"volume", cfg.columns.volume_col},
                  {"category", cfg.columns.category_col}};
  j["rca_threshold"] = cfg.rca_threshold;
  j["fitness"] = {{"max_iterations", cfg.fitness.max_iterations},
                  {"value_tolerance", cfg.fitness.value_tolerance},
                  {"rank_patience", cfg.fitness.rank_patience},
                  {"zero_floor", cfg.fitness.zero_floor},
                  {"keep_trace", cfg.fitness.keep_trace}};
  j["histogram"] = {{"bin_width_decades", cfg.binning.width_decades}};
  j["gof"] = {{"alpha_ks", cfg.gof.alpha_ks},
              {"alpha_cvm", cfg.gof.alpha_cvm},
              {"bootstrap_replicates", cfg.gof.bootstrap_replicates}};
  j["classifier"] = {{"mode_log10_low", cfg.classifier.mode_log10_low},
                     {"mode_log10_high", cfg.classifier.mode_log10_high},
                     {"left_mass_threshold", cfg.classifier.left_mass_threshold},
                     {"right_excess_threshold", cfg.classifier.right_excess_threshold},
                     {"alpha_cvm_left", cfg.classifier.alpha_cvm_left},
                     {"left_bootstrap_replicates", cfg.classifier.left_bootstrap_replicates}};
  j["seed"] = cfg.seed;
  j["jobs"] = cfg.jobs;
  j["dump_histograms"] = cfg.dump_histograms;
  j["dump_curves"] = cfg.dump_curves;
  return j.dump(2);
}

namespace {

CountryAnalysis analyze_country(const std::string& country, const std::vector<double>& sample,
                                const RunConfig& cfg, std::uint64_t gof_seed,
                                std::uint64_t classifier_seed) {
  CountryAnalysis ca;
  ca.country = country;
  ca.n = sample.size();
  if (sample.size() < 2) {
    ca.skip_reason = "fewer than 2 positive volumes";
    return ca;
  }
  ca.full_fit = fit_lognormal(sample);
  GofConfig gof_cfg = cfg.gof;
  gof_cfg.seed = gof_seed;
  ca.gof = evaluate_gof(sample, ca.full_fit, gof_cfg);
  try {
    ca.left_fit = refit_left_of_mode(sample, ca.full_fit, cfg.binning);
  } catch (const Error& e) {
    ca.skip_reason = std::string("left refit unavailable: ") + e.what();
  }
  if (ca.left_fit) {
    ClassifierConfig cls_cfg = cfg.classifier;
    cls_cfg.seed = classifier_seed;
    ca.shape = classify_shape(sample, ca.full_fit, *ca.left_fit, ca.gof, cls_cfg);
  } else {
    // Without a usable left wing only the truncation/acceptance checks apply.
    ca.shape.mode_log10 = ca.full_fit.mode_log10;
    double min_x = sample[0];
    for (double x : sample) min_x = std::min(min_x, x);
    ca.shape.left_truncation_score =
        stats::normal_cdf((std::log(min_x) - ca.full_fit.mu) / ca.full_fit.sigma);
    if (ca.shape.mode_log10 < cfg.classifier.mode_log10_low &&
        ca.shape.left_truncation_score > cfg.classifier.left_mass_threshold)
      ca.shape.shape = ShapeClass::TruncatedLogNormal;
    else if (!ca.gof.reject_cvm)
      ca.shape.shape = ShapeClass::FullLogNormal;
    else
      ca.shape.shape = ShapeClass::Indeterminate;
  }
  ca.analyzed = true;
  return ca;
}

}  // namespace

AnalyzeResult analyze(const TradeMatrix& matrix, const IndicatorTable* indicators,
                      const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (indicators) validate_indicators(*indicators, matrix);

  AnalyzeResult result;
  result.matrix = matrix;
  result.rca = rca_matrix(matrix);
  result.binary = binarize(result.rca, matrix.countries, matrix.products, cfg.rca_threshold);
  result.fitness = solve(result.binary, cfg.fitness);
  result.fitness_ranks = fitness_rank(result.fitness);

  const std::size_t C = matrix.countries.size();
  std::vector<std::vector<double>> samples(C);
  for (std::size_t c = 0; c < C; ++c) samples[c] = country_volume_sample(matrix, matrix.countries[c]);

  // Fan countries out over a worker pool; slots keep the merge ordered.
  result.per_country.resize(C);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= C || failed.load()) return;
      try {
        result.per_country[c] =
            analyze_country(matrix.countries[c], samples[c], cfg,
                            stats::mix_seed(cfg.seed, 2 * c),
                            stats::mix_seed(cfg.seed, 2 * c + 1));
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failed.store(true);
        if (failure.empty())
          failure = "analysis failed for " + matrix.countries[c] + ": " + e.what();
      }
    }
  };
  unsigned jobs = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs)
                               : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(C) == 0 ? 1 : static_cast<unsigned>(C));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failed.load()) throw Error(failure);

  for (std::size_t c = 0; c < C; ++c)
    if (!samples[c].empty())
      result.curves.push_back(ranking_curve(samples[c], matrix.countries[c]));
  result.dominance = dominance_matrix(result.curves);

  // Indicators: fitness always, total export from row sums, file columns
  // only when they cover every country.
  {
    std::vector<std::optional<double>> fitness_vals(C), export_vals(C), gdp_vals(C), gdppc_vals(C);
    bool any_gdp = false, any_gdppc = false, full_gdp = true, full_gdppc = true;
    for (std::size_t c = 0; c < C; ++c) {
      fitness_vals[c] = result.fitness.fitness[c];
      export_vals[c] = matrix.row_sum(c);
      if (indicators) {
        const IndicatorRow* row = indicators->find(matrix.countries[c]);
        if (row && row->gdp) { gdp_vals[c] = *row->gdp; any_gdp = true; } else full_gdp = false;
        if (row && row->gdp_pc) { gdppc_vals[c] = *row->gdp_pc; any_gdppc = true; } else full_gdppc = false;
      }
    }
    result.colorings.push_back(indicator_ranks(matrix.countries, fitness_vals, "fitness"));
    result.colorings.push_back(indicator_ranks(matrix.countries, export_vals, "total_export"));
    if (any_gdp && full_gdp)
      result.colorings.push_back(indicator_ranks(matrix.countries, gdp_vals, "gdp"));
    else if (any_gdp)
      result.skipped_indicators.push_back("gdp");
    if (any_gdppc && full_gdppc)
      result.colorings.push_back(indicator_ranks(matrix.countries, gdppc_vals, "gdp_pc"));
    else if (any_gdppc)
      result.skipped_indicators.push_back("gdp_pc");
  }

  // Profile over countries with test results.
  {
    std::vector<std::string> names;
    std::vector<int> ranks;
    std::vector<GofResult> gofs;
    for (std::size_t c = 0; c < C; ++c) {
      if (!result.per_country[c].analyzed) continue;
      names.push_back(matrix.countries[c]);
      ranks.push_back(result.fitness_ranks[c]);
      gofs.push_back(result.per_country[c].gof);
    }
    if (names.size() >= 3) {
      result.profile = gof_profile(names, ranks, gofs);
      result.has_profile = true;
    }
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

namespace {

void write_summary(std::ostream& out, const AnalyzeResult& r, const RunConfig& cfg) {
  out << "country,n,mu,sigma,mode_log10,mode_in_band,left_mu,left_sigma,left_n,"
         "ks_stat,ks_pvalue,reject_ks,ks_naive_threshold,"
         "cvm_stat,cvm_pvalue,reject_cvm,cvm_naive_threshold,"
         "alpha_ks,alpha_cvm,bootstrap_replicates,seed,"
         "class,left_truncation_score,right_excess_score,left_cvm_stat,left_cvm_pvalue,"
         "fitness,fitness_rank,skip_reason\n";
  const auto num = [](double v) { return io::format_number(v); };
  for (std::size_t c = 0; c < r.per_country.size(); ++c) {
    const auto& ca = r.per_country[c];
    out << ca.country << "," << ca.n << ",";
    if (ca.analyzed) {
      const bool in_band = ca.full_fit.mode_log10 >= cfg.classifier.mode_log10_low &&
                           ca.full_fit.mode_log10 <= cfg.classifier.mode_log10_high;
      out << num(ca.full_fit.mu) << "," << num(ca.full_fit.sigma) << ","
          << num(ca.full_fit.mode_log10) << "," << (in_band ? 1 : 0) << ",";
      if (ca.left_fit)
        out << num(ca.left_fit->mu) << "," << num(ca.left_fit->sigma) << "," << ca.left_fit->n << ",";
      else
        out << ",,,";
      out << num(ca.gof.ks_stat) << "," << num(ca.gof.ks_pvalue) << "," << (ca.gof.reject_ks ? 1 : 0)
          << "," << num(ca.gof.ks_naive_threshold) << "," << num(ca.gof.cvm_stat) << ","
          << num(ca.gof.cvm_pvalue) << "," << (ca.gof.reject_cvm ? 1 : 0) << ","
          << num(ca.gof.cvm_naive_threshold) << "," << num(ca.gof.alpha_ks) << ","
          << num(ca.gof.alpha_cvm) << "," << ca.gof.bootstrap_replicates << "," << ca.gof.seed
          << "," << to_string(ca.shape.shape) << "," << num(ca.shape.left_truncation_score) << ","
          << num(ca.shape.right_excess_score) << "," << num(ca.shape.left_cvm_stat) << ","
          << num(ca.shape.left_cvm_pvalue) << ",";
    } else {
      out << ",,,,,,,,,,,,,,,,,,,,,,,,";
    }
    out << num(r.fitness.fitness[c]) << "," << r.fitness_ranks[c] << "," << ca.skip_reason << "\n";
  }
}

void write_convergence(std::ostream& out, const FitnessResult& f) {
  out << "converged,mode,iterations,max_rel_dfitness,max_rel_dcomplexity,dropped_countries,"
         "dropped_products\n";
  out << (f.converged ? 1 : 0) << "," << to_string(f.mode) << "," << f.iterations_run << ","
      << io::format_number(f.final_max_rel_dfitness) << ","
      << io::format_number(f.final_max_rel_dcomplexity) << "," << f.dropped_countries.size()
      << "," << f.dropped_products.size() << "\n";
}

}  // namespace

std::vector<std::string> write_analysis_outputs(const AnalyzeResult& r, const RunConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  std::vector<std::string> written;
  auto open = [&](const fs::path& rel) {
    const fs::path p = dir / rel;
    fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw Error("cannot write " + p.string());
    written.push_back(p.string());
    return out;
  };
  try {
    {
      auto out = open("summary.csv");
      write_summary(out, r, cfg);
    }
    {
      auto out = open("rca.csv");
      io::write_named_matrix(out, r.matrix.countries, r.matrix.products, r.rca);
    }
    {
      auto out = open("m.csv");
      io::write_binary_matrix(out, r.binary);
    }
    {
      auto out = open("fitness.csv");
      out << "country,fitness,rank\n";
      for (std::size_t c = 0; c < r.matrix.countries.size(); ++c)
        out << r.matrix.countries[c] << "," << io::format_number(r.fitness.fitness[c]) << ","
            << r.fitness_ranks[c] << "\n";
    }
    {
      auto out = open("complexity.csv");
      out << "product,complexity\n";
      for (std::size_t p = 0; p < r.matrix.products.size(); ++p)
        out << r.matrix.products[p] << "," << io::format_number(r.fitness.complexity[p]) << "\n";
    }
    {
      auto out = open("convergence.csv");
      write_convergence(out, r.fitness);
    }
    {
      auto out = open("coloring.csv");
      out << "country,indicator,rank,color_index\n";
      for (const auto& coloring : r.colorings)
        for (std::size_t c = 0; c < coloring.countries.size(); ++c)
          out << coloring.countries[c] << "," << coloring.indicator << "," << coloring.ranks[c]
              << "," << io::format_number(coloring.color_index[c]) << "\n";
    }
    {
      auto out = open("dominance.csv");
      out << "country_a,country_b,frac_a_above,crossings\n";
      for (const auto& pair : r.dominance.pairs)
        out << r.dominance.countries[pair.a] << "," << r.dominance.countries[pair.b] << ","
            << io::format_number(pair.frac_a_above) << "," << pair.crossings << "\n";
      out << "# zero_crossing_share=" << io::format_number(r.dominance.zero_crossing_share)
          << "\n";
    }
    if (r.has_profile) {
      auto out = open("profile.csv");
      out << "fitness_rank,country,cvm_stat,ks_pvalue\n";
      for (const auto& row : r.profile.rows)
        out << row.fitness_rank << "," << row.country << "," << io::format_number(row.cvm_stat)
            << "," << io::format_number(row.ks_pvalue) << "\n";
      const auto& pc = r.profile.cvm_parabola;
      out << "# cvm_parabola_a=" << io::format_number(pc.a)
          << " b=" << io::format_number(pc.b) << " c=" << io::format_number(pc.c) << "\n";
      if (r.profile.has_pvalues) {
        const auto& pk = r.profile.ks_pvalue_parabola;
        out << "# ks_pvalue_parabola_a=" << io::format_number(pk.a)
            << " b=" << io::format_number(pk.b) << " c=" << io::format_number(pk.c) << "\n";
      }
    }
    if (cfg.dump_curves) {
      for (const auto& curve : r.curves) {
        auto out = open(fs::path("curves") / (curve.country + ".csv"));
        out << "rank,volume\n";
        for (std::size_t i = 0; i < curve.size(); ++i)
          out << (i + 1) << "," << io::format_number(curve.volumes[i]) << "\n";
      }
    }
    if (cfg.dump_histograms) {
      for (std::size_t c = 0; c < r.per_country.size(); ++c) {
        if (r.per_country[c].n == 0) continue;
        const auto sample = country_volume_sample(r.matrix, r.matrix.countries[c]);
        const Histogram h = log_histogram(sample, cfg.binning);
        auto out = open(fs::path("histograms") / (r.matrix.countries[c] + ".csv"));
        out << "bin_center_log10,count\n";
        for (std::size_t i = 0; i < h.bins(); ++i)
          out << io::format_number(h.bin_center(i)) << "," << io::format_number(h.counts[i])
              << "\n";
      }
    }
    {
      auto out = open("manifest.json");
      json j;
      j["version"] = kVersion;
      j["config"] = json::parse(run_config_json(cfg));
      j["seed"] = cfg.seed;
      j["countries"] = r.matrix.countries.size();
      j["products"] = r.matrix.products.size();
      j["year"] = r.matrix.year;
      j["fitness_converged"] = r.fitness.converged;
      j["fitness_mode"] = to_string(r.fitness.mode);
      j["fitness_iterations"] = r.fitness.iterations_run;
      j["zero_crossing_share"] = r.dominance.zero_crossing_share;
      if (r.has_profile)
        j["cvm_parabola"] = {r.profile.cvm_parabola.a, r.profile.cvm_parabola.b,
                             r.profile.cvm_parabola.c};
      j["skipped_indicators"] = r.skipped_indicators;
      j["wall_seconds"] = r.wall_seconds;
      out << j.dump(2) << "\n";
    }
  } catch (...) {
    for (const auto& p : written) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    throw;
  }
  return written;
}

}  // namespace exdist
