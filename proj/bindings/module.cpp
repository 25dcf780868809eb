#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "exdist/dist_fit.hpp"
#include "exdist/fitness.hpp"
#include "exdist/gof.hpp"
#include "exdist/pipeline.hpp"
#include "exdist/ranking.hpp"
#include "exdist/rca.hpp"
#include "exdist/stats.hpp"
#include "exdist/synth.hpp"

namespace py = pybind11;
using namespace exdist;

namespace {

template <typename T>
py::array_t<T> to_pyarray(const std::vector<T>& v) {
  py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw Error("expected a 1-d array");
  return {a.data(), a.data() + a.size()};
}

DenseMatrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw Error("expected a 2-d array");
  DenseMatrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.data.begin());
  return m;
}

py::array_t<double> from_matrix(const DenseMatrix& m) {
  py::array_t<double> out({m.rows, m.cols});
  std::copy(m.data.begin(), m.data.end(), out.mutable_data());
  return out;
}

std::vector<std::string> index_codes(const char* prefix, std::size_t n) {
  std::vector<std::string> codes;
  for (std::size_t i = 0; i < n; ++i) codes.push_back(prefix + std::to_string(i));
  return codes;
}

TradeMatrix trade_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  TradeMatrix t;
  t.volumes = to_matrix(a);
  t.countries = index_codes("C", t.volumes.rows);
  t.products = index_codes("P", t.volumes.cols);
  return t;
}

py::dict fit_to_dict(const LogNormalFit& f) {
  py::dict d;
  d["mu"] = f.mu;
  d["sigma"] = f.sigma;
  d["n"] = f.n;
  d["log_likelihood"] = f.log_likelihood;
  d["mode_log10"] = f.mode_log10;
  if (f.truncated()) d["right_truncation_log"] = *f.right_truncation_log;
  return d;
}

LogNormalFit fit_from_args(double mu, double sigma, std::optional<double> truncation_log) {
  LogNormalFit f;
  f.mu = mu;
  f.sigma = sigma;
  f.right_truncation_log = truncation_log;
  return f;
}

py::dict gof_to_dict(const GofResult& g) {
  py::dict d;
  d["n"] = g.n;
  d["ks_stat"] = g.ks_stat;
  d["ks_pvalue"] = g.ks_pvalue;
  d["reject_ks"] = g.reject_ks;
  d["ks_naive_threshold"] = g.ks_naive_threshold;
  d["cvm_stat"] = g.cvm_stat;
  d["cvm_pvalue"] = g.cvm_pvalue;
  d["reject_cvm"] = g.reject_cvm;
  d["cvm_naive_threshold"] = g.cvm_naive_threshold;
  d["bootstrap_replicates"] = g.bootstrap_replicates;
  d["seed"] = g.seed;
  return d;
}

SynthCountrySpec spec_from_args(int n_products, int k_capabilities, double log_mean, double log_sd,
                                std::uint64_t seed, std::optional<double> left_threshold,
                                std::optional<double> cap_quantile,
                                std::optional<double> pareto_alpha, bool hard_ceiling) {
  SynthCountrySpec s;
  s.n_products = n_products;
  s.k_capabilities = k_capabilities;
  s.capability_log_mean = log_mean;
  s.capability_log_sd = log_sd;
  s.seed = seed;
  s.left_threshold = left_threshold;
  if (cap_quantile || pareto_alpha) {
    RightCap cap;
    if (cap_quantile) cap.cap_quantile = *cap_quantile;
    if (pareto_alpha) cap.pareto_alpha = *pareto_alpha;
    cap.hard_ceiling = hard_ceiling;
    s.right_cap = cap;
  }
  return s;
}

StatKind kind_from_string(const std::string& kind) {
  if (kind == "ks" || kind == "KS") return StatKind::KS;
  if (kind == "cvm" || kind == "CvM" || kind == "CVM") return StatKind::CvM;
  throw Error("unknown statistic kind: " + kind + " (use 'ks' or 'cvm')");
}

}  // namespace

PYBIND11_MODULE(_exdist, m) {
  m.doc() = "export-volume distribution toolkit (native core)";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "ExdistError");

  m.def(
      "rca_matrix",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> volumes) {
        return from_matrix(rca_matrix(trade_from_array(volumes)));
      },
      py::arg("volumes"),
      "Balassa revealed-comparative-advantage matrix of a country x product volume matrix.");

  m.def(
      "binarize",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> rca, double threshold) {
        const DenseMatrix r = to_matrix(rca);
        auto b = binarize(r, index_codes("C", r.rows), index_codes("P", r.cols), threshold);
        py::array_t<std::uint8_t> out({b.rows(), b.cols()});
        std::copy(b.m.begin(), b.m.end(), out.mutable_data());
        return out;
      },
      py::arg("rca"), py::arg("threshold") = 1.0,
      "Binary export matrix: 1 where rca >= threshold.");

  m.def(
      "fitness_solve",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> matrix, int max_iterations,
         double value_tolerance, int rank_patience, double zero_floor) {
        const DenseMatrix dm = to_matrix(matrix);
        BinaryExportMatrix bm;
        bm.countries = index_codes("C", dm.rows);
        bm.products = index_codes("P", dm.cols);
        bm.m.resize(dm.data.size());
        for (std::size_t i = 0; i < dm.data.size(); ++i) bm.m[i] = dm.data[i] != 0.0 ? 1 : 0;
        FitnessConfig cfg;
        cfg.max_iterations = max_iterations;
        cfg.value_tolerance = value_tolerance;
        cfg.rank_patience = rank_patience;
        cfg.zero_floor = zero_floor;
        auto res = solve(bm, cfg);
        py::dict d;
        d["fitness"] = to_pyarray(res.fitness);
        d["complexity"] = to_pyarray(res.complexity);
        d["iterations"] = res.iterations_run;
        d["converged"] = res.converged;
        d["mode"] = std::string(to_string(res.mode));
        auto ranks = fitness_rank(res);
        d["rank"] = to_pyarray(ranks);
        return d;
      },
      py::arg("matrix"), py::arg("max_iterations") = 1000, py::arg("value_tolerance") = 1e-9,
      py::arg("rank_patience") = 20, py::arg("zero_floor") = 1e-300,
      "Runs the coupled competitiveness/complexity iteration on a binary matrix.");

  m.def(
      "fit_lognormal",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> sample) {
        return fit_to_dict(fit_lognormal(to_vector(sample)));
      },
      py::arg("sample"), "Maximum-likelihood log-normal fit of a positive sample.");

  m.def(
      "refit_left_of_mode",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> sample,
         double bin_width_decades) {
        const auto xs = to_vector(sample);
        const auto full = fit_lognormal(xs);
        return fit_to_dict(refit_left_of_mode(xs, full, BinningRule{bin_width_decades}));
      },
      py::arg("sample"), py::arg("bin_width_decades") = 0.25,
      "Right-truncated refit of the sample's left wing (at or below the modal volume).");

  m.def(
      "ks_statistic",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> sample, double mu,
         double sigma, std::optional<double> truncation_log) {
        return ks_statistic(to_vector(sample), fit_from_args(mu, sigma, truncation_log));
      },
      py::arg("sample"), py::arg("mu"), py::arg("sigma"),
      py::arg("right_truncation_log") = py::none());

  m.def(
      "cvm_statistic",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> sample, double mu,
         double sigma, std::optional<double> truncation_log) {
        return cvm_statistic(to_vector(sample), fit_from_args(mu, sigma, truncation_log));
      },
      py::arg("sample"), py::arg("mu"), py::arg("sigma"),
      py::arg("right_truncation_log") = py::none());

  m.def(
      "bootstrap_pvalue",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> sample,
         const std::string& kind, int replicates, std::uint64_t seed) {
        return bootstrap_pvalue(to_vector(sample), kind_from_string(kind), replicates, seed);
      },
      py::arg("sample"), py::arg("kind") = "cvm", py::arg("replicates") = 1000,
      py::arg("seed") = 1,
      "Parametric-bootstrap p-value of the log-normal hypothesis (parameters re-estimated "
      "per replicate).");

  m.def(
      "evaluate_gof",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> sample, double alpha_ks,
         double alpha_cvm, int replicates, std::uint64_t seed) {
        const auto xs = to_vector(sample);
        GofConfig cfg;
        cfg.alpha_ks = alpha_ks;
        cfg.alpha_cvm = alpha_cvm;
        cfg.bootstrap_replicates = replicates;
        cfg.seed = seed;
        return gof_to_dict(evaluate_gof(xs, fit_lognormal(xs), cfg));
      },
      py::arg("sample"), py::arg("alpha_ks") = 0.05, py::arg("alpha_cvm") = 0.01,
      py::arg("replicates") = 1000, py::arg("seed") = 1,
      "KS and CvM tests of log-normality with shared bootstrap replicates.");

  m.def(
      "classify_sample",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> sample, double alpha_ks,
         double alpha_cvm, int replicates, int left_replicates, std::uint64_t seed,
         double bin_width_decades) {
        const auto xs = to_vector(sample);
        const auto full = fit_lognormal(xs);
        GofConfig gof_cfg;
        gof_cfg.alpha_ks = alpha_ks;
        gof_cfg.alpha_cvm = alpha_cvm;
        gof_cfg.bootstrap_replicates = replicates;
        gof_cfg.seed = stats::mix_seed(seed, 0);
        const auto gof = evaluate_gof(xs, full, gof_cfg);
        const auto left = refit_left_of_mode(xs, full, BinningRule{bin_width_decades});
        ClassifierConfig cls;
        cls.left_bootstrap_replicates = left_replicates;
        cls.seed = stats::mix_seed(seed, 1);
        const auto shape = classify_shape(xs, full, left, gof, cls);
        py::dict d;
        d["shape"] = std::string(to_string(shape.shape));
        d["left_truncation_score"] = shape.left_truncation_score;
        d["right_excess_score"] = shape.right_excess_score;
        d["mode_log10"] = shape.mode_log10;
        d["left_cvm_stat"] = shape.left_cvm_stat;
        d["left_cvm_pvalue"] = shape.left_cvm_pvalue;
        d["full_fit"] = fit_to_dict(full);
        d["left_fit"] = fit_to_dict(left);
        d["gof"] = gof_to_dict(gof);
        return d;
      },
      py::arg("sample"), py::arg("alpha_ks") = 0.05, py::arg("alpha_cvm") = 0.01,
      py::arg("replicates") = 1000, py::arg("left_replicates") = 200, py::arg("seed") = 1,
      py::arg("bin_width_decades") = 0.25,
      "Full per-country chain: fit, left refit, tests, three-class shape decision.");

  m.def(
      "log_histogram",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> sample,
         double bin_width_decades) {
        const auto h = log_histogram(to_vector(sample), BinningRule{bin_width_decades});
        return py::make_tuple(to_pyarray(h.bin_edges), to_pyarray(h.counts));
      },
      py::arg("sample"), py::arg("bin_width_decades") = 0.25,
      "Histogram of log10 volumes; returns (bin_edges, counts).");

  m.def(
      "count_crossings",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> a,
         py::array_t<double, py::array::c_style | py::array::forcecast> b) {
        return count_crossings(ranking_curve(to_vector(a), "a"), ranking_curve(to_vector(b), "b"));
      },
      py::arg("a"), py::arg("b"),
      "Crossings between the descending ranking curves of two samples.");

  m.def(
      "zero_crossing_share",
      [](const std::vector<py::array_t<double, py::array::c_style | py::array::forcecast>>& samples) {
        std::vector<RankingCurve> curves;
        for (std::size_t i = 0; i < samples.size(); ++i)
          curves.push_back(ranking_curve(to_vector(samples[i]), "C" + std::to_string(i)));
        return dominance_matrix(curves).zero_crossing_share;
      },
      py::arg("samples"), "Share of sample pairs whose ranking curves never cross.");

  m.def(
      "gen_country",
      [](int n_products, int k_capabilities, double capability_log_mean,
         double capability_log_sd, std::uint64_t seed, std::optional<double> left_threshold,
         std::optional<double> cap_quantile, std::optional<double> pareto_alpha,
         bool hard_ceiling) {
        const auto xs =
            gen_country(spec_from_args(n_products, k_capabilities, capability_log_mean,
                                       capability_log_sd, seed, left_threshold, cap_quantile,
                                       pareto_alpha, hard_ceiling));
        return to_pyarray(xs);
      },
      py::arg("n_products"), py::arg("k_capabilities") = 1,
      py::arg("capability_log_mean") = 0.0, py::arg("capability_log_sd") = 1.0,
      py::arg("seed") = 1, py::arg("left_threshold") = py::none(),
      py::arg("cap_quantile") = py::none(), py::arg("pareto_alpha") = py::none(),
      py::arg("hard_ceiling") = false,
      "Synthetic country sample from the multiplicative capability model.");

  m.def("normal_quantile", &stats::normal_quantile, py::arg("p"));
  m.def("ks_naive_threshold", &stats::ks_naive_threshold, py::arg("alpha"), py::arg("n"));
  m.def("cvm_naive_threshold", &stats::cvm_naive_threshold, py::arg("alpha"));
}
