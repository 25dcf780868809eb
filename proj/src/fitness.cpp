#include "exdist/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace exdist {

const char* to_string(ConvergenceMode m) {
  switch (m) {
    case ConvergenceMode::value: return "value";
    case ConvergenceMode::rank: return "rank";
    default: return "none";
  }
}

void FitnessConfig::validate() const {
  if (max_iterations < 1) throw Error("fitness: max_iterations must be >= 1");
  if (value_tolerance <= 0.0) throw Error("fitness: value_tolerance must be positive");
  if (rank_patience < 1) throw Error("fitness: rank_patience must be >= 1");
  if (zero_floor <= 0.0) throw Error("fitness: zero_floor must be positive");
}

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Relative change per entry; exact zeros compare as unchanged.
double max_rel_change(const std::vector<double>& prev, const std::vector<double>& next) {
  double worst = 0.0;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    const double denom = std::max(std::abs(prev[i]), std::abs(next[i]));
    if (denom == 0.0) continue;
    worst = std::max(worst, std::abs(next[i] - prev[i]) / denom);
  }
  return worst;
}

// Permutation sorting indices by descending value, ties by index.
std::vector<int> order_desc(const std::vector<double>& v) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] > v[b]; });
  return idx;
}

int count_order_changes(const std::vector<int>& a, const std::vector<int>& b) {
  int changes = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) ++changes;
  return changes;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> iterate_once(
    const BinaryExportMatrix& m, const std::vector<double>& fitness,
    const std::vector<double>& complexity) {
  const std::size_t C = m.rows();
  const std::size_t P = m.cols();
  if (fitness.size() != C || complexity.size() != P)
    throw Error("iterate_once: vector lengths do not match the matrix");

  std::vector<bool> row_nonzero(C, false), col_nonzero(P, false);
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t p = 0; p < P; ++p)
      if (m.at(c, p)) {
        row_nonzero[c] = true;
        col_nonzero[p] = true;
      }
  for (std::size_t c = 0; c < C; ++c)
    if (row_nonzero[c] && !(fitness[c] > 0.0))
      throw Error("iterate_once: non-positive fitness entry without zero-floor handling");

  std::vector<double> f_next(C, 0.0), q_next(P, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    double acc = 0.0;
    for (std::size_t p = 0; p < P; ++p)
      if (m.at(c, p)) acc += complexity[p];
    f_next[c] = acc;
  }
  for (std::size_t p = 0; p < P; ++p) {
    if (!col_nonzero[p]) continue;  // exported by nobody
    double acc = 0.0;
    for (std::size_t c = 0; c < C; ++c)
      if (m.at(c, p)) acc += 1.0 / fitness[c];
    q_next[p] = 1.0 / acc;
  }
  const double fm = mean_of(f_next);
  const double qm = mean_of(q_next);
  if (fm <= 0.0 || qm <= 0.0) throw Error("iterate_once: degenerate update (zero mean)");
  for (auto& v : f_next) v /= fm;
  for (auto& v : q_next) v /= qm;
  return {std::move(f_next), std::move(q_next)};
}

FitnessResult solve(const BinaryExportMatrix& m, const FitnessConfig& cfg) {
  cfg.validate();
  const std::size_t C = m.rows();
  const std::size_t P = m.cols();
  if (C == 0 || P == 0) throw Error("fitness solve: empty matrix");

  FitnessResult result;
  result.countries = m.countries;
  result.products = m.products;

  // Drop empty rows/columns; they carry no information and break the update.
  std::vector<int> c_map(C, -1), p_map(P, -1);
  std::vector<std::size_t> active_c, active_p;
  for (std::size_t c = 0; c < C; ++c) {
    bool any = false;
    for (std::size_t p = 0; p < P; ++p)
      if (m.at(c, p)) { any = true; break; }
    if (any) {
      c_map[c] = static_cast<int>(active_c.size());
      active_c.push_back(c);
    } else {
      result.dropped_countries.push_back(c);
    }
  }
  for (std::size_t p = 0; p < P; ++p) {
    bool any = false;
    for (std::size_t c = 0; c < C; ++c)
      if (m.at(c, p)) { any = true; break; }
    if (any) {
      p_map[p] = static_cast<int>(active_p.size());
      active_p.push_back(p);
    } else {
      result.dropped_products.push_back(p);
    }
  }
  const std::size_t nc = active_c.size();
  const std::size_t np = active_p.size();
  if (nc == 0 || np == 0) throw Error("fitness solve: matrix has no nonzero entries");

  // Adjacency in both directions over the active submatrix.
  std::vector<std::vector<int>> prods_of(nc), countries_of(np);
  for (std::size_t ci = 0; ci < nc; ++ci)
    for (std::size_t p = 0; p < P; ++p)
      if (m.at(active_c[ci], p)) {
        prods_of[ci].push_back(p_map[p]);
        countries_of[p_map[p]].push_back(static_cast<int>(ci));
      }

  std::vector<double> f(nc, 1.0), q(np, 1.0);
  std::vector<double> f_next(nc), q_next(np);
  std::vector<int> f_order = order_desc(f), q_order = order_desc(q);
  int stable_iterations = 0;

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    for (std::size_t ci = 0; ci < nc; ++ci) {
      double acc = 0.0;
      for (int pi : prods_of[ci]) acc += q[pi];
      f_next[ci] = acc;
    }
    for (std::size_t pi = 0; pi < np; ++pi) {
      double acc = 0.0;
      bool pinned_exporter = false;
      for (int ci : countries_of[pi]) {
        if (f[ci] == 0.0) { pinned_exporter = true; break; }
        acc += 1.0 / f[ci];
      }
      // A zero-fitness exporter contributes an infinite term: the limit is 0.
      q_next[pi] = (pinned_exporter || !std::isfinite(acc)) ? 0.0 : 1.0 / acc;
    }
    const double fm = mean_of(f_next);
    const double qm = mean_of(q_next);
    if (fm <= 0.0 || qm <= 0.0) throw Error("fitness solve: degenerate update (zero mean)");
    for (auto& v : f_next) v /= fm;
    for (auto& v : q_next) v /= qm;
    for (auto& v : f_next)
      if (v <= cfg.zero_floor) v = 0.0;

    const double df = max_rel_change(f, f_next);
    const double dq = max_rel_change(q, q_next);
    auto f_order_next = order_desc(f_next);
    auto q_order_next = order_desc(q_next);
    const int c_changes = count_order_changes(f_order, f_order_next);
    const int p_changes = count_order_changes(q_order, q_order_next);

    f.swap(f_next);
    q.swap(q_next);
    f_order.swap(f_order_next);
    q_order.swap(q_order_next);
    result.iterations_run = iter;
    result.final_max_rel_dfitness = df;
    result.final_max_rel_dcomplexity = dq;

    if (cfg.keep_trace) {
      FitnessIterationStats st;
      st.max_rel_dfitness = df;
      st.max_rel_dcomplexity = dq;
      st.country_rank_changes = c_changes;
      st.product_rank_changes = p_changes;
      st.mean_fitness_dev = std::abs(mean_of(f) - 1.0);
      st.mean_complexity_dev = std::abs(mean_of(q) - 1.0);
      result.trace.push_back(st);
    }

    if (df < cfg.value_tolerance && dq < cfg.value_tolerance) {
      result.converged = true;
      result.mode = ConvergenceMode::value;
      break;
    }
    stable_iterations = (c_changes == 0 && p_changes == 0) ? stable_iterations + 1 : 0;
    if (stable_iterations >= cfg.rank_patience) {
      result.converged = true;
      result.mode = ConvergenceMode::rank;
      break;
    }
  }

  result.fitness.assign(C, 0.0);
  result.complexity.assign(P, 0.0);
  for (std::size_t ci = 0; ci < nc; ++ci) result.fitness[active_c[ci]] = f[ci];
  for (std::size_t pi = 0; pi < np; ++pi) result.complexity[active_p[pi]] = q[pi];
  return result;
}

std::vector<int> fitness_rank(const FitnessResult& result) {
  const std::size_t C = result.countries.size();
  std::vector<std::size_t> idx(C);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (result.fitness[a] != result.fitness[b]) return result.fitness[a] > result.fitness[b];
    return result.countries[a] < result.countries[b];
  });
  std::vector<int> ranks(C, 0);
  for (std::size_t i = 0; i < C; ++i) ranks[idx[i]] = static_cast<int>(i) + 1;
  return ranks;
}

}  // namespace exdist
