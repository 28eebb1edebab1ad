#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "likenet/ensemble.hpp"
#include "likenet/graph.hpp"
#include "likenet/likedness.hpp"
#include "likenet/stability.hpp"
#include "likenet/text.hpp"

namespace likenet {

/// x-y plot data. bin_values[b] covers [bin_edges[b], bin_edges[b+1]);
/// an empty optional marks a bin where the value is undefined.
struct BinnedSeries {
  std::vector<double> bin_edges;
  std::vector<std::optional<double>> bin_values;
  std::vector<std::size_t> bin_counts;

  std::size_t bins() const { return bin_values.size(); }
};

inline void write_series_csv(std::ostream& out, const BinnedSeries& s) {
  out << "bin_low,bin_high,value,count\n";
  for (std::size_t b = 0; b < s.bins(); ++b) {
    out << format_double(s.bin_edges[b]) << ',' << format_double(s.bin_edges[b + 1]) << ',';
    if (s.bin_values[b]) out << format_double(*s.bin_values[b]);
    out << ',' << s.bin_counts[b] << '\n';
  }
}

inline nlohmann::json optional_json(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

// ---------------------------------------------------------------------------
// Exponential reference distribution

inline double exp_cdf(double x, double lambda) { return -std::expm1(-lambda * x); }
inline double exp_quantile(double p, double lambda) { return -std::log1p(-p) / lambda; }

/// Rate edges of `bins` equal-probability bins of Exp(lambda); last is +inf.
inline std::vector<double> exp_percentile_edges(double lambda, std::size_t bins) {
  std::vector<double> edges(bins + 1);
  for (std::size_t b = 0; b < bins; ++b) {
    edges[b] = exp_quantile(static_cast<double>(b) / static_cast<double>(bins), lambda);
  }
  edges[bins] = std::numeric_limits<double>::infinity();
  return edges;
}

// ---------------------------------------------------------------------------
// Representation ratios (strategic frequency / population frequency)

struct Representation {
  BinnedSeries series;  // counts are the strategic counts
  std::vector<std::size_t> population_counts;
  std::size_t strategic_total = 0;
  std::size_t population_total = 0;

  /// Pooled ratio over bins [first, last).
  std::optional<double> region_ratio(std::size_t first, std::size_t last) const {
    std::size_t s = 0, p = 0;
    for (std::size_t b = first; b < last; ++b) {
      s += series.bin_counts[b];
      p += population_counts[b];
    }
    if (p == 0 || strategic_total == 0) return std::nullopt;
    return (static_cast<double>(s) / static_cast<double>(strategic_total)) /
           (static_cast<double>(p) / static_cast<double>(population_total));
  }

  /// Bin holding the largest defined ratio (first one on ties).
  std::optional<std::size_t> argmax() const {
    std::optional<std::size_t> best;
    for (std::size_t b = 0; b < series.bins(); ++b) {
      if (series.bin_values[b] && (!best || *series.bin_values[b] > *series.bin_values[*best])) {
        best = b;
      }
    }
    return best;
  }
};

namespace detail {

inline Representation ratio_series(std::vector<double> edges, std::vector<std::size_t> strategic,
                                   std::vector<std::size_t> population) {
  Representation rep;
  rep.strategic_total = std::accumulate(strategic.begin(), strategic.end(), std::size_t{0});
  rep.population_total = std::accumulate(population.begin(), population.end(), std::size_t{0});
  if (rep.strategic_total == 0 || rep.population_total == 0) {
    throw std::invalid_argument("representation: empty strategic or population sample");
  }
  rep.series.bin_edges = std::move(edges);
  for (std::size_t b = 0; b < strategic.size(); ++b) {
    std::optional<double> ratio;
    if (population[b] > 0) {
      ratio = (static_cast<double>(strategic[b]) / static_cast<double>(rep.strategic_total)) /
              (static_cast<double>(population[b]) / static_cast<double>(rep.population_total));
    }
    rep.series.bin_values.push_back(ratio);
  }
  rep.series.bin_counts = std::move(strategic);
  rep.population_counts = std::move(population);
  return rep;
}

inline std::size_t bin_of(const std::vector<double>& edges, double x) {
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  const auto pos = static_cast<std::size_t>(it - edges.begin());
  return std::clamp<std::size_t>(pos == 0 ? 0 : pos - 1, 0, edges.size() - 2);
}

}  // namespace detail

/// Over- or under-representation of strategic outgoing rates, per
/// equal-probability bin of the Exp(lambda) reference distribution.
inline Representation rate_representation(const std::vector<SystemRecord>& strategic,
                                          const std::vector<SystemRecord>& population,
                                          double lambda = 1.0, std::size_t bins = 50) {
  if (strategic.empty() || population.empty()) {
    throw std::invalid_argument("rate_representation: empty record set");
  }
  auto edges = exp_percentile_edges(lambda, bins);
  auto tally = [&](const std::vector<SystemRecord>& recs) {
    std::vector<std::size_t> counts(bins, 0);
    for (const auto& r : recs)
      for (const auto& d : r.outgoing_rates) ++counts[detail::bin_of(edges, d.rate)];
    return counts;
  };
  return detail::ratio_series(edges, tally(strategic), tally(population));
}

/// Per-degree frequency ratio over degrees 0..n-1.
inline Representation degree_representation(const std::vector<SystemRecord>& strategic,
                                            const std::vector<SystemRecord>& population) {
  if (strategic.empty() || population.empty()) {
    throw std::invalid_argument("degree_representation: empty record set");
  }
  std::size_t n = 0;
  for (const auto* set : {&strategic, &population})
    for (const auto& r : *set) n = std::max(n, r.degree_histogram.size());
  auto tally = [&](const std::vector<SystemRecord>& recs) {
    std::vector<std::size_t> counts(n, 0);
    for (const auto& r : recs)
      for (std::size_t d = 0; d < r.degree_histogram.size(); ++d) counts[d] += r.degree_histogram[d];
    return counts;
  };
  std::vector<double> edges(n + 1);
  for (std::size_t d = 0; d <= n; ++d) edges[d] = static_cast<double>(d) - 0.5;
  return detail::ratio_series(std::move(edges), tally(strategic), tally(population));
}

// ---------------------------------------------------------------------------
// Rank correlation

/// Ranks starting at 1, ties sharing their average rank.
inline std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double avg = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
    i = j + 1;
  }
  return rank;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

/// Spearman's rho; 0 when either variable is constant.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: size mismatch");
  if (x.size() < 2) return 0.0;
  return pearson(average_ranks(x), average_ranks(y));
}

// ---------------------------------------------------------------------------
// Stability against a graph metric

enum class GraphMetric { MeanPathLength, MeanLocalClustering, DegreeStddev };

inline const char* metric_name(GraphMetric m) {
  switch (m) {
    case GraphMetric::MeanPathLength: return "mean_path_length";
    case GraphMetric::MeanLocalClustering: return "mean_local_clustering";
    case GraphMetric::DegreeStddev: return "degree_stddev";
  }
  return "?";
}

inline double metric_of(const SystemRecord& r, GraphMetric m) {
  switch (m) {
    case GraphMetric::MeanPathLength: return r.mean_path_length;
    case GraphMetric::MeanLocalClustering: return r.mean_local_clustering;
    case GraphMetric::DegreeStddev: return r.degree_stddev;
  }
  return std::nan("");
}

struct StabilityProfile {
  GraphMetric metric = GraphMetric::MeanPathLength;
  std::vector<double> levels;  // distinct metric values, ascending
  BinnedSeries series;         // mean stability per level; edges at midpoints
  double spearman = 0.0;       // record-level, stability vs metric
  std::size_t records = 0;
};

/// Mean stability per distinct metric value plus the record-level Spearman
/// correlation. Values within 1e-9 of each other share a level. Records with
/// a non-finite metric are skipped.
inline StabilityProfile stability_vs_metric(const std::vector<SystemRecord>& records,
                                            GraphMetric metric) {
  if (records.empty()) throw std::invalid_argument("stability_vs_metric: no records");
  std::vector<std::pair<double, double>> points;  // (metric, stability)
  for (const auto& r : records) {
    const double x = metric_of(r, metric);
    if (std::isfinite(x) && std::isfinite(r.stability)) points.emplace_back(x, r.stability);
  }
  StabilityProfile out;
  out.metric = metric;
  out.records = points.size();
  if (points.empty()) return out;

  std::vector<double> xs, ys;
  for (const auto& [x, y] : points) {
    xs.push_back(x);
    ys.push_back(y);
  }
  out.spearman = spearman(ys, xs);

  std::sort(points.begin(), points.end());
  std::vector<double> sums;
  for (std::size_t i = 0; i < points.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < points.size() && points[j].first - points[i].first <= 1e-9) sum += points[j++].second;
    out.levels.push_back(points[i].first);
    out.series.bin_values.push_back(sum / static_cast<double>(j - i));
    out.series.bin_counts.push_back(j - i);
    i = j;
  }
  auto& edges = out.series.bin_edges;
  edges.push_back(out.levels.front());
  for (std::size_t b = 1; b < out.levels.size(); ++b) {
    edges.push_back((out.levels[b - 1] + out.levels[b]) / 2.0);
  }
  edges.push_back(out.levels.back());
  return out;
}

// ---------------------------------------------------------------------------
// Logistic regression by damped least squares

class RankDeficient : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LogisticFit {
  double intercept = 0.0;
  double coef_preferential = 0.0;
  double coef_path_length = 0.0;
  double coef_clustering = 0.0;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> accepted_residual_norms;  // after each accepted step
};

struct LevenbergMarquardtOptions {
  double initial_damping = 1e-3;
  double damping_factor = 10.0;
  double relative_tolerance = 1e-10;
  double step_tolerance = 1e-12;
  std::size_t max_iterations = 500;
};

inline double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

/// Fits y ~ logistic(b0 + b1 x1 + b2 x2 + b3 x3) by Levenberg-Marquardt,
/// minimizing the sum of squared residuals. `predictors` is rows x 3.
inline LogisticFit logistic_fit(const Eigen::MatrixXd& predictors, const Eigen::VectorXd& y,
                                const LevenbergMarquardtOptions& lm = {}) {
  if (predictors.cols() != 3) throw std::invalid_argument("logistic_fit: expected 3 predictors");
  if (predictors.rows() != y.size()) throw std::invalid_argument("logistic_fit: size mismatch");
  const Eigen::Index rows = predictors.rows();
  Eigen::MatrixXd design(rows, 4);
  design.col(0).setOnes();
  design.rightCols(3) = predictors;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < 4) {
    throw RankDeficient("logistic_fit: predictor matrix is rank deficient (rank " +
                        std::to_string(qr.rank()) + " of 4); a predictor is constant or collinear");
  }

  auto residuals = [&](const Eigen::Vector4d& beta) -> Eigen::VectorXd {
    Eigen::VectorXd r(rows);
    const Eigen::VectorXd eta = design * beta;
    for (Eigen::Index i = 0; i < rows; ++i) r[i] = logistic(eta[i]) - y[i];
    return r;
  };

  Eigen::Vector4d beta = Eigen::Vector4d::Zero();
  Eigen::VectorXd res = residuals(beta);
  double sse = res.squaredNorm();
  double damping = lm.initial_damping;
  LogisticFit fit;
  Eigen::MatrixXd jac(rows, 4);

  for (fit.iterations = 0; fit.iterations < lm.max_iterations; ++fit.iterations) {
    const Eigen::VectorXd eta = design * beta;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double s = logistic(eta[i]);
      jac.row(i) = s * (1.0 - s) * design.row(i);
    }
    const Eigen::Matrix4d normal = jac.transpose() * jac;
    const Eigen::Vector4d grad = jac.transpose() * res;

    bool accepted = false;
    while (!accepted) {
      const Eigen::Matrix4d damped = normal + damping * Eigen::Matrix4d::Identity();
      const Eigen::Vector4d step = damped.ldlt().solve(-grad);
      const double step_norm = step.norm();
      if (!std::isfinite(step_norm) || step_norm < lm.step_tolerance) {
        fit.converged = true;
        break;
      }
      const Eigen::Vector4d trial = beta + step;
      const Eigen::VectorXd trial_res = residuals(trial);
      const double trial_sse = trial_res.squaredNorm();
      if (trial_sse < sse) {
        const double rel = (sse - trial_sse) / std::max(sse, std::numeric_limits<double>::min());
        beta = trial;
        res = trial_res;
        sse = trial_sse;
        damping /= lm.damping_factor;
        fit.accepted_residual_norms.push_back(std::sqrt(sse));
        accepted = true;
        if (rel < lm.relative_tolerance) fit.converged = true;
      } else {
        damping *= lm.damping_factor;
        if (damping > 1e20) {
          fit.converged = true;  // no descent direction left at this precision
          break;
        }
      }
    }
    if (fit.converged) break;
  }
  fit.intercept = beta[0];
  fit.coef_preferential = beta[1];
  fit.coef_path_length = beta[2];
  fit.coef_clustering = beta[3];
  fit.residual_norm = std::sqrt(sse);
  return fit;
}

/// Stability against (degree_stddev, mean_path_length, mean_local_clustering).
/// Records with non-finite metrics are skipped; at least 50 must remain.
inline LogisticFit logistic_fit(const std::vector<SystemRecord>& records,
                                const LevenbergMarquardtOptions& lm = {}) {
  std::vector<const SystemRecord*> usable;
  for (const auto& r : records) {
    if (std::isfinite(r.stability) && std::isfinite(r.degree_stddev) &&
        std::isfinite(r.mean_path_length) && std::isfinite(r.mean_local_clustering)) {
      usable.push_back(&r);
    }
  }
  if (usable.size() < 50) {
    throw std::invalid_argument("logistic_fit: need at least 50 records with finite metrics, have " +
                                std::to_string(usable.size()));
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(usable.size()), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(usable.size()));
  for (std::size_t i = 0; i < usable.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    x(row, 0) = usable[i]->degree_stddev;
    x(row, 1) = usable[i]->mean_path_length;
    x(row, 2) = usable[i]->mean_local_clustering;
    y[row] = usable[i]->stability;
  }
  return logistic_fit(x, y, lm);
}

// ---------------------------------------------------------------------------
// Reciprocity and coalitions

/// For every directed like i -> j, bins the outgoing rate R(j, i) and
/// averages the rate returned, R(i, j). `edges` are outgoing-rate bin edges.
inline BinnedSeries reciprocity_curve(const Graph& g, const RateMatrix& r,
                                      const std::vector<double>& edges) {
  check_compatible(g, r);
  if (edges.size() < 2) throw std::invalid_argument("reciprocity_curve: need >= 2 bin edges");
  const std::size_t bins = edges.size() - 1;
  std::vector<double> sums(bins, 0.0);
  BinnedSeries out;
  out.bin_edges = edges;
  out.bin_counts.assign(bins, 0);
  for (const auto& e : g.edges()) {
    for (auto [i, j] : {std::pair{e.first, e.second}, std::pair{e.second, e.first}}) {
      const double outgoing = r(j, i);
      if (outgoing < edges.front() || outgoing > edges.back()) continue;
      const auto b = detail::bin_of(edges, outgoing);
      sums[b] += r(i, j);
      ++out.bin_counts[b];
    }
  }
  for (std::size_t b = 0; b < bins; ++b) {
    out.bin_values.push_back(out.bin_counts[b] ? std::optional(sums[b] / static_cast<double>(out.bin_counts[b]))
                                               : std::nullopt);
  }
  return out;
}

/// Two adjacent low-degree nodes. Prefers an edge whose endpoints both have
/// the minimum degree; otherwise the edge with the smallest degree sum.
/// Ties go to the lexicographically first edge.
inline std::pair<NodeId, NodeId> outlying_pair(const Graph& g) {
  if (g.edge_count() == 0) throw std::invalid_argument("outlying_pair: graph has no edges");
  const auto deg = g.degrees();
  const auto min_deg = *std::min_element(deg.begin(), deg.end());
  std::optional<Edge> best;
  for (const auto& e : g.edges()) {
    if (deg[e.first] == min_deg && deg[e.second] == min_deg) return {e.first, e.second};
    if (!best || deg[e.first] + deg[e.second] < deg[best->first] + deg[best->second]) best = e;
  }
  return {best->first, best->second};
}

struct CoalitionPoint {
  double joint_rate = 0.0;
  double member_a = 0.0;
  double member_b = 0.0;
  double others_mean = 0.0;
  bool converged = true;
};

/// Sets R(a, b) = R(b, a) = rho for each rho and re-solves.
inline std::vector<CoalitionPoint> coalition_sweep(const Graph& g, const RateMatrix& r, NodeId a,
                                                   NodeId b, const std::vector<double>& joint_rates,
                                                   const SolverOptions& opts = {}) {
  if (a == b) throw std::invalid_argument("coalition_sweep: members must differ");
  if (!g.has_edge(a, b)) throw std::invalid_argument("coalition_sweep: members must be adjacent");
  std::vector<CoalitionPoint> out;
  for (double rho : joint_rates) {
    if (!(rho >= 0.0)) throw std::invalid_argument("coalition_sweep: rates must be nonnegative");
    RateMatrix trial = r;
    trial(a, b) = rho;
    trial(b, a) = rho;
    const auto c = likedness_centrality(g, trial, opts);
    CoalitionPoint p;
    p.joint_rate = rho;
    p.member_a = c.values[a];
    p.member_b = c.values[b];
    double others = 0.0;
    for (NodeId i = 0; i < g.size(); ++i)
      if (i != a && i != b) others += c.values[i];
    p.others_mean = g.size() > 2 ? others / static_cast<double>(g.size() - 2) : 0.0;
    p.converged = c.converged;
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Star graphs against Barabási-Albert graphs with a full hub

struct StarComparison {
  std::size_t star_count = 0;
  double star_mean_stability = 0.0;
  double star_stability_stderr = 0.0;
  std::size_t ba_hub_count = 0;
  double ba_hub_mean_stability = 0.0;
  double ba_hub_stability_stderr = 0.0;
  double relative_difference = 0.0;  // star / ba_hub - 1
  std::size_t top_star_count = 0;
  double branch_hub_ratio = 0.0;  // mean over top stars of mean(branch) / hub
  std::vector<std::string> warnings;
};

namespace detail {

inline std::pair<double, double> mean_stderr(const std::vector<double>& x) {
  const auto n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  if (x.size() < 2) return {mean, std::numeric_limits<double>::infinity()};
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace detail

/// Samples `star_count` random-rate stars on config.n nodes and compares
/// their mean stability with the BA records whose maximum degree is n - 1.
/// Also reports, for the most strategic 1% of stars (config tail), the mean
/// branch-to-hub centrality ratio.
inline StarComparison star_comparison(const std::vector<SystemRecord>& ba_records,
                                      std::size_t star_count, const EnsembleConfig& config) {
  config.validate();
  if (star_count < 1) throw std::invalid_argument("star_comparison: need at least one star");
  const std::size_t hub_degree = config.n - 1;

  std::vector<double> hub_stab;
  for (const auto& r : ba_records) {
    if (r.degree_histogram.size() > hub_degree && r.degree_histogram[hub_degree] > 0) {
      hub_stab.push_back(r.stability);
    }
  }
  if (hub_stab.empty()) {
    throw std::runtime_error("star_comparison: no BA record has a node of degree " +
                             std::to_string(hub_degree) + "; sample more records");
  }

  const Graph star = generate_star(config.n);
  std::vector<double> star_stab;
  std::vector<double> ratios;
  for (std::size_t s = 0; s < star_count; ++s) {
    const RateMatrix r =
        sample_rates(star, config.rate_lambda, derive_seed(config.master_seed, s, kStarStream));
    const auto st = stability(star, r, config.solver);
    star_stab.push_back(st.stability);
    const auto& v = st.centrality.values;
    double branches = 0.0;
    for (NodeId i = 1; i < config.n; ++i) branches += v[i];
    branches /= static_cast<double>(config.n - 1);
    ratios.push_back(v[0] > 0.0 ? branches / v[0] : std::numeric_limits<double>::infinity());
  }

  StarComparison out;
  out.star_count = star_count;
  std::tie(out.star_mean_stability, out.star_stability_stderr) = detail::mean_stderr(star_stab);
  out.ba_hub_count = hub_stab.size();
  std::tie(out.ba_hub_mean_stability, out.ba_hub_stability_stderr) = detail::mean_stderr(hub_stab);
  out.relative_difference = out.star_mean_stability / out.ba_hub_mean_stability - 1.0;

  const auto top = classify_strategic(star_stab, 0.01, config.strategic_tail);
  out.top_star_count = top.strategic.size();
  double ratio_sum = 0.0;
  for (auto i : top.strategic) ratio_sum += ratios[i];
  out.branch_hub_ratio = ratio_sum / static_cast<double>(top.strategic.size());

  if (star_count < 30 || hub_stab.size() < 30) {
    out.warnings.push_back("few samples (" + std::to_string(star_count) + " stars, " +
                           std::to_string(hub_stab.size()) +
                           " BA hub graphs): uncertainty is wide");
  }
  return out;
}

inline nlohmann::json to_json(const StarComparison& s) {
  return {{"star_count", s.star_count},
          {"star_mean_stability", s.star_mean_stability},
          {"star_stability_stderr", optional_json(s.star_stability_stderr)},
          {"ba_hub_count", s.ba_hub_count},
          {"ba_hub_mean_stability", s.ba_hub_mean_stability},
          {"ba_hub_stability_stderr", optional_json(s.ba_hub_stability_stderr)},
          {"relative_difference", s.relative_difference},
          {"top_star_count", s.top_star_count},
          {"branch_hub_ratio", s.branch_hub_ratio},
          {"warnings", s.warnings}};
}

inline nlohmann::json to_json(const LogisticFit& f) {
  return {{"intercept", f.intercept},
          {"coef_preferential", f.coef_preferential},
          {"coef_path_length", f.coef_path_length},
          {"coef_clustering", f.coef_clustering},
          {"residual_norm", f.residual_norm},
          {"iterations", f.iterations},
          {"converged", f.converged}};
}

// ---------------------------------------------------------------------------
// Full analysis of one record set

struct AnalysisReport {
  std::size_t population_count = 0;
  std::size_t strategic_count = 0;
  Representation rates;
  Representation degrees;
  StabilityProfile path_length;
  StabilityProfile clustering;
  StabilityProfile degree_spread;
  std::optional<LogisticFit> fit;
  std::string fit_error;
  std::optional<std::uint64_t> reciprocity_record;
  BinnedSeries reciprocity;
};

/// Reference bins for reciprocity curves: quintiles of Exp(lambda).
inline std::vector<double> reciprocity_bins(double lambda) { return exp_percentile_edges(lambda, 5); }

/// Runs every record-level analysis. `strategic` is compared against the
/// whole `population`; the reciprocity curve is taken from the first
/// strategic record (the most strategic one when it comes from
/// classify_strategic).
inline AnalysisReport analyze_records(const std::vector<SystemRecord>& strategic,
                                      const std::vector<SystemRecord>& population,
                                      double lambda = 1.0, std::size_t rate_bins = 50) {
  AnalysisReport rep;
  rep.population_count = population.size();
  rep.strategic_count = strategic.size();
  rep.rates = rate_representation(strategic, population, lambda, rate_bins);
  rep.degrees = degree_representation(strategic, population);
  rep.path_length = stability_vs_metric(population, GraphMetric::MeanPathLength);
  rep.clustering = stability_vs_metric(population, GraphMetric::MeanLocalClustering);
  rep.degree_spread = stability_vs_metric(population, GraphMetric::DegreeStddev);
  try {
    rep.fit = logistic_fit(population);
  } catch (const std::invalid_argument& e) {
    rep.fit_error = e.what();
  }
  const auto& top = strategic.front();
  const auto [g, r] = reconstruct_system(top);
  rep.reciprocity_record = top.record_index;
  rep.reciprocity = reciprocity_curve(g, r, reciprocity_bins(lambda));
  return rep;
}

inline nlohmann::json series_json(const BinnedSeries& s) {
  nlohmann::json values = nlohmann::json::array();
  for (const auto& v : s.bin_values) values.push_back(optional_json(v));
  nlohmann::json edges = nlohmann::json::array();
  for (double e : s.bin_edges) edges.push_back(optional_json(e));
  return {{"bin_edges", edges}, {"bin_values", values}, {"bin_counts", s.bin_counts}};
}

inline nlohmann::json summary_json(const AnalysisReport& rep, double lambda) {
  nlohmann::json j;
  j["population_count"] = rep.population_count;
  j["strategic_count"] = rep.strategic_count;
  const std::size_t bins = rep.rates.series.bins();
  // Bins lying wholly below the mean rate 1/lambda, i.e. the 1 - 1/e percentile.
  const auto below = static_cast<std::size_t>(
      std::floor(exp_cdf(1.0 / lambda, lambda) * static_cast<double>(bins)));
  j["rate_representation"] = {
      {"bins", bins},
      {"ratio_below_mean_rate", optional_json(rep.rates.region_ratio(0, below))},
      {"argmax_bin", rep.rates.argmax() ? nlohmann::json(*rep.rates.argmax()) : nlohmann::json(nullptr)}};
  j["degree_representation"] = series_json(rep.degrees.series);
  j["spearman"] = {{"mean_path_length", rep.path_length.spearman},
                   {"mean_local_clustering", rep.clustering.spearman},
                   {"degree_stddev", rep.degree_spread.spearman}};
  j["logistic_fit"] = rep.fit ? to_json(*rep.fit) : nlohmann::json({{"error", rep.fit_error}});
  j["reciprocity_record"] = rep.reciprocity_record ? nlohmann::json(*rep.reciprocity_record)
                                                   : nlohmann::json(nullptr);
  j["reciprocity"] = series_json(rep.reciprocity);
  return j;
}

}  // namespace likenet
