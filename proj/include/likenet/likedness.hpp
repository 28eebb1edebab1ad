#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "likenet/graph.hpp"
#include "likenet/rate_matrix.hpp"

namespace likenet {

struct SolverOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 10'000;
  double relaxation = 0.5;

  void validate() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("solver: tolerance must be > 0");
    if (max_iterations < 1) throw std::invalid_argument("solver: max_iterations must be >= 1");
    if (!(relaxation > 0.0 && relaxation <= 1.0)) {
      throw std::invalid_argument("solver: relaxation must lie in (0, 1]");
    }
  }
};

/// Thrown when no node can be scored because every neighborhood carries zero
/// prestige at the fixed point (e.g. an all-zero rate matrix).
class DegenerateSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CentralityVector {
  std::vector<double> values;  // normalized to sum 1 unless all zero
  std::vector<double> raw;     // fixed point in rate units, before normalization
  bool converged = false;
  std::size_t iterations = 0;
  double residual = 0.0;  // max-norm of F(L) - L at the returned iterate
};

namespace detail {

inline std::vector<double> normalized(const std::vector<double>& raw) {
  double sum = 0.0;
  for (double x : raw) sum += x;
  std::vector<double> out(raw.size(), 0.0);
  if (sum > 0.0)
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] / sum;
  return out;
}

/// F(L)_i = sum_j R_ij L_j / sum_j G_ij L_j, with F_i = 0 where the
/// denominator vanishes. Returns the max-norm of F(L) - L.
inline double likedness_map(const Graph& g, const RateMatrix& r, std::span<const double> level,
                            std::span<double> out) {
  double residual = 0.0;
  for (NodeId i = 0; i < g.size(); ++i) {
    double num = 0.0;
    double den = 0.0;
    for (NodeId j : g.neighbors(i)) {
      num += r(i, j) * level[j];
      den += level[j];
    }
    out[i] = den > 0.0 ? num / den : 0.0;
    residual = std::max(residual, std::abs(out[i] - level[i]));
  }
  return residual;
}

}  // namespace detail

/// Likedness centrality: each node's prestige is the rate-weighted mean of
/// its neighbors' prestige divided by their unweighted total,
///
///   L_i = sum_j R_ij L_j / sum_j G_ij L_j.
///
/// Solved by damped successive substitution on raw values
/// L <- (1 - w) L + w F(L), starting from `initial` (uniform 1/n when
/// empty). Isolated nodes stay at 0. Convergence is declared when the
/// fixed-point residual max_i |F(L)_i - L_i| drops to the tolerance.
/// Hitting the iteration cap returns the last iterate with converged=false.
inline CentralityVector likedness_centrality(const Graph& g, const RateMatrix& r,
                                             const SolverOptions& opts = {},
                                             std::span<const double> initial = {}) {
  opts.validate();
  check_compatible(g, r);
  if (g.edge_count() == 0) throw std::invalid_argument("likedness: graph has no edges");
  if (!r.any_positive()) {
    throw DegenerateSystem("likedness: all rates are zero; every denominator vanishes");
  }
  const std::size_t n = g.size();
  if (!initial.empty() && initial.size() != n) {
    throw std::invalid_argument("likedness: initial vector has wrong dimension");
  }

  std::vector<double> level(n);
  for (NodeId i = 0; i < n; ++i) {
    level[i] = g.degree(i) == 0 ? 0.0 : (initial.empty() ? 1.0 / static_cast<double>(n) : initial[i]);
  }
  std::vector<double> image(n);
  const double w = opts.relaxation;

  CentralityVector out;
  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    const double residual = detail::likedness_map(g, r, level, image);
    out.iterations = it;
    out.residual = residual;
    if (residual <= opts.tolerance) {
      out.converged = true;
      break;
    }
    bool alive = false;
    for (NodeId i = 0; i < n; ++i) {
      level[i] = (1.0 - w) * level[i] + w * image[i];
      alive = alive || level[i] > 0.0;
    }
    if (!alive) throw DegenerateSystem("likedness: iterate collapsed to zero");
  }
  if (!out.converged) {
    out.iterations = opts.max_iterations;
    out.residual = detail::likedness_map(g, r, level, image);
    out.converged = out.residual <= opts.tolerance;
  }
  out.raw = level;
  out.values = detail::normalized(level);
  return out;
}

/// Reference model: dominant eigenvector of R (L = R L / lambda) by shifted
/// power iteration, normalized to sum 1. The shift by max entry keeps
/// bipartite spectra (eigenvalues +-lambda) from oscillating.
inline CentralityVector eigenvector_centrality(const Graph& g, const RateMatrix& r,
                                               const SolverOptions& opts = {}) {
  opts.validate();
  check_compatible(g, r);
  const std::size_t n = g.size();
  double shift = 0.0;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < n; ++j) shift = std::max(shift, r(i, j));
  if (shift == 0.0) throw DegenerateSystem("eigenvector: all rates are zero");

  std::vector<double> v(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  CentralityVector out;
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    double sum = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      double acc = shift * v[i];
      for (NodeId j : g.neighbors(i)) acc += r(i, j) * v[j];
      next[i] = acc;
      sum += acc;
    }
    double change = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      next[i] /= sum;
      change = std::max(change, std::abs(next[i] - v[i]));
    }
    v.swap(next);
    out.iterations = it;
    out.residual = change;
    if (change <= opts.tolerance) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    throw std::runtime_error("eigenvector: power iteration did not converge");
  }
  out.raw = v;
  out.values = v;
  return out;
}

}  // namespace likenet
