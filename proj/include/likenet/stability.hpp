#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "likenet/graph.hpp"
#include "likenet/likedness.hpp"
#include "likenet/rate_matrix.hpp"

namespace likenet {

enum class DifferenceScheme { Forward, Central };

struct GradientOptions {
  DifferenceScheme scheme = DifferenceScheme::Forward;
  double relative_step = 0.01;  // fraction of the entry being perturbed
  double absolute_step = 1e-4;  // used for entries below zero_threshold
  double zero_threshold = 1e-8;

  double step_for(double entry) const {
    return entry < zero_threshold ? absolute_step : relative_step * entry;
  }
};

struct GradientEstimate {
  double value = 0.0;
  double step = 0.0;
  bool converged = true;
};

/// d L_i / d R_{j,i}: how node i's normalized centrality responds to the rate
/// at which i likes j. (i, j) must be an edge.
///
/// The central scheme steps backward by the same amount, except that an entry
/// smaller than the step falls back to the forward quotient to stay in the
/// nonnegative orthant.
inline GradientEstimate centrality_gradient(const Graph& g, const RateMatrix& r, NodeId i,
                                            NodeId j, const SolverOptions& opts = {},
                                            const GradientOptions& grad = {},
                                            const CentralityVector* base = nullptr) {
  if (!g.has_edge(i, j)) {
    throw std::invalid_argument("centrality_gradient: (" + std::to_string(i) + "," +
                                std::to_string(j) + ") is not an edge");
  }
  CentralityVector own_base;
  if (base == nullptr) {
    own_base = likedness_centrality(g, r, opts);
    base = &own_base;
  }
  const double entry = r(j, i);
  const double step = grad.step_for(entry);

  RateMatrix up = r;
  up(j, i) = entry + step;
  const auto plus = likedness_centrality(g, up, opts);

  GradientEstimate out;
  out.step = step;
  if (grad.scheme == DifferenceScheme::Central && entry >= step) {
    RateMatrix down = r;
    down(j, i) = entry - step;
    const auto minus = likedness_centrality(g, down, opts);
    out.value = (plus.values[i] - minus.values[i]) / (2.0 * step);
    out.converged = plus.converged && minus.converged;
  } else {
    out.value = (plus.values[i] - base->values[i]) / step;
    out.converged = plus.converged && base->converged;
  }
  return out;
}

/// Gradient with respect to one directed rate: `node` likes `target`.
struct DirectedGradient {
  NodeId node;
  NodeId target;
  double value;
};

struct StabilityResult {
  double stability = 1.0;
  double gradient_sq_sum = 0.0;
  std::vector<DirectedGradient> per_edge_gradients;
  bool solver_converged = true;
  CentralityVector centrality;  // the unperturbed solve
};

/// exp(-sum of squared gradients); 1 exactly when every gradient is zero.
inline double stability_from_gradients(const std::vector<double>& gradients) {
  double sq = 0.0;
  for (double x : gradients) sq += x * x;
  return std::exp(-sq);
}

/// S(R, G) = exp(-sum over both directions of every edge (i, j) of
/// (d L_i / d R_{j,i})^2). Performs 2|E| + 1 solves with the forward scheme.
inline StabilityResult stability(const Graph& g, const RateMatrix& r,
                                 const SolverOptions& opts = {},
                                 const GradientOptions& grad = {}) {
  StabilityResult out;
  out.centrality = likedness_centrality(g, r, opts);
  out.solver_converged = out.centrality.converged;
  out.per_edge_gradients.reserve(2 * g.edge_count());
  for (const auto& e : g.edges()) {
    for (auto [node, target] : {std::pair{e.first, e.second}, std::pair{e.second, e.first}}) {
      const auto est = centrality_gradient(g, r, node, target, opts, grad, &out.centrality);
      out.per_edge_gradients.push_back({node, target, est.value});
      out.gradient_sq_sum += est.value * est.value;
      out.solver_converged = out.solver_converged && est.converged;
    }
  }
  out.stability = std::exp(-out.gradient_sq_sum);
  return out;
}

// ---------------------------------------------------------------------------
// Strategic classification

/// Which tail of the stability distribution counts as "strategic". The
/// default follows the numeric threshold convention (small S).
enum class StrategicTail { LowestStability, HighestStability };

struct StrategicPartition {
  std::vector<std::size_t> strategic;   // positions into the input, in rank order
  std::vector<std::size_t> population;  // the remaining positions, ascending
  double threshold = 0.0;  // boundary S value of the strategic class
};

inline std::size_t strategic_count(std::size_t total, double fraction) {
  const auto want = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
  return std::clamp<std::size_t>(want, 1, total);
}

/// Picks the `fraction` of entries at the chosen tail of `stabilities`.
/// Ties are broken by position (lower index first).
inline StrategicPartition classify_strategic(const std::vector<double>& stabilities,
                                             double fraction,
                                             StrategicTail tail = StrategicTail::LowestStability) {
  if (stabilities.empty()) throw std::invalid_argument("classify_strategic: no records");
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("classify_strategic: fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> order(stabilities.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return tail == StrategicTail::LowestStability ? stabilities[a] < stabilities[b]
                                                  : stabilities[a] > stabilities[b];
  });
  const std::size_t take = strategic_count(stabilities.size(), fraction);
  StrategicPartition out;
  out.strategic.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
  out.population.assign(order.begin() + static_cast<std::ptrdiff_t>(take), order.end());
  std::sort(out.population.begin(), out.population.end());
  out.threshold = stabilities[out.strategic.back()];
  return out;
}

}  // namespace likenet
