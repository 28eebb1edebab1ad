#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "likenet/graph.hpp"
#include "likenet/text.hpp"

namespace likenet {

/// Dense n x n matrix of directed "like" rates.
///
/// Entry (i, j) is the rate at which agent j likes agent i, i.e. what i
/// receives from j. Row i therefore collects everything i is given and
/// column i everything i hands out.
class RateMatrix {
 public:
  RateMatrix() = default;
  explicit RateMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }

  double operator()(NodeId i, NodeId j) const { return data_[i * n_ + j]; }
  double& operator()(NodeId i, NodeId j) { return data_[i * n_ + j]; }

  /// Rate at which `liker` likes `liked`.
  double likes(NodeId liker, NodeId liked) const { return (*this)(liked, liker); }

  RateMatrix scaled(double c) const {
    RateMatrix out = *this;
    for (auto& x : out.data_) x *= c;
    return out;
  }

  RateMatrix relabeled(const std::vector<NodeId>& perm) const {
    RateMatrix out(n_);
    for (NodeId i = 0; i < n_; ++i)
      for (NodeId j = 0; j < n_; ++j) out(perm[i], perm[j]) = (*this)(i, j);
    return out;
  }

  bool any_positive() const {
    for (double x : data_)
      if (x > 0.0) return true;
    return false;
  }

  friend bool operator==(const RateMatrix&, const RateMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Throws std::invalid_argument unless r is nonnegative, has zero diagonal,
/// matches g's size, and is supported on g's edges.
inline void check_compatible(const Graph& g, const RateMatrix& r) {
  if (r.size() != g.size()) {
    throw std::invalid_argument("rate matrix dimension " + std::to_string(r.size()) +
                                " does not match graph size " + std::to_string(g.size()));
  }
  for (NodeId i = 0; i < r.size(); ++i) {
    for (NodeId j = 0; j < r.size(); ++j) {
      const double x = r(i, j);
      if (!std::isfinite(x) || x < 0.0) {
        throw std::invalid_argument("rate (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") is negative or non-finite");
      }
      if (x != 0.0 && (i == j || !g.has_edge(i, j))) {
        throw std::invalid_argument("rate (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") is nonzero off the edge set");
      }
    }
  }
}

/// Uniform rate `value` on both directions of every edge.
inline RateMatrix uniform_rates(const Graph& g, double value) {
  RateMatrix r(g.size());
  for (const auto& e : g.edges()) {
    r(e.first, e.second) = value;
    r(e.second, e.first) = value;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Text formats. Dense: n comma-separated rows of n values. Sparse: one
// "i j rate" triplet per line, which sets entry (i, j). The sparse form
// carries no dimension, so the reader takes it from the companion graph.

inline void write_rates_csv(std::ostream& out, const RateMatrix& r) {
  for (NodeId i = 0; i < r.size(); ++i) {
    for (NodeId j = 0; j < r.size(); ++j) {
      if (j) out << ',';
      out << format_double(r(i, j));
    }
    out << '\n';
  }
}

inline void write_rates_triplets(std::ostream& out, const RateMatrix& r) {
  for (NodeId i = 0; i < r.size(); ++i)
    for (NodeId j = 0; j < r.size(); ++j)
      if (r(i, j) != 0.0) out << i << ' ' << j << ' ' << format_double(r(i, j)) << '\n';
}

inline RateMatrix read_rates_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    for (const auto& cell : split(line, ',')) row.push_back(parse_double(trim(cell)));
    rows.push_back(std::move(row));
  }
  RateMatrix r(rows.size());
  for (NodeId i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) {
      throw std::runtime_error("rate csv: row " + std::to_string(i) + " has " +
                               std::to_string(rows[i].size()) + " columns, expected " +
                               std::to_string(rows.size()));
    }
    for (NodeId j = 0; j < rows.size(); ++j) r(i, j) = rows[i][j];
  }
  return r;
}

inline RateMatrix read_rates_triplets(std::istream& in, std::size_t n) {
  RateMatrix r(n);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    long long i = -1, j = -1;
    std::string value, rest;
    if (!(ls >> i >> j >> value) || (ls >> rest) || i < 0 || j < 0 ||
        static_cast<std::size_t>(i) >= n || static_cast<std::size_t>(j) >= n) {
      throw std::runtime_error("rate triplets: malformed line " + std::to_string(lineno));
    }
    r(static_cast<NodeId>(i), static_cast<NodeId>(j)) = parse_double(value);
  }
  return r;
}

/// Sniffs the format: a comma anywhere means dense CSV, otherwise triplets.
inline RateMatrix parse_rates(const std::string& text, std::size_t n) {
  std::istringstream in(text);
  if (text.find(',') != std::string::npos) {
    RateMatrix r = read_rates_csv(in);
    if (r.size() != n) {
      throw std::invalid_argument("rate csv: dimension " + std::to_string(r.size()) +
                                  " does not match graph size " + std::to_string(n));
    }
    return r;
  }
  return read_rates_triplets(in, n);
}

}  // namespace likenet
