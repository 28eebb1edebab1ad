#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "likenet/graph.hpp"
#include "likenet/likedness.hpp"
#include "likenet/rate_matrix.hpp"
#include "likenet/rng.hpp"
#include "likenet/stability.hpp"
#include "likenet/text.hpp"

namespace likenet {

// Seed streams mixed into derive_seed alongside the record index.
inline constexpr std::uint64_t kGraphStream = 0;
inline constexpr std::uint64_t kRateStream = 1;
inline constexpr std::uint64_t kStarStream = 2;

struct EnsembleConfig {
  std::size_t sample_count = 10'000;
  std::size_t n = 10;
  std::size_t k = 2;
  double rate_lambda = 1.0;
  std::uint64_t master_seed = 1;
  SolverOptions solver;
  double strategic_fraction = 0.001;
  StrategicTail strategic_tail = StrategicTail::HighestStability;

  void validate() const {
    if (sample_count < 1) throw std::invalid_argument("config: sample_count must be >= 1");
    if (k < 1 || n < k) throw std::invalid_argument("config: need n >= k >= 1");
    if (!(rate_lambda > 0.0)) throw std::invalid_argument("config: rate_lambda must be > 0");
    if (!(strategic_fraction > 0.0 && strategic_fraction < 1.0)) {
      throw std::invalid_argument("config: strategic_fraction must lie in (0, 1)");
    }
    solver.validate();
  }
};

/// One directed like: `liker` likes `liked` at `rate` (= R(liked, liker)).
struct DirectedRate {
  NodeId liker;
  NodeId liked;
  double rate;

  friend bool operator==(const DirectedRate&, const DirectedRate&) = default;
};

struct SystemRecord {
  std::uint64_t record_index = 0;
  std::uint64_t graph_seed = 0;
  std::uint64_t rate_seed = 0;
  double stability = 1.0;
  double gradient_sq_sum = 0.0;
  std::vector<std::size_t> degree_histogram;
  double degree_stddev = 0.0;
  double mean_path_length = 0.0;
  double mean_local_clustering = 0.0;
  std::vector<DirectedRate> outgoing_rates;
  bool solver_converged = true;

  friend bool operator==(const SystemRecord&, const SystemRecord&) = default;
};

/// Independent Exp(lambda) draw for both directions of every edge, in sorted
/// edge order, (a, b) before (b, a). Off-edge entries stay 0.
inline RateMatrix sample_rates(const Graph& g, double rate_lambda, std::uint64_t seed) {
  if (!(rate_lambda > 0.0)) throw std::invalid_argument("sample_rates: rate_lambda must be > 0");
  std::mt19937_64 gen(seed);
  RateMatrix r(g.size());
  for (const auto& e : g.edges()) {
    r(e.first, e.second) = exponential(gen, rate_lambda);
    r(e.second, e.first) = exponential(gen, rate_lambda);
  }
  return r;
}

inline std::vector<DirectedRate> directed_rates(const Graph& g, const RateMatrix& r) {
  std::vector<DirectedRate> out;
  out.reserve(2 * g.edge_count());
  for (const auto& e : g.edges()) {
    out.push_back({e.second, e.first, r(e.first, e.second)});
    out.push_back({e.first, e.second, r(e.second, e.first)});
  }
  return out;
}

/// Evaluates one (G, R) system into a record.
inline SystemRecord evaluate_system(std::uint64_t index, std::uint64_t graph_seed,
                                    std::uint64_t rate_seed, const Graph& g,
                                    const RateMatrix& r, const SolverOptions& solver) {
  const auto st = stability(g, r, solver);
  const auto metrics = compute_metrics(g);
  SystemRecord rec;
  rec.record_index = index;
  rec.graph_seed = graph_seed;
  rec.rate_seed = rate_seed;
  rec.stability = st.stability;
  rec.gradient_sq_sum = st.gradient_sq_sum;
  rec.degree_histogram = metrics.degree_histogram;
  rec.degree_stddev = metrics.degree_stddev;
  rec.mean_path_length = metrics.mean_path_length;
  rec.mean_local_clustering = metrics.mean_local_clustering;
  rec.outgoing_rates = directed_rates(g, r);
  rec.solver_converged = st.solver_converged;
  return rec;
}

/// Record `index` of the ensemble; a pure function of (config, index).
inline SystemRecord make_record(const EnsembleConfig& config, std::uint64_t index) {
  const auto graph_seed = derive_seed(config.master_seed, index, kGraphStream);
  const auto rate_seed = derive_seed(config.master_seed, index, kRateStream);
  const Graph g = generate_ba(config.n, config.k, graph_seed);
  const RateMatrix r = sample_rates(g, config.rate_lambda, rate_seed);
  return evaluate_system(index, graph_seed, rate_seed, g, r, config.solver);
}

/// Rebuilds the graph and rate matrix a record was computed on. Every edge
/// appears in outgoing_rates in both directions, so the support is exact.
inline std::pair<Graph, RateMatrix> reconstruct_system(const SystemRecord& rec) {
  const std::size_t n = rec.degree_histogram.size();
  std::vector<Edge> edges;
  RateMatrix r(n);
  for (const auto& d : rec.outgoing_rates) {
    if (d.liker < d.liked) edges.push_back({d.liker, d.liked});
    r(d.liked, d.liker) = d.rate;
  }
  return {Graph(n, std::move(edges)), std::move(r)};
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json to_json(const SystemRecord& rec) {
  auto number = [](double x) -> nlohmann::json {
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
  };
  nlohmann::json rates = nlohmann::json::array();
  for (const auto& d : rec.outgoing_rates) rates.push_back({d.liker, d.liked, d.rate});
  nlohmann::json j;
  j["record_index"] = rec.record_index;
  j["graph_seed"] = rec.graph_seed;
  j["rate_seed"] = rec.rate_seed;
  j["stability"] = number(rec.stability);
  j["gradient_sq_sum"] = number(rec.gradient_sq_sum);
  j["degree_histogram"] = rec.degree_histogram;
  j["degree_stddev"] = number(rec.degree_stddev);
  j["mean_path_length"] = number(rec.mean_path_length);
  j["mean_local_clustering"] = number(rec.mean_local_clustering);
  j["outgoing_rates"] = std::move(rates);
  j["solver_converged"] = rec.solver_converged;
  return j;
}

inline SystemRecord record_from_json(const nlohmann::json& j) {
  auto number = [&](const char* key) {
    const auto& v = j.at(key);
    return v.is_null() ? std::nan("") : v.get<double>();
  };
  SystemRecord rec;
  rec.record_index = j.at("record_index").get<std::uint64_t>();
  rec.graph_seed = j.at("graph_seed").get<std::uint64_t>();
  rec.rate_seed = j.at("rate_seed").get<std::uint64_t>();
  rec.stability = number("stability");
  rec.gradient_sq_sum = number("gradient_sq_sum");
  rec.degree_histogram = j.at("degree_histogram").get<std::vector<std::size_t>>();
  rec.degree_stddev = number("degree_stddev");
  rec.mean_path_length = number("mean_path_length");
  rec.mean_local_clustering = number("mean_local_clustering");
  for (const auto& t : j.at("outgoing_rates")) {
    rec.outgoing_rates.push_back(
        {t.at(0).get<NodeId>(), t.at(1).get<NodeId>(), t.at(2).get<double>()});
  }
  rec.solver_converged = j.at("solver_converged").get<bool>();
  return rec;
}

inline std::string to_jsonl_line(const SystemRecord& rec) { return to_json(rec).dump(); }

inline const char* kCsvHeader =
    "record_index,stability,gradient_sq_sum,degree_stddev,mean_path_length,"
    "mean_local_clustering,solver_converged";

inline std::string to_csv_row(const SystemRecord& rec) {
  std::string row = std::to_string(rec.record_index);
  for (double x : {rec.stability, rec.gradient_sq_sum, rec.degree_stddev, rec.mean_path_length,
                   rec.mean_local_clustering}) {
    row += ',';
    row += format_double(x);
  }
  row += rec.solver_converged ? ",1" : ",0";
  return row;
}

/// Reads a JSONL record file. A trailing partial line (no newline and not
/// parseable) is ignored so an interrupted run can be resumed.
inline std::vector<SystemRecord> read_records(std::istream& in) {
  std::vector<SystemRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      if (in.eof()) break;
      throw std::runtime_error("records: malformed JSON on line " + std::to_string(lineno));
    }
    out.push_back(record_from_json(j));
  }
  return out;
}

inline std::vector<SystemRecord> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open record file '" + path + "'");
  return read_records(in);
}

inline std::vector<double> stabilities(const std::vector<SystemRecord>& records) {
  std::vector<double> s;
  s.reserve(records.size());
  for (const auto& r : records) s.push_back(r.stability);
  return s;
}

/// Splits records into strategic and remaining sets (see classify_strategic).
struct RecordPartition {
  std::vector<SystemRecord> strategic;
  std::vector<SystemRecord> rest;
  double threshold = 0.0;
};

inline RecordPartition classify_strategic(const std::vector<SystemRecord>& records,
                                          double fraction,
                                          StrategicTail tail = StrategicTail::HighestStability) {
  const auto part = classify_strategic(stabilities(records), fraction, tail);
  RecordPartition out;
  out.threshold = part.threshold;
  for (auto i : part.strategic) out.strategic.push_back(records[i]);
  for (auto i : part.population) out.rest.push_back(records[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Summary

/// Linear-interpolation quantile (Hyndman-Fan type 7) of sorted data.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty input");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline const std::vector<double>& summary_probabilities() {
  static const std::vector<double> probs{0.0,  0.001, 0.01, 0.1,  0.25, 0.5,
                                         0.75, 0.9,   0.99, 0.999, 1.0};
  return probs;
}

struct EnsembleSummary {
  std::size_t count = 0;
  std::size_t nonconverged = 0;
  std::vector<std::pair<double, double>> stability_quantiles;  // (p, value)
  double strategic_threshold = 0.0;
  std::size_t strategic_count = 0;
};

inline EnsembleSummary summarize(const std::vector<SystemRecord>& records,
                                 const EnsembleConfig& config) {
  EnsembleSummary s;
  s.count = records.size();
  for (const auto& r : records) s.nonconverged += r.solver_converged ? 0 : 1;
  if (records.empty()) return s;
  auto sorted = stabilities(records);
  std::sort(sorted.begin(), sorted.end());
  for (double p : summary_probabilities()) s.stability_quantiles.emplace_back(p, quantile_sorted(sorted, p));
  const auto part = classify_strategic(stabilities(records), config.strategic_fraction,
                                       config.strategic_tail);
  s.strategic_threshold = part.threshold;
  s.strategic_count = part.strategic.size();
  return s;
}

inline nlohmann::json to_json(const EnsembleSummary& s) {
  nlohmann::json q = nlohmann::json::array();
  for (const auto& [p, v] : s.stability_quantiles) q.push_back({{"p", p}, {"value", v}});
  return {{"count", s.count},
          {"nonconverged", s.nonconverged},
          {"stability_quantiles", q},
          {"strategic_threshold", s.strategic_threshold},
          {"strategic_count", s.strategic_count}};
}

// ---------------------------------------------------------------------------
// Runner

struct RunOptions {
  std::size_t workers = 1;
  std::uint64_t first_index = 0;  // resume point; records before it are skipped
  std::function<void(const std::string&)> log;  // progress lines, may be empty
};

/// Computes records [first_index, sample_count) with `workers` threads and
/// hands them to `sink` strictly in record_index order, so the output stream
/// does not depend on the worker count. The sink runs under a lock.
inline void run_ensemble(const EnsembleConfig& config, const RunOptions& run,
                         const std::function<void(const SystemRecord&)>& sink) {
  config.validate();
  const std::uint64_t total = config.sample_count;
  if (run.first_index >= total) return;
  const std::size_t workers = std::max<std::size_t>(1, run.workers);

  std::atomic<std::uint64_t> next{run.first_index};
  std::mutex mu;
  std::map<std::uint64_t, SystemRecord> pending;
  std::uint64_t flushed = run.first_index;
  std::uint64_t last_decile = 0;
  std::exception_ptr failure;
  std::atomic<bool> abort{false};

  auto work = [&] {
    for (;;) {
      if (abort.load()) return;
      const std::uint64_t index = next.fetch_add(1);
      if (index >= total) return;
      try {
        SystemRecord rec = make_record(config, index);
        std::lock_guard lock(mu);
        pending.emplace(index, std::move(rec));
        while (!pending.empty() && pending.begin()->first == flushed) {
          sink(pending.begin()->second);
          pending.erase(pending.begin());
          ++flushed;
          const std::uint64_t decile = flushed * 10 / total;
          if (run.log && decile > last_decile) {
            last_decile = decile;
            run.log("ensemble: " + std::to_string(flushed) + "/" + std::to_string(total) +
                    " records (" + std::to_string(decile * 10) + "%)");
          }
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        abort = true;
        return;
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

/// Convenience: collect the whole ensemble in memory.
inline std::vector<SystemRecord> collect_ensemble(const EnsembleConfig& config,
                                                  std::size_t workers = 1) {
  std::vector<SystemRecord> out;
  out.reserve(config.sample_count);
  run_ensemble(config, {workers, 0, {}}, [&](const SystemRecord& r) { out.push_back(r); });
  return out;
}

}  // namespace likenet
