// likenet: command-line driver for likedness centrality experiments.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "likenet/analysis.hpp"
#include "likenet/config.hpp"
#include "likenet/ensemble.hpp"
#include "likenet/graph.hpp"
#include "likenet/likedness.hpp"
#include "likenet/rate_matrix.hpp"
#include "likenet/stability.hpp"

namespace fs = std::filesystem;
using namespace likenet;

namespace {

void log_line(const std::string& msg) { std::cerr << "[likenet] " << msg << '\n'; }

/// Writes to "<path>.tmp" and renames on commit; an uncommitted file is
/// removed, so a failed command never leaves a partial artifact behind.
class AtomicFile {
 public:
  explicit AtomicFile(fs::path path) : path_(std::move(path)), tmp_(path_.string() + ".tmp") {
    if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open '" + tmp_.string() + "' for writing");
  }
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;
  ~AtomicFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      fs::remove(tmp_, ec);
    }
  }

  std::ostream& stream() { return out_; }

  void commit() {
    out_.flush();
    if (!out_) throw std::runtime_error("write failed for '" + path_.string() + "'");
    out_.close();
    fs::rename(tmp_, path_);
    committed_ = true;
  }

 private:
  fs::path path_;
  fs::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

void write_text(const fs::path& path, const std::string& text) {
  AtomicFile f(path);
  f.stream() << text;
  f.commit();
}

std::string read_text(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(std::string("cannot open ") + what + " file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Flags shared by every subcommand. Anything left unset falls back to the
/// environment (LIKENET_<FLAG>) and then to the --config file.
struct CommonFlags {
  std::optional<std::size_t> n, k, samples, max_iter, workers;
  std::optional<double> lambda, tolerance, relaxation, strategic_fraction;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> tail;
  std::string config;
  std::string out;

  void attach(CLI::App* app) {
    app->add_option("--n", n, "node count");
    app->add_option("--k", k, "attachment parameter for Barabasi-Albert graphs");
    app->add_option("--samples", samples, "ensemble sample count");
    app->add_option("--lambda", lambda, "exponential rate parameter of sampled like rates");
    app->add_option("--seed", seed, "master RNG seed");
    app->add_option("--workers", workers, "worker threads");
    app->add_option("--config", config, "key = value configuration file");
    app->add_option("--out", out, "output file or directory");
    app->add_option("--tolerance", tolerance, "solver residual tolerance");
    app->add_option("--max-iter", max_iter, "solver iteration cap");
    app->add_option("--relaxation", relaxation, "solver damping factor in (0, 1]");
    app->add_option("--strategic-fraction", strategic_fraction, "fraction of records deemed strategic");
    app->add_option("--strategic-tail", tail, "which stability tail is strategic: highest | lowest");
  }

  Settings flag_settings() const {
    Settings s;
    auto put = [&](const char* key, const auto& opt) {
      if (opt) {
        std::ostringstream v;
        v.precision(17);
        v << *opt;
        s[canonical_key(key)] = v.str();
      }
    };
    put("n", n);
    put("k", k);
    put("samples", samples);
    put("lambda", lambda);
    put("seed", seed);
    put("workers", workers);
    put("tolerance", tolerance);
    put("max-iter", max_iter);
    put("relaxation", relaxation);
    put("strategic-fraction", strategic_fraction);
    put("strategic-tail", tail);
    return s;
  }

  /// Effective configuration: defaults < config file < environment < flags.
  std::pair<EnsembleConfig, std::size_t> resolve() const {
    Settings layered;
    if (!config.empty()) layered = load_settings(config);
    layered = merge(layered, env_settings("LIKENET_", {"n", "k", "samples", "lambda", "seed",
                                                       "workers", "tolerance", "max-iter",
                                                       "relaxation", "strategic-fraction",
                                                       "strategic-tail"}));
    layered = merge(layered, flag_settings());
    std::size_t worker_count = 1;
    if (auto it = layered.find("workers"); it != layered.end()) {
      worker_count = static_cast<std::size_t>(std::stoull(it->second));
      layered.erase(it);
    }
    EnsembleConfig cfg;
    const auto unknown = apply_settings(cfg, layered);
    if (!unknown.empty()) throw std::invalid_argument("unknown configuration key '" + unknown.begin()->first + "'");
    cfg.validate();
    return {cfg, worker_count};
  }
};

Graph load_graph(const std::string& path) { return parse_edge_list(read_text(path, "graph")); }

RateMatrix load_rates(const std::string& path, const Graph& g) {
  RateMatrix r = parse_rates(read_text(path, "rate"), g.size());
  check_compatible(g, r);
  return r;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) {
    if (!trim(part).empty()) out.push_back(parse_double(trim(part)));
  }
  return out;
}

// ---------------------------------------------------------------------------

int cmd_generate(const CommonFlags& flags, const std::string& model) {
  const auto [cfg, workers] = flags.resolve();
  (void)workers;
  Graph g;
  if (model == "ba") g = generate_ba(cfg.n, cfg.k, cfg.master_seed);
  else if (model == "star") g = generate_star(cfg.n);
  else throw std::invalid_argument("unknown --model '" + model + "' (expected ba or star)");
  if (flags.out.empty()) {
    write_edge_list(std::cout, g);
  } else {
    write_text(flags.out, to_edge_list(g));
    log_line("wrote " + std::to_string(g.edge_count()) + " edges to " + flags.out);
  }
  return 0;
}

int cmd_solve(const CommonFlags& flags, const std::string& graph_path,
              const std::string& rates_path, const std::string& measure) {
  const auto [cfg, workers] = flags.resolve();
  (void)workers;
  const Graph g = load_graph(graph_path);
  const RateMatrix r = load_rates(rates_path, g);
  CentralityVector c;
  if (measure == "likedness") c = likedness_centrality(g, r, cfg.solver);
  else if (measure == "eigenvector") c = eigenvector_centrality(g, r, cfg.solver);
  else throw std::invalid_argument("unknown --measure '" + measure + "' (expected likedness or eigenvector)");

  std::ostringstream out;
  out << "node,centrality,raw,converged,iterations\n";
  for (NodeId i = 0; i < g.size(); ++i) {
    out << i << ',' << format_double(c.values[i]) << ',' << format_double(c.raw[i]) << ','
        << (c.converged ? 1 : 0) << ',' << c.iterations << '\n';
  }
  if (flags.out.empty()) std::cout << out.str();
  else write_text(flags.out, out.str());
  if (!c.converged) log_line("warning: solver did not converge (residual " + format_double(c.residual) + ")");
  return 0;
}

int cmd_stability(const CommonFlags& flags, const std::string& graph_path,
                  const std::string& rates_path) {
  const auto [cfg, workers] = flags.resolve();
  (void)workers;
  const Graph g = load_graph(graph_path);
  const RateMatrix r = load_rates(rates_path, g);
  const auto st = stability(g, r, cfg.solver);
  nlohmann::json grads = nlohmann::json::array();
  for (const auto& d : st.per_edge_gradients) {
    grads.push_back({{"node", d.node}, {"likes", d.target}, {"gradient", d.value}});
  }
  nlohmann::json j{{"stability", st.stability},
                   {"gradient_sq_sum", st.gradient_sq_sum},
                   {"solver_converged", st.solver_converged},
                   {"centrality", st.centrality.values},
                   {"per_edge_gradients", grads}};
  if (flags.out.empty()) std::cout << j.dump(2) << '\n';
  else write_text(flags.out, j.dump(2) + "\n");
  return 0;
}

/// Number of complete records already in a JSONL file, truncating any
/// trailing partial line.
std::uint64_t prepare_resume(const fs::path& jsonl, const fs::path& csv) {
  if (!fs::exists(jsonl)) return 0;
  std::string text = read_text(jsonl.string(), "record");
  const auto last_nl = text.rfind('\n');
  text.resize(last_nl == std::string::npos ? 0 : last_nl + 1);
  std::istringstream in(text);
  const auto records = read_records(in);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].record_index != i) throw std::runtime_error("resume: record file is not in canonical order");
  }
  fs::resize_file(jsonl, text.size());
  std::ofstream rewrite(csv, std::ios::binary | std::ios::trunc);
  rewrite << kCsvHeader << '\n';
  for (const auto& rec : records) rewrite << to_csv_row(rec) << '\n';
  return records.size();
}

int cmd_ensemble(const CommonFlags& flags, bool resume) {
  const auto [cfg, workers] = flags.resolve();
  const fs::path dir = flags.out.empty() ? fs::path("ensemble_out") : fs::path(flags.out);
  fs::create_directories(dir);
  const fs::path jsonl = dir / "records.jsonl";
  const fs::path csv = dir / "records.csv";

  std::uint64_t first = 0;
  if (resume) {
    first = prepare_resume(jsonl, csv);
    log_line("resuming at record " + std::to_string(first));
  }
  // Records stream straight to disk; on failure the partial files are
  // removed unless resuming, where they stay as a valid prefix.
  std::ofstream jout(jsonl, std::ios::binary | (first ? std::ios::app : std::ios::trunc));
  std::ofstream cout_(csv, std::ios::binary | (first ? std::ios::app : std::ios::trunc));
  if (!jout || !cout_) throw std::runtime_error("cannot open record files in '" + dir.string() + "'");
  if (first == 0) cout_ << kCsvHeader << '\n';

  log_line("ensemble: " + std::to_string(cfg.sample_count) + " samples, n=" + std::to_string(cfg.n) +
           ", k=" + std::to_string(cfg.k) + ", workers=" + std::to_string(workers));
  try {
    run_ensemble(cfg, {workers, first, log_line}, [&](const SystemRecord& rec) {
      jout << to_jsonl_line(rec) << '\n';
      cout_ << to_csv_row(rec) << '\n';
      if (!jout || !cout_) throw std::runtime_error("write failed in '" + dir.string() + "'");
    });
    jout.close();
    cout_.close();
  } catch (...) {
    jout.close();
    cout_.close();
    if (!resume) {
      std::error_code ec;
      fs::remove(jsonl, ec);
      fs::remove(csv, ec);
    }
    throw;
  }

  const auto records = load_records(jsonl.string());
  const auto summary = summarize(records, cfg);
  write_text(dir / "summary.json", to_json(summary).dump(2) + "\n");
  write_text(dir / "config.txt", to_config_text(cfg));
  log_line("ensemble: done, " + std::to_string(summary.nonconverged) + " non-converged of " +
           std::to_string(summary.count));
  return 0;
}

void write_series(const fs::path& path, const BinnedSeries& s) {
  std::ostringstream out;
  write_series_csv(out, s);
  write_text(path, out.str());
}

int cmd_analyze(const CommonFlags& flags, const std::string& records_path,
                const std::string& strategic_path) {
  const auto [cfg, workers] = flags.resolve();
  (void)workers;
  const auto population = load_records(records_path);
  if (population.empty()) throw std::runtime_error("analyze: record file '" + records_path + "' is empty");
  const fs::path dir = flags.out.empty() ? fs::path("analysis_out") : fs::path(flags.out);

  auto strategic_of = [&](const std::vector<SystemRecord>& pop, double* threshold) {
    if (!strategic_path.empty()) return load_records(strategic_path);
    auto part = classify_strategic(pop, cfg.strategic_fraction, cfg.strategic_tail);
    *threshold = part.threshold;
    return part.strategic;
  };

  nlohmann::json summary;
  summary["strategic_tail"] = tail_name(cfg.strategic_tail);
  summary["strategic_fraction"] = cfg.strategic_fraction;

  double threshold = std::nan("");
  const auto strategic = strategic_of(population, &threshold);
  if (strategic.empty()) throw std::runtime_error("analyze: strategic record set is empty");
  const auto report = analyze_records(strategic, population, cfg.rate_lambda);
  summary["all"] = summary_json(report, cfg.rate_lambda);
  summary["all"]["strategic_threshold"] = optional_json(threshold);

  std::vector<SystemRecord> converged;
  for (const auto& r : population)
    if (r.solver_converged) converged.push_back(r);
  summary["converged_only"] = nullptr;
  if (!converged.empty() && converged.size() != population.size()) {
    double t2 = std::nan("");
    const auto strategic2 = strategic_of(converged, &t2);
    summary["converged_only"] = summary_json(analyze_records(strategic2, converged, cfg.rate_lambda), cfg.rate_lambda);
    summary["converged_only"]["strategic_threshold"] = optional_json(t2);
  } else if (converged.size() == population.size()) {
    summary["converged_only"] = "identical to all (every record converged)";
  }

  write_series(dir / "rate_representation.csv", report.rates.series);
  write_series(dir / "degree_representation.csv", report.degrees.series);
  write_series(dir / "stability_vs_mean_path_length.csv", report.path_length.series);
  write_series(dir / "stability_vs_mean_local_clustering.csv", report.clustering.series);
  write_series(dir / "stability_vs_degree_stddev.csv", report.degree_spread.series);
  write_series(dir / "reciprocity.csv", report.reciprocity);
  {
    std::ostringstream scatter;
    scatter << "record_index,mean_local_clustering,stability,mean_path_length\n";
    for (const auto& r : population) {
      scatter << r.record_index << ',' << format_double(r.mean_local_clustering) << ','
              << format_double(r.stability) << ',' << format_double(r.mean_path_length) << '\n';
    }
    write_text(dir / "clustering_scatter.csv", scatter.str());
  }
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  log_line("analyze: " + std::to_string(strategic.size()) + " strategic of " +
           std::to_string(population.size()) + " records; outputs in " + dir.string());
  return 0;
}

int cmd_coalition(const CommonFlags& flags, const std::string& graph_path,
                  const std::string& rates_path, std::optional<std::size_t> a,
                  std::optional<std::size_t> b, const std::string& joint_rates) {
  const auto [cfg, workers] = flags.resolve();
  (void)workers;
  Graph g;
  RateMatrix r;
  if (graph_path.empty()) {
    // Seeded instance: record 0 of the configured ensemble.
    g = generate_ba(cfg.n, cfg.k, derive_seed(cfg.master_seed, 0, kGraphStream));
    r = sample_rates(g, cfg.rate_lambda, derive_seed(cfg.master_seed, 0, kRateStream));
  } else {
    if (rates_path.empty()) throw std::invalid_argument("coalition: --rates is required with --graph");
    g = load_graph(graph_path);
    r = load_rates(rates_path, g);
  }
  auto pair = outlying_pair(g);
  if (a && b) pair = {*a, *b};
  else if (a || b) throw std::invalid_argument("coalition: give both --a and --b or neither");

  std::vector<double> rates = parse_list(joint_rates);
  if (rates.empty()) throw std::invalid_argument("coalition: empty --joint-rates list");
  const auto sweep = coalition_sweep(g, r, pair.first, pair.second, rates, cfg.solver);

  std::ostringstream out;
  out << "joint_rate,member_a,member_b,others_mean,converged\n";
  for (const auto& p : sweep) {
    out << format_double(p.joint_rate) << ',' << format_double(p.member_a) << ','
        << format_double(p.member_b) << ',' << format_double(p.others_mean) << ','
        << (p.converged ? 1 : 0) << '\n';
  }
  if (flags.out.empty()) std::cout << out.str();
  else write_text(flags.out, out.str());
  log_line("coalition: members " + std::to_string(pair.first) + " and " + std::to_string(pair.second));
  return 0;
}

int cmd_star_compare(const CommonFlags& flags, const std::string& records_path, std::size_t stars) {
  const auto [cfg, workers] = flags.resolve();
  (void)workers;
  const auto records = load_records(records_path);
  const auto cmp = star_comparison(records, stars, cfg);
  for (const auto& w : cmp.warnings) log_line("warning: " + w);
  const auto text = to_json(cmp).dump(2) + "\n";
  if (flags.out.empty()) std::cout << text;
  else write_text(flags.out, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"likenet: likedness centrality, stability ensembles, and their analyses"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string model = "ba", measure = "likedness";
  std::string graph_path, rates_path, records_path, strategic_path;
  std::string joint_rates = "0.25,0.5,1,2,4,8,16,32";
  std::optional<std::size_t> member_a, member_b;
  std::size_t stars = 1000;
  bool resume = false;

  auto* gen = app.add_subcommand("generate", "write a graph as an edge list");
  flags.attach(gen);
  gen->add_option("--model", model, "ba | star")->capture_default_str();

  auto* solve = app.add_subcommand("solve", "centrality of one (graph, rates) system");
  flags.attach(solve);
  solve->add_option("--graph", graph_path, "edge-list file")->required();
  solve->add_option("--rates", rates_path, "dense CSV or 'i j rate' triplet file")->required();
  solve->add_option("--measure", measure, "likedness | eigenvector")->capture_default_str();

  auto* stab = app.add_subcommand("stability", "stability and per-edge gradients of one system");
  flags.attach(stab);
  stab->add_option("--graph", graph_path, "edge-list file")->required();
  stab->add_option("--rates", rates_path, "dense CSV or 'i j rate' triplet file")->required();

  auto* ens = app.add_subcommand("ensemble", "sample systems and write JSONL/CSV records");
  flags.attach(ens);
  ens->add_flag("--resume", resume, "continue an interrupted run in the same --out directory");

  auto* an = app.add_subcommand("analyze", "representation, correlation and regression outputs");
  flags.attach(an);
  an->add_option("--records", records_path, "population JSONL records")->required();
  an->add_option("--strategic-records", strategic_path, "explicit strategic JSONL set");

  auto* co = app.add_subcommand("coalition", "sweep a joint mutual like rate for two nodes");
  flags.attach(co);
  co->add_option("--graph", graph_path, "edge-list file (default: seeded BA instance)");
  co->add_option("--rates", rates_path, "rate file for --graph");
  co->add_option("--a", member_a, "first coalition member");
  co->add_option("--b", member_b, "second coalition member");
  co->add_option("--joint-rates", joint_rates, "comma-separated joint rates")->capture_default_str();

  auto* sc = app.add_subcommand("star-compare", "random-rate stars against BA graphs with a full hub");
  flags.attach(sc);
  sc->add_option("--records", records_path, "BA ensemble JSONL records")->required();
  sc->add_option("--stars", stars, "number of star samples")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_generate(flags, model);
    if (*solve) return cmd_solve(flags, graph_path, rates_path, measure);
    if (*stab) return cmd_stability(flags, graph_path, rates_path);
    if (*ens) return cmd_ensemble(flags, resume);
    if (*an) return cmd_analyze(flags, records_path, strategic_path);
    if (*co) return cmd_coalition(flags, graph_path, rates_path, member_a, member_b, joint_rates);
    if (*sc) return cmd_star_compare(flags, records_path, stars);
  } catch (const std::exception& e) {
    log_line(std::string("error: ") + e.what());
    return 1;
  }
  return 1;
}
