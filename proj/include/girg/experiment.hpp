#pragma once

// Scenario configuration, CSV output and the scenario runner behind the
// girglab command-line tool.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "girg/cliques.hpp"
#include "girg/distribution.hpp"
#include "girg/estimators.hpp"
#include "girg/graph.hpp"
#include "girg/model.hpp"
#include "girg/samplers.hpp"
#include "girg/theory.hpp"

namespace girg {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// Raised for unusable configurations, before any computation starts.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Scenario {
  generate,
  cliques,
  qk,
  star_cond,
  triangle_cond,
  bounds,
  tv_curve,
  covariance,
  table1_sweep,
  table2_sweep,
  table3_sweep
};

inline const std::vector<std::pair<std::string, Scenario>>& scenario_names() {
  static const std::vector<std::pair<std::string, Scenario>> names = {
      {"generate", Scenario::generate},         {"cliques", Scenario::cliques},
      {"qk", Scenario::qk},                     {"star-cond", Scenario::star_cond},
      {"triangle-cond", Scenario::triangle_cond}, {"bounds", Scenario::bounds},
      {"tv-curve", Scenario::tv_curve},         {"covariance", Scenario::covariance},
      {"table1-sweep", Scenario::table1_sweep}, {"table2-sweep", Scenario::table2_sweep},
      {"table3-sweep", Scenario::table3_sweep}};
  return names;
}

inline Scenario parse_scenario(const std::string& s) {
  for (const auto& [name, sc] : scenario_names())
    if (name == s) return sc;
  throw ConfigError("unknown scenario '" + s + "'");
}

inline std::string to_string(Scenario s) {
  for (const auto& [name, sc] : scenario_names())
    if (sc == s) return name;
  return "?";
}

inline DimRegime parse_dim_regime(const std::string& s) {
  if (s == "constant") return DimRegime::constant;
  if (s == "loglog") return DimRegime::loglog;
  if (s == "sublog") return DimRegime::sublog;
  if (s == "superlog") return DimRegime::superlog;
  if (s == "superlog2") return DimRegime::superlog_squared;
  throw ConfigError("unknown d_regime '" + s + "'");
}

struct ScenarioConfig {
  Scenario scenario = Scenario::generate;
  ModelParams params;
  std::uint64_t trials = 0;  // 0 selects default_trials(scenario)
  std::uint64_t seed = 1;
  std::string output_path = "girglab.csv";
  bool deterministic = false;
  unsigned threads = Parallelism{}.threads;

  std::vector<std::uint64_t> n_list;
  std::vector<int> d_list;
  std::vector<double> beta_list;
  std::vector<int> k_list;
  std::vector<double> a_list;
  std::vector<double> weights;
  double ratio_c = 1.0;
  double t0 = 0.1;
  std::string d_regime = "constant";

  /// Raw key/value echo for the manifest.
  std::map<std::string, std::string> entries;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  T value{};
  if constexpr (std::is_floating_point_v<T>) {
    if (s == "inf" || s == "infinity") return std::numeric_limits<T>::infinity();
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError("cannot parse value '" + s + "' for key '" + key + "'");
  return value;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    // a:b expands to the powers of two 2^a..2^b
    const auto colon = t.find(':');
    if (colon != std::string::npos && key != "weights") {
      const int lo = parse_number<int>(key, t.substr(0, colon)), hi = parse_number<int>(key, t.substr(colon + 1));
      if (lo > hi || lo < 0 || hi > 62) throw ConfigError("bad power-of-two range in key '" + key + "'");
      for (int e = lo; e <= hi; ++e) out.push_back(static_cast<T>(std::uint64_t{1} << e));
    } else {
      out.push_back(parse_number<T>(key, t));
    }
  }
  if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
  return out;
}

}  // namespace detail

/// Parses "key = value" lines; '#' starts a comment.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    out[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  return out;
}

inline std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Applies key/value entries on top of `cfg`; later calls win.
inline void apply_entries(ScenarioConfig& cfg, const std::map<std::string, std::string>& entries) {
  using detail::parse_list;
  using detail::parse_number;
  for (const auto& [key, value] : entries) {
    if (key == "scenario") cfg.scenario = parse_scenario(value);
    else if (key == "n") cfg.params.n = parse_number<std::uint64_t>(key, value);
    else if (key == "beta") cfg.params.beta = parse_number<double>(key, value);
    else if (key == "w0") cfg.params.w0 = parse_number<double>(key, value);
    else if (key == "lambda") cfg.params.lambda = parse_number<double>(key, value);
    else if (key == "d") cfg.params.d = parse_number<int>(key, value);
    else if (key == "p") {
      const double p = parse_number<double>(key, value);
      try {
        cfg.params.norm = Norm::lp(p);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "trials") cfg.trials = parse_number<std::uint64_t>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "out") cfg.output_path = value;
    else if (key == "deterministic") cfg.deterministic = value == "true" || value == "1";
    else if (key == "threads") cfg.threads = parse_number<unsigned>(key, value);
    else if (key == "n_list") cfg.n_list = parse_list<std::uint64_t>(key, value);
    else if (key == "d_list") cfg.d_list = parse_list<int>(key, value);
    else if (key == "beta_list") cfg.beta_list = parse_list<double>(key, value);
    else if (key == "k_list") cfg.k_list = parse_list<int>(key, value);
    else if (key == "a_list") cfg.a_list = parse_list<double>(key, value);
    else if (key == "weights") cfg.weights = parse_list<double>(key, value);
    else if (key == "ratio_c") cfg.ratio_c = parse_number<double>(key, value);
    else if (key == "t0") cfg.t0 = parse_number<double>(key, value);
    else if (key == "d_regime") {
      parse_dim_regime(value);
      cfg.d_regime = value;
    } else throw ConfigError("unknown key '" + key + "'");
    cfg.entries[key] = value;
  }
}

/// Trial or graph count used when the configuration does not set one.
inline std::uint64_t default_trials(Scenario s) {
  switch (s) {
    case Scenario::generate: return 1;
    case Scenario::cliques: return 10;
    case Scenario::covariance: return 1000000;
    case Scenario::table1_sweep:
    case Scenario::table2_sweep:
    case Scenario::table3_sweep: return 50;
    default: return 100000;
  }
}

/// Fills default axes and rejects infeasible configurations.
inline void finalize_config(ScenarioConfig& cfg) {
  if (cfg.trials == 0) cfg.trials = default_trials(cfg.scenario);
  if (cfg.n_list.empty()) cfg.n_list = {cfg.params.n};
  if (cfg.d_list.empty()) {
    if (cfg.scenario == Scenario::tv_curve)
      for (int e = 0; e <= 12; ++e) cfg.d_list.push_back(1 << e);
    else
      cfg.d_list = {cfg.params.d};
  }
  if (cfg.beta_list.empty()) cfg.beta_list = {cfg.params.beta};
  if (cfg.k_list.empty()) cfg.k_list = {3};
  if (cfg.a_list.empty()) cfg.a_list = {2.0 / 3.0, 0.8, 0.9, 0.95};
  if (cfg.trials < 1) throw ConfigError("trials must be at least 1");
  if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
  try {
    cfg.params.validate();
    for (auto n : cfg.n_list) {
      auto p = cfg.params;
      p.n = n;
      p.validate();
    }
    for (double b : cfg.beta_list) {
      auto p = cfg.params;
      p.beta = b;
      p.validate();
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (int d : cfg.d_list)
    if (d < 1) throw ConfigError("dimensions must be positive");
  for (int k : cfg.k_list)
    if (k < 1) throw ConfigError("clique sizes must be positive");
  if (cfg.scenario == Scenario::tv_curve) {
    const std::size_t n = cfg.weights.empty() ? cfg.params.n : cfg.weights.size();
    if (n > kMaxEnumerableVertices)
      throw ConfigError("tv-curve enumerates all labelled graphs and supports n <= 6, got n = " + std::to_string(n));
    if (!cfg.weights.empty() && cfg.weights.size() != cfg.params.n)
      throw ConfigError("tv-curve: weights list length must equal n");
  }
  if (cfg.scenario == Scenario::star_cond || cfg.scenario == Scenario::triangle_cond ||
      cfg.scenario == Scenario::bounds) {
    if (!cfg.params.norm.is_linf()) throw ConfigError(to_string(cfg.scenario) + " requires p = inf");
  }
  if (cfg.scenario == Scenario::star_cond) {
    if (!(cfg.ratio_c >= 1.0)) throw ConfigError("ratio_c must be at least 1");
    if (!(cfg.t0 > 0.0 && cfg.t0 < 0.5)) throw ConfigError("t0 must lie in (0, 1/2)");
    for (int k : cfg.k_list)
      if (k < 2 || k > 64) throw ConfigError("star-cond needs 2 <= k <= 64");
  }
  if (cfg.scenario == Scenario::triangle_cond)
    for (double a : cfg.a_list)
      if (!(a >= 2.0 / 3.0 - 1e-12 && a <= 1.0)) throw ConfigError("a_list entries must lie in [2/3, 1]");
  if (cfg.scenario == Scenario::table1_sweep || cfg.scenario == Scenario::table2_sweep ||
      cfg.scenario == Scenario::table3_sweep) {
    if (cfg.n_list.size() < 3) throw ConfigError("sweeps need at least three values in n_list");
  }
  if (cfg.scenario == Scenario::qk)
    for (int k : cfg.k_list)
      if (k < 2 || k > 64) throw ConfigError("qk needs 2 <= k <= 64");
  if (cfg.scenario == Scenario::table1_sweep)
    for (int k : cfg.k_list)
      if (k < 3) throw ConfigError("table1-sweep needs k >= 3");
}

struct SlopeFit {
  double slope;
  double std_error;
};

/// Least-squares slope of ln(value) against ln(x).
inline SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& series) {
  if (series.size() < 3) throw std::invalid_argument("fit_loglog_slope: need at least three points");
  std::vector<double> xs, ys;
  for (auto [x, y] : series) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::domain_error("fit_loglog_slope: values must be positive");
    xs.push_back(std::log(x));
    ys.push_back(std::log(y));
  }
  const double m = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::domain_error("fit_loglog_slope: x values are all equal");
  const double slope = sxy / sxx;
  double ssr = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - my - slope * (xs[i] - mx);
    ssr += r * r;
  }
  return {slope, std::sqrt(ssr / (m - 2.0) / sxx)};
}

/// Shortest round-trip decimal form.
inline std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

inline std::string format_number(std::uint64_t x) { return std::to_string(x); }
inline std::string format_number(int x) { return std::to_string(x); }

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

  template <class... Ts>
  void row(const Ts&... cells) {
    std::vector<std::string> r;
    (r.push_back(cell(cells)), ...);
    if (r.size() != header_.size()) throw std::logic_error("CsvWriter: row width differs from header");
    rows_.push_back(std::move(r));
  }

  void raw_row(std::vector<std::string> r) {
    if (r.size() != header_.size()) throw std::logic_error("CsvWriter: row width differs from header");
    rows_.push_back(std::move(r));
  }

  std::string str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
      out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(bool b) { return b ? "true" : "false"; }
  static std::string cell(double x) { return format_number(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(unsigned x) { return std::to_string(x); }
  static std::string cell(std::uint64_t x) { return std::to_string(x); }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct ScenarioResult {
  std::string primary_output;  // CSV text or edge list
  nlohmann::ordered_json manifest;
};

namespace detail {

inline std::string norm_name(const ModelParams& p) { return p.norm.to_string(); }

inline std::string optional_number(const std::optional<double>& x) { return x ? format_number(*x) : ""; }

inline Parallelism parallelism(const ScenarioConfig& cfg) { return {cfg.threads}; }

inline GraphSample sample_model(const ModelParams& p, const WeightSequence& w, const SeededStream& s) {
  return sample_girg_auto(p, w, s);
}

inline std::string run_generate(const ScenarioConfig& cfg) {
  const SeededStream rng(cfg.seed);
  const auto w = sample_weights(cfg.params, rng);
  const auto g = sample_model(cfg.params, w, rng);
  std::ostringstream out;
  write_edge_list(out, g, {cfg.params.n, params_digest(cfg.params), cfg.seed});
  return out.str();
}

inline std::string run_cliques(const ScenarioConfig& cfg) {
  std::vector<std::string> header = {"n", "beta", "w0", "lambda", "d", "p", "seed", "graph", "edges"};
  for (int k : cfg.k_list) header.push_back("K" + std::to_string(k));
  header.push_back("omega");
  for (int i = 1; i <= 10; ++i) header.push_back("tri_incidence_decile" + std::to_string(i));
  CsvWriter csv(header);
  std::uint64_t point = 0;
  for (auto n : cfg.n_list)
    for (double beta : cfg.beta_list)
      for (int d : cfg.d_list) {
        ModelParams p = cfg.params;
        p.n = n;
        p.beta = beta;
        p.d = d;
        const SeededStream base = SeededStream(cfg.seed).substream(point++);
        struct Row {
          std::uint64_t edges;
          std::vector<std::uint64_t> counts;
          int omega;
          std::vector<std::uint64_t> deciles;
        };
        auto rows = parallel_map<Row>(cfg.trials, parallelism(cfg), [&](std::uint64_t i) {
          const SeededStream s = base.substream(i);
          const auto w = sample_weights(p, s);
          const auto g = sample_model(p, w, s);
          Row r{g.edge_count(), {}, clique_number(g), std::vector<std::uint64_t>(10, 0)};
          for (int k : cfg.k_list) r.counts.push_back(count_k_cliques(g, k));
          std::vector<Vertex> order(n);
          for (Vertex v = 0; v < n; ++v) order[v] = v;
          std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return w[a] < w[b]; });
          const auto tri = triangles_per_vertex(g);
          for (std::size_t rank = 0; rank < n; ++rank) r.deciles[rank * 10 / n] += tri[order[rank]];
          return r;
        });
        for (std::uint64_t i = 0; i < cfg.trials; ++i) {
          std::vector<std::string> cells = {format_number(n), format_number(beta), format_number(p.w0),
                                            format_number(p.lambda), format_number(d), norm_name(p),
                                            format_number(cfg.seed), format_number(i), format_number(rows[i].edges)};
          for (auto c : rows[i].counts) cells.push_back(format_number(c));
          cells.push_back(format_number(rows[i].omega));
          for (auto c : rows[i].deciles) cells.push_back(format_number(c));
          csv.raw_row(std::move(cells));
        }
      }
  return csv.str();
}

inline std::string run_qk(const ScenarioConfig& cfg) {
  CsvWriter csv({"n", "beta", "w0", "lambda", "d", "p", "k", "model", "trials", "successes", "estimate", "stderr",
                 "upper_n_exponent", "regime", "lower_log_decay", "seed"});
  std::uint64_t point = 0;
  for (auto n : cfg.n_list)
    for (double beta : cfg.beta_list)
      for (int d : cfg.d_list)
        for (int k : cfg.k_list) {
          ModelParams p = cfg.params;
          p.n = n;
          p.beta = beta;
          p.d = d;
          const SeededStream base = SeededStream(cfg.seed).substream(point++);
          std::optional<RegimePrediction> up, low;
          if (k >= 3 && beta > 2.0 && std::isfinite(beta)) {
            up = qk_regime_upper(k, beta, static_cast<double>(n));
            low = qk_lower_lowdim(k, beta, d, static_cast<double>(n));
          }
          for (auto kind : {ModelKind::girg, ModelKind::irg}) {
            const auto e = estimate_qk(p, k, cfg.trials, base.substream(kind == ModelKind::irg), kind, std::nullopt,
                                       parallelism(cfg));
            csv.row(n, beta, p.w0, p.lambda, d, norm_name(p), k, kind == ModelKind::girg ? "girg" : "irg", e.trials,
                    e.successes, e.mean, e.std_error, up ? optional_number(up->n_exponent) : std::string(),
                    up ? to_string(up->label) : "", low ? optional_number(low->log_decay) : std::string(), cfg.seed);
          }
        }
  return csv.str();
}

inline std::string run_star_cond(const ScenarioConfig& cfg) {
  CsvWriter csv({"n", "w0", "lambda", "d", "k", "c", "t11", "trials", "successes", "estimate", "stderr",
                 "sandwich_lower", "sandwich_upper", "uniform_closed_form", "seed"});
  std::uint64_t point = 0;
  for (int k : cfg.k_list)
    for (int d : cfg.d_list) {
      ModelParams p = cfg.params;
      p.d = d;
      const double w1 = p.w0;
      p.lambda = static_cast<double>(p.n) * std::pow(2.0 * cfg.t0, d) / (w1 * w1);
      const double ratio = std::pow(cfg.ratio_c, d);
      std::vector<double> wk(k, w1 * ratio);
      wk[0] = w1;
      const auto weights = WeightSequence::explicit_weights(wk);
      const auto e = estimate_clique_prob_given_star(p, weights, cfg.trials, SeededStream(cfg.seed).substream(point++),
                                                     parallelism(cfg));
      const auto sw = k >= 3 ? theorem3_sandwich(k, d, cfg.ratio_c) : BoundInterval{1.0, 1.0};
      csv.row(p.n, p.w0, p.lambda, d, k, cfg.ratio_c, cfg.t0, e.trials, e.successes, e.mean, e.std_error, sw.lower,
              sw.upper, cond_clique_prob_uniform(k, d, ratio), cfg.seed);
    }
  return csv.str();
}

inline std::string run_triangle_cond(const ScenarioConfig& cfg) {
  CsvWriter csv({"n", "w0", "lambda", "d", "a", "trials", "successes", "estimate", "stderr", "closed_form",
                 "exponent_stated", "exponent_series", "exponent_error", "seed"});
  std::uint64_t point = 0;
  for (double a : cfg.a_list)
    for (int d : cfg.d_list) {
      ModelParams p = cfg.params;
      p.d = d;
      p.lambda = static_cast<double>(p.n) * std::pow(a, d) / (p.w0 * p.w0);
      const auto weights = WeightSequence::explicit_weights({p.w0, p.w0, p.w0});
      const auto e = estimate_triangle_prob_given_wedge(p, weights, cfg.trials,
                                                        SeededStream(cfg.seed).substream(point++), parallelism(cfg));
      const double kappa0 = p.lambda * p.w0 * p.w0;
      const auto corr = triangle_exponent_correction(static_cast<double>(p.n), d, kappa0);
      csv.row(p.n, p.w0, p.lambda, d, a, e.trials, e.successes, e.mean, e.std_error, triangle_cond_prob(a, d),
              corr.exponent, corr.series_exponent, corr.error, cfg.seed);
    }
  return csv.str();
}

inline std::vector<Edge> clique_edges(int k) {
  std::vector<Edge> e;
  for (Vertex u = 0; u < static_cast<Vertex>(k); ++u)
    for (Vertex v = u + 1; v < static_cast<Vertex>(k); ++v) e.emplace_back(u, v);
  return e;
}

inline std::string run_bounds(const ScenarioConfig& cfg) {
  CsvWriter csv({"n", "w0", "lambda", "d", "k", "trials", "successes_per_dim", "per_dim_estimate", "estimate",
                 "stderr", "lower_bound", "lower_valid", "upper_bound", "upper_valid", "irg_value", "seed"});
  std::uint64_t point = 0;
  for (auto n : cfg.n_list)
    for (int d : cfg.d_list)
      for (int k : cfg.k_list) {
        ModelParams p = cfg.params;
        p.n = n;
        p.d = d;
        const auto weights = WeightSequence::explicit_weights(std::vector<double>(k, p.w0));
        const auto edges = clique_edges(k);
        const double kap = kappa(p.w0, p.w0, p);
        const std::vector<double> kappa_list(edges.size(), kap);
        const std::vector<std::vector<double>> kappa_matrix(k, std::vector<double>(k, kap));
        const auto e = estimate_superset_probability(p, weights, edges, cfg.trials,
                                                     SeededStream(cfg.seed).substream(point++), parallelism(cfg));
        const auto up = highdim_superset_upper(k, d, kappa_list, kap, static_cast<double>(n));
        const auto lo = highdim_superset_lower(d, kappa_matrix, static_cast<double>(n), edges);
        csv.row(n, p.w0, p.lambda, d, k, e.per_dimension.trials, e.per_dimension.successes, e.per_dimension.mean,
                e.probability.mean, e.probability.std_error, lo.value, lo.valid, up.value, up.valid,
                irg_superset_probability(kappa_list, static_cast<double>(n)), cfg.seed);
      }
  return csv.str();
}

inline std::string run_tv_curve(const ScenarioConfig& cfg) {
  CsvWriter csv({"d", "tv", "bias_bound", "trials", "seed", "n", "p"});
  ModelParams p = cfg.params;
  WeightSequence w = cfg.weights.empty() ? sample_weights(p, SeededStream(cfg.seed))
                                         : WeightSequence::explicit_weights(cfg.weights);
  const auto curve = tv_convergence_curve(p, w, cfg.d_list, cfg.trials, SeededStream(cfg.seed), parallelism(cfg));
  for (const auto& pt : curve) csv.row(pt.d, pt.tv, pt.bias_bound, pt.trials, pt.seed, p.n, norm_name(p));
  return csv.str();
}

inline std::string run_covariance(const ScenarioConfig& cfg) {
  CsvWriter csv({"space", "layout", "trials", "estimate", "stderr", "theory", "seed"});
  std::uint64_t point = 0;
  for (auto space : {Space::torus, Space::hypercube})
    for (auto layout : {PairLayout::shared_endpoint, PairLayout::disjoint}) {
      const auto c = pair_distance_covariance(space, cfg.trials, SeededStream(cfg.seed).substream(point++), layout,
                                              parallelism(cfg));
      const double theory = space == Space::hypercube && layout == PairLayout::shared_endpoint ? 1.0 / 180.0 : 0.0;
      csv.row(space == Space::torus ? "torus" : "hypercube", layout == PairLayout::disjoint ? "disjoint" : "shared",
              cfg.trials, c.estimate, c.std_error, theory, cfg.seed);
    }
  return csv.str();
}

struct SweepPoint {
  double mean;
  double std_error;
  double median;
};

inline SweepPoint summarize(const std::vector<double>& xs) {
  double m = 0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0;
  for (double x : xs) v += (x - m) * (x - m);
  v /= std::max<double>(1.0, static_cast<double>(xs.size()) - 1.0);
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t h = sorted.size() / 2;
  const double med = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
  return {m, std::sqrt(v / static_cast<double>(xs.size())), med};
}

/// Mean K_k (or omega when k == 0) per n with a log-log slope per row group.
inline std::string run_kk_sweep(const ScenarioConfig& cfg, const std::vector<int>& ks, bool clique_number_mode) {
  const DimRegime regime = parse_dim_regime(cfg.d_regime);
  CsvWriter csv({"beta", "d", "k", "n", "graphs", "mean", "stderr", "median", "fitted_slope", "fitted_slope_stderr",
                 "predicted_n_exponent", "regime", "decay_form", "d_regime", "seed"});
  std::uint64_t group = 0;
  for (double beta : cfg.beta_list)
    for (int d : cfg.d_list) {
      std::vector<std::vector<double>> values(cfg.n_list.size());
      for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
        ModelParams p = cfg.params;
        p.n = cfg.n_list[ni];
        p.beta = beta;
        p.d = d;
        const SeededStream base = SeededStream(cfg.seed).substream(group).substream(ni);
        auto per_graph = parallel_map<std::vector<double>>(cfg.trials, parallelism(cfg), [&](std::uint64_t i) {
          const SeededStream s = base.substream(i);
          const auto w = sample_weights(p, s);
          const auto g = sample_model(p, w, s);
          std::vector<double> r;
          if (clique_number_mode)
            r.push_back(clique_number(g));
          else
            for (int k : ks) r.push_back(static_cast<double>(count_k_cliques(g, k)));
          return r;
        });
        values[ni].assign(per_graph.size() * ks.size(), 0.0);
        for (std::size_t i = 0; i < per_graph.size(); ++i)
          for (std::size_t j = 0; j < ks.size(); ++j) values[ni][j * per_graph.size() + i] = per_graph[i][j];
      }
      for (std::size_t j = 0; j < ks.size(); ++j) {
        const int k = ks[j];
        std::vector<SweepPoint> pts;
        std::vector<std::pair<double, double>> series;
        for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
          std::vector<double> xs(values[ni].begin() + j * cfg.trials, values[ni].begin() + (j + 1) * cfg.trials);
          pts.push_back(summarize(xs));
          series.emplace_back(static_cast<double>(cfg.n_list[ni]), pts.back().mean);
        }
        std::optional<SlopeFit> fit;
        try {
          fit = fit_loglog_slope(series);
        } catch (const std::domain_error&) {
        }
        std::optional<RegimePrediction> pred;
        if (beta > 2.0) {
          if (clique_number_mode)
            pred = clique_number_regime(beta, regime);
          else if (k >= 3)
            pred = expected_kk_regime(beta, k, regime);
        }
        for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni)
          csv.row(beta, d, clique_number_mode ? std::string("omega") : std::to_string(k), cfg.n_list[ni], cfg.trials,
                  pts[ni].mean, pts[ni].std_error, pts[ni].median, fit ? format_number(fit->slope) : std::string(),
                  fit ? format_number(fit->std_error) : std::string(),
                  pred ? optional_number(pred->n_exponent) : std::string(), pred ? to_string(pred->label) : "",
                  pred ? pred->decay_form : std::string(), cfg.d_regime, cfg.seed);
      }
      ++group;
    }
  return csv.str();
}

}  // namespace detail

inline nlohmann::ordered_json config_echo(const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["scenario"] = to_string(cfg.scenario);
  j["n"] = cfg.params.n;
  j["beta"] = cfg.params.beta;
  j["w0"] = cfg.params.w0;
  j["lambda"] = cfg.params.lambda;
  j["d"] = cfg.params.d;
  j["p"] = cfg.params.norm.to_string();
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["out"] = cfg.output_path;
  j["n_list"] = cfg.n_list;
  j["d_list"] = cfg.d_list;
  j["beta_list"] = cfg.beta_list;
  j["k_list"] = cfg.k_list;
  j["a_list"] = cfg.a_list;
  j["weights"] = cfg.weights;
  j["ratio_c"] = cfg.ratio_c;
  j["t0"] = cfg.t0;
  j["d_regime"] = cfg.d_regime;
  return j;
}

/// Runs a finalized configuration and returns its outputs without writing.
inline ScenarioResult execute_scenario(const ScenarioConfig& cfg) {
  ScenarioResult r;
  switch (cfg.scenario) {
    case Scenario::generate: r.primary_output = detail::run_generate(cfg); break;
    case Scenario::cliques: r.primary_output = detail::run_cliques(cfg); break;
    case Scenario::qk: r.primary_output = detail::run_qk(cfg); break;
    case Scenario::star_cond: r.primary_output = detail::run_star_cond(cfg); break;
    case Scenario::triangle_cond: r.primary_output = detail::run_triangle_cond(cfg); break;
    case Scenario::bounds: r.primary_output = detail::run_bounds(cfg); break;
    case Scenario::tv_curve: r.primary_output = detail::run_tv_curve(cfg); break;
    case Scenario::covariance: r.primary_output = detail::run_covariance(cfg); break;
    case Scenario::table1_sweep: r.primary_output = detail::run_kk_sweep(cfg, cfg.k_list, false); break;
    case Scenario::table2_sweep: r.primary_output = detail::run_kk_sweep(cfg, {3}, false); break;
    case Scenario::table3_sweep: r.primary_output = detail::run_kk_sweep(cfg, {0}, true); break;
  }
  r.manifest["library"] = "girglab";
  r.manifest["version"] = kLibraryVersion;
  r.manifest["seed"] = cfg.seed;
  r.manifest["config"] = config_echo(cfg);
  if (!cfg.deterministic) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    r.manifest["timestamp"] = buf;
  }
  return r;
}

inline std::string manifest_path(const std::string& output_path) { return output_path + ".manifest.json"; }

/// Runs the scenario and writes the CSV (or edge list) and the manifest.
inline void run_scenario(const ScenarioConfig& cfg) {
  const auto r = execute_scenario(cfg);
  std::ofstream out(cfg.output_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file '" + cfg.output_path + "'");
  out << r.primary_output;
  std::ofstream man(manifest_path(cfg.output_path), std::ios::binary);
  if (!man) throw std::runtime_error("cannot write manifest file");
  man << r.manifest.dump(2) << '\n';
}

inline std::string error_json(const std::string& kind, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = {{"kind", kind}, {"message", message}};
  return j.dump();
}

}  // namespace girg
