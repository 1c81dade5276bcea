#pragma once

// Monte Carlo estimators for clique probabilities and related quantities.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "girg/cliques.hpp"
#include "girg/model.hpp"
#include "girg/parallel.hpp"
#include "girg/random.hpp"
#include "girg/samplers.hpp"
#include "girg/torus.hpp"

namespace girg {

struct EstimateWithError {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
};

/// Normal-approximation standard error, or the z = 1 Wilson half-width
/// when fewer than 10 successes or failures were observed.
inline EstimateWithError bernoulli_estimate(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) throw std::invalid_argument("bernoulli_estimate: no trials");
  const double t = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / t;
  double se = std::sqrt(p * (1.0 - p) / t);
  if (successes < 10 || trials - successes < 10) se = std::sqrt(p * (1.0 - p) / t + 0.25 / (t * t)) / (1.0 + 1.0 / t);
  return {p, se, trials, successes};
}

/// Raised when a conditional estimator's precondition fails.
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a ratio with an empirical mean of zero is requested.
class ZeroMeanError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class ModelKind { irg, girg };

namespace detail {

inline bool pair_adjacent_linf(double w_u, double w_v, const ModelParams& params, const double* x, const double* y) {
  return linf_within(x, y, params.d, connection_threshold_linf(w_u, w_v, params));
}

inline SeededStream trial_stream(const SeededStream& rng, std::uint64_t i) {
  return rng.substream(streams::kTrials).substream(i);
}

}  // namespace detail

/// Probability q_k that k random vertices form a clique. Each trial draws
/// k weights (unless `fixed_weights` is given) and k positions afresh.
inline EstimateWithError estimate_qk(const ModelParams& params, int k, std::uint64_t trials, const SeededStream& rng,
                                     ModelKind kind = ModelKind::girg,
                                     const std::optional<WeightSequence>& fixed_weights = std::nullopt,
                                     Parallelism par = {}) {
  params.validate();
  if (k < 2 || k > 64) throw std::invalid_argument("estimate_qk: k must lie in [2, 64]");
  if (trials < 1) throw std::invalid_argument("estimate_qk: trials must be positive");
  if (fixed_weights && fixed_weights->size() != static_cast<std::size_t>(k))
    throw std::invalid_argument("estimate_qk: fixed weight tuple must have k entries");
  const int d = params.d;
  std::shared_ptr<const LpSumDistribution> lp;
  if (kind == ModelKind::girg && !params.norm.is_linf()) lp = lp_sum_distribution(params.norm.p(), d);
  const double n = static_cast<double>(params.n);
  const auto hits = parallel_count(trials, par, [&](std::uint64_t i) {
    const SeededStream s = detail::trial_stream(rng, i);
    double w[64];
    for (int a = 0; a < k; ++a)
      w[a] = fixed_weights ? (*fixed_weights)[a]
             : std::isinf(params.beta)
                 ? params.w0
                 : pareto_from_survival(s.uniform_open_left_at(a), params.beta, params.w0);
    std::uint64_t draw = k;
    if (kind == ModelKind::irg) {
      for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
          if (!(s.uniform_at(draw++) < kappa(w[a], w[b], params) / n)) return false;
      return true;
    }
    std::vector<double> pos(static_cast<std::size_t>(k) * d);
    for (auto& x : pos) x = s.uniform_at(draw++);
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b) {
        const double* x = &pos[a * d];
        const double* y = &pos[b * d];
        if (lp) {
          const double q = kappa(w[a], w[b], params) / n;
          if (q < 1.0 && !lp_within(x, y, d, lp->p(), lp->quantile(q))) return false;
        } else if (!detail::pair_adjacent_linf(w[a], w[b], params, x, y)) {
          return false;
        }
      }
    return true;
  });
  return bernoulli_estimate(hits, trials);
}

struct StarPrecondition {
  double c;    // (w_max / w_1)^(1/d)
  double t11;  // 0.5 (lambda w_1^2 / n)^(1/d)
  bool holds;  // c^2 t11 <= 1/4
};

inline StarPrecondition star_precondition(const ModelParams& params, const WeightSequence& weights_k) {
  const double w1 = weights_k[0];
  const double wmax = *std::max_element(weights_k.begin(), weights_k.end());
  const double c = std::exp(std::log(wmax / w1) / params.d);
  const double t11 = std::exp(log_threshold_linf(w1, w1, params));
  return {c, t11, c * c * t11 <= 0.25 * (1 + 1e-12)};
}

namespace detail {

inline EstimateWithError star_conditioned_estimate(const ModelParams& params, const WeightSequence& weights_k,
                                                   std::uint64_t trials, const SeededStream& rng, Parallelism par) {
  const std::size_t k = weights_k.size();
  const int d = params.d;
  std::vector<double> thresholds(k - 1);
  for (std::size_t i = 1; i < k; ++i) thresholds[i - 1] = connection_threshold_linf(weights_k[0], weights_k[i], params);
  std::vector<double> inner;  // t_ij for 1 <= i < j < k
  for (std::size_t i = 1; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) inner.push_back(connection_threshold_linf(weights_k[i], weights_k[j], params));
  const auto hits = parallel_count(trials, par, [&](std::uint64_t t) {
    SeededStream s = trial_stream(rng, t);
    std::vector<double> pos(k * d);
    star_conditioned_positions_into(params, thresholds, s, pos.data());
    std::size_t e = 0;
    for (std::size_t i = 1; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j, ++e)
        if (!linf_within(&pos[i * d], &pos[j * d], d, inner[e])) return false;
    return true;
  });
  return bernoulli_estimate(hits, trials);
}

inline void check_conditional_inputs(const ModelParams& params, const WeightSequence& weights_k, std::uint64_t trials) {
  params.validate();
  if (!params.norm.is_linf()) throw std::domain_error("conditional estimators require the L_inf norm");
  if (weights_k.size() < 2) throw std::invalid_argument("conditional estimators need at least two weights");
  if (trials < 1) throw std::invalid_argument("trials must be positive");
}

}  // namespace detail

/// Pr[U_k is a clique | vertex 0 is adjacent to all others], with weights_k[0]
/// the minimal weight.
inline EstimateWithError estimate_clique_prob_given_star(const ModelParams& params, const WeightSequence& weights_k,
                                                         std::uint64_t trials, const SeededStream& rng,
                                                         Parallelism par = {}) {
  detail::check_conditional_inputs(params, weights_k, trials);
  if (*std::min_element(weights_k.begin(), weights_k.end()) < weights_k[0])
    throw std::invalid_argument("estimate_clique_prob_given_star: first weight must be minimal");
  const auto pre = star_precondition(params, weights_k);
  if (!pre.holds) {
    std::ostringstream msg;
    msg << "star precondition c^2 * t11 <= 1/4 violated: c = " << pre.c << ", t11 = " << pre.t11
        << ", c^2 * t11 = " << pre.c * pre.c * pre.t11;
    throw PreconditionError(msg.str());
  }
  for (std::size_t i = 1; i < weights_k.size(); ++i)
    if (connection_threshold_linf(weights_k[0], weights_k[i], params) >= 0.5)
      throw PreconditionError("star conditioning is vacuous: threshold at cap");
  if (weights_k.size() == 2) return bernoulli_estimate(trials, trials);
  return detail::star_conditioned_estimate(params, weights_k, trials, rng, par);
}

/// Pr[v2 ~ v3 | v1 ~ v2, v1 ~ v3].
inline EstimateWithError estimate_triangle_prob_given_wedge(const ModelParams& params, const WeightSequence& weights_3,
                                                            std::uint64_t trials, const SeededStream& rng,
                                                            Parallelism par = {}) {
  detail::check_conditional_inputs(params, weights_3, trials);
  if (weights_3.size() != 3) throw std::invalid_argument("estimate_triangle_prob_given_wedge: need three weights");
  return detail::star_conditioned_estimate(params, weights_3, trials, rng, par);
}

struct SupersetEstimate {
  EstimateWithError probability;    // p1^d with delta-method stderr
  EstimateWithError per_dimension;  // p1
};

/// Pr[E ⊇ A] under L_inf for fixed weights. Adjacency under L_inf is the
/// intersection of independent per-coordinate events, so the probability is
/// p1^d where p1 is the one-dimensional probability, which is what the
/// trials estimate.
inline SupersetEstimate estimate_superset_probability(const ModelParams& params, const WeightSequence& weights_k,
                                                      const std::vector<Edge>& edge_set, std::uint64_t trials,
                                                      const SeededStream& rng, Parallelism par = {}) {
  params.validate();
  if (!params.norm.is_linf()) throw std::domain_error("estimate_superset_probability requires the L_inf norm");
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  const std::size_t k = weights_k.size();
  if (k > 64) throw std::invalid_argument("estimate_superset_probability: at most 64 vertices");
  std::vector<double> t;
  for (auto [u, v] : edge_set) {
    if (u >= k || v >= k || u == v) throw std::invalid_argument("edge set refers to missing vertices");
    t.push_back(connection_threshold_linf(weights_k[u], weights_k[v], params));
  }
  const auto hits = parallel_count(trials, par, [&](std::uint64_t i) {
    const SeededStream s = detail::trial_stream(rng, i);
    double x[64];
    for (std::size_t a = 0; a < k; ++a) x[a] = s.uniform_at(a);
    for (std::size_t e = 0; e < edge_set.size(); ++e)
      if (t[e] < 0.5 && circle_distance(x[edge_set[e].first], x[edge_set[e].second]) > t[e]) return false;
    return true;
  });
  const auto p1 = bernoulli_estimate(hits, trials);
  const int d = params.d;
  SupersetEstimate out;
  out.per_dimension = p1;
  out.probability = {std::pow(p1.mean, d), d * std::pow(p1.mean, d - 1) * p1.std_error, trials, hits};
  return out;
}

/// Var/Mean^2 with the population variance.
inline double relative_variance(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("relative_variance: no samples");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(samples.size());
  if (mean == 0.0) throw ZeroMeanError("relative_variance: mean is zero");
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(samples.size());
  return var / (mean * mean);
}

/// Grid sampler where it pays off (L_inf, d <= 5), all-pairs otherwise.
inline GraphSample sample_girg_auto(const ModelParams& params, const WeightSequence& weights, const SeededStream& rng) {
  return sample_girg_grid(params, weights, rng).graph;
}

struct RelativeVarianceResult {
  double ratio;
  std::vector<double> counts;
};

/// K_k(G_{<= w_c}) over independent GIRGs and its relative variance.
inline RelativeVarianceResult estimate_relative_variance_kk(const ModelParams& params, int k, double w_c,
                                                            std::uint64_t graphs, const SeededStream& rng,
                                                            Parallelism par = {}) {
  params.validate();
  if (graphs < 2) throw std::invalid_argument("estimate_relative_variance_kk: need at least two graphs");
  auto counts = parallel_map<double>(graphs, par, [&](std::uint64_t i) {
    const SeededStream s = rng.substream(streams::kGraphs).substream(i);
    const auto w = sample_weights(params, s);
    const auto g = sample_girg_auto(params, w, s);
    return static_cast<double>(count_k_cliques(subgraph_leq_weight(g, w, w_c).graph, k));
  });
  return {relative_variance(counts), std::move(counts)};
}

}  // namespace girg
