#pragma once

// Distributions over labelled graphs on a handful of vertices, total
// variation, and the Gaussian and covariance checks on torus distances.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "girg/graph.hpp"
#include "girg/model.hpp"
#include "girg/parallel.hpp"
#include "girg/random.hpp"
#include "girg/samplers.hpp"
#include "girg/torus.hpp"

namespace girg {

inline constexpr std::size_t kMaxEnumerableVertices = 6;

inline std::size_t pair_count(std::size_t n) noexcept { return n * (n - (n > 0)) / 2; }

/// Probability vector over the 2^C(n,2) labelled graphs, indexed by edge mask.
struct GraphDistribution {
  std::size_t n = 0;
  std::vector<double> probs;

  static GraphDistribution zeros(std::size_t n) {
    if (n > kMaxEnumerableVertices) throw std::length_error("GraphDistribution: at most 6 vertices");
    return {n, std::vector<double>(std::size_t{1} << pair_count(n), 0.0)};
  }
  double total() const noexcept {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
  }
};

inline double tv_distance(const GraphDistribution& p, const GraphDistribution& q) {
  if (p.n != q.n || p.probs.size() != q.probs.size()) throw std::invalid_argument("tv_distance: vertex counts differ");
  double s = 0.0;
  for (std::size_t i = 0; i < p.probs.size(); ++i) s += std::abs(p.probs[i] - q.probs[i]);
  return 0.5 * s;
}

inline GraphDistribution exact_irg_distribution(const WeightSequence& weights, const ModelParams& params) {
  const std::size_t n = weights.size();
  if (n > kMaxEnumerableVertices) throw std::length_error("exact_irg_distribution: at most 6 vertices");
  std::vector<double> q;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) q.push_back(kappa(weights[u], weights[v], params) / static_cast<double>(params.n));
  auto dist = GraphDistribution::zeros(n);
  for (std::size_t mask = 0; mask < dist.probs.size(); ++mask) {
    double p = 1.0;
    for (std::size_t b = 0; b < q.size(); ++b) p *= (mask >> b & 1) ? q[b] : 1.0 - q[b];
    dist.probs[mask] = p;
  }
  return dist;
}

struct EmpiricalDistribution {
  GraphDistribution dist;
  std::vector<std::uint64_t> counts;
  std::uint64_t trials = 0;
  /// sum over outcomes of 0.5 sqrt(p (1 - p) / trials).
  double bias_bound = 0.0;
};

/// Frequencies of `sampler(i)`, which returns the edge mask of trial i.
template <class Sampler>
EmpiricalDistribution empirical_graph_distribution(std::size_t n, Sampler&& sampler, std::uint64_t trials,
                                                   Parallelism par = {}) {
  if (trials < 1) throw std::invalid_argument("empirical_graph_distribution: trials must be positive");
  EmpiricalDistribution out;
  out.dist = GraphDistribution::zeros(n);
  const std::size_t outcomes = out.dist.probs.size();
  auto partial = map_blocks<std::vector<std::uint64_t>>(trials, par, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<std::uint64_t> c(outcomes, 0);
    for (std::uint64_t i = begin; i < end; ++i) ++c[sampler(i)];
    return c;
  });
  out.counts.assign(outcomes, 0);
  for (const auto& c : partial)
    for (std::size_t i = 0; i < outcomes; ++i) out.counts[i] += c[i];
  out.trials = trials;
  const double t = static_cast<double>(trials);
  for (std::size_t i = 0; i < outcomes; ++i) {
    const double p = static_cast<double>(out.counts[i]) / t;
    out.dist.probs[i] = p;
    out.bias_bound += 0.5 * std::sqrt(p * (1.0 - p) / t);
  }
  return out;
}

/// Edge mask of one GIRG on a handful of vertices with fixed weights.
class SmallGirgSampler {
 public:
  SmallGirgSampler(const ModelParams& params, const WeightSequence& weights, const SeededStream& rng)
      : params_(params), k_(weights.size()), stream_(rng.substream(streams::kGraphs)) {
    if (k_ > kMaxEnumerableVertices) throw std::length_error("SmallGirgSampler: at most 6 vertices");
    std::shared_ptr<const LpSumDistribution> lp;
    if (!params.norm.is_linf()) lp = lp_sum_distribution(params.norm.p(), params.d);
    for (std::size_t u = 0; u < k_; ++u)
      for (std::size_t v = u + 1; v < k_; ++v) {
        const double q = kappa(weights[u], weights[v], params) / static_cast<double>(params.n);
        if (params.norm.is_linf())
          limit_.push_back(connection_threshold_linf(weights[u], weights[v], params));
        else
          limit_.push_back(q >= 1.0 ? std::numeric_limits<double>::infinity() : lp->quantile(q));
      }
  }

  std::uint64_t operator()(std::uint64_t trial) const {
    const SeededStream s = stream_.substream(trial);
    const int d = params_.d;
    std::vector<double> pos(k_ * d);
    for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = s.uniform_at(i);
    std::uint64_t mask = 0;
    std::size_t bit = 0;
    const bool linf = params_.norm.is_linf();
    const double p = params_.norm.p();
    for (std::size_t u = 0; u < k_; ++u)
      for (std::size_t v = u + 1; v < k_; ++v, ++bit) {
        const double* x = &pos[u * d];
        const double* y = &pos[v * d];
        bool adj;
        if (linf)
          adj = linf_within(x, y, d, limit_[bit]);
        else if (p == 1.0)
          adj = l1_within(x, y, d, limit_[bit]);
        else
          adj = lp_within(x, y, d, p, limit_[bit]);
        if (adj) mask |= std::uint64_t{1} << bit;
      }
    return mask;
  }

 private:
  static bool l1_within(const double* x, const double* y, int d, double limit) noexcept {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += circle_distance(x[j], y[j]);
    return s <= limit;
  }

  ModelParams params_;
  std::size_t k_;
  SeededStream stream_;
  std::vector<double> limit_;  // t under L_inf, t^p otherwise
};

struct TvPoint {
  int d;
  double tv;
  double bias_bound;
  std::uint64_t trials;
  std::uint64_t seed;
};

/// TV(GIRG_d, IRG) for each d, with fixed weights on n <= 6 vertices.
inline std::vector<TvPoint> tv_convergence_curve(const ModelParams& params_base, const WeightSequence& weights,
                                                 const std::vector<int>& d_list, std::uint64_t trials,
                                                 const SeededStream& rng, Parallelism par = {}) {
  if (weights.size() > kMaxEnumerableVertices) throw std::length_error("tv_convergence_curve: at most 6 vertices");
  const auto exact = exact_irg_distribution(weights, params_base);
  std::vector<TvPoint> out;
  for (std::size_t i = 0; i < d_list.size(); ++i) {
    ModelParams p = params_base;
    p.d = d_list[i];
    const SmallGirgSampler sampler(p, weights, rng.substream(static_cast<std::uint64_t>(p.d)));
    const auto emp = empirical_graph_distribution(weights.size(), sampler, trials, par);
    out.push_back({p.d, tv_distance(emp.dist, exact), emp.bias_bound, trials, rng.seed()});
  }
  return out;
}

/// Standard normal CDF and quantile.
struct StandardNormal {
  static double cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

  static double quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("StandardNormal::quantile: q must lie in (0, 1)");
    // Acklam's rational approximation, then Halley refinement.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double e[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double low = 0.02425;
    double x;
    if (q < low) {
      const double r = std::sqrt(-2.0 * std::log(q));
      x = (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
          ((((e[0] * r + e[1]) * r + e[2]) * r + e[3]) * r + 1.0);
    } else if (q <= 1.0 - low) {
      const double r0 = q - 0.5, r = r0 * r0;
      x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * r0 /
          (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
      const double r = std::sqrt(-2.0 * std::log1p(-q));
      x = -(((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
          ((((e[0] * r + e[1]) * r + e[2]) * r + e[3]) * r + 1.0);
    }
    for (int it = 0; it < 2; ++it) {
      // cdf(x) - q, evaluated in the tail that keeps full precision
      const double err = q < 0.5 ? cdf(x) - q : (1.0 - q) - 0.5 * std::erfc(x / std::sqrt(2.0));
      const double u = err * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
      x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
  }
};

struct GaussianLimitPoint {
  int d;
  double normalized;
  double target;
};

/// (t^p - d mu) / (sqrt(d) sigma) against Phi^{-1}(kappa / n) for each d.
inline std::vector<GaussianLimitPoint> gaussian_threshold_limit(double w_u, double w_v, const ModelParams& params,
                                                                const std::vector<int>& d_list) {
  if (params.norm.is_linf()) throw std::domain_error("gaussian_threshold_limit: requires a finite norm index");
  const double q = params.lambda * w_u * w_v / static_cast<double>(params.n);
  if (!(q < 1.0)) throw std::domain_error("gaussian_threshold_limit: saturated pair");
  const auto clt = clt_constants(params.norm);
  const double target = StandardNormal::quantile(q);
  std::vector<GaussianLimitPoint> out;
  for (int d : d_list) {
    const double s = lp_sum_distribution(params.norm.p(), d)->quantile(q);
    out.push_back({d, (s - d * clt.mu) / std::sqrt(d * clt.sigma2), target});
  }
  return out;
}

enum class PairLayout { shared_endpoint, disjoint };

struct CovarianceEstimate {
  double estimate;
  double std_error;
};

/// Sample covariance of one-dimensional distances (u, v) and (u, s), or of
/// (u, v) and (s, w) for the disjoint layout.
inline CovarianceEstimate pair_distance_covariance(Space space, std::uint64_t trials, const SeededStream& rng,
                                                   PairLayout layout = PairLayout::shared_endpoint,
                                                   Parallelism par = {}) {
  if (trials < 2) throw std::invalid_argument("pair_distance_covariance: need at least two trials");
  auto draw = [&](std::uint64_t i) -> std::pair<double, double> {
    if (layout == PairLayout::shared_endpoint) return component_distances_at(space, rng, i);
    const double u = rng.uniform_at(4 * i), v = rng.uniform_at(4 * i + 1);
    const double s = rng.uniform_at(4 * i + 2), w = rng.uniform_at(4 * i + 3);
    if (space == Space::torus) return {circle_distance(u, v), circle_distance(s, w)};
    return {std::abs(u - v), std::abs(s - w)};
  };
  struct Sums {
    double a = 0, b = 0, ab = 0, ab2 = 0;
  };
  auto means = map_blocks<Sums>(trials, par, [&](std::uint64_t begin, std::uint64_t end) {
    Sums s;
    for (std::uint64_t i = begin; i < end; ++i) {
      const auto [x, y] = draw(i);
      s.a += x;
      s.b += y;
    }
    return s;
  });
  double mx = 0, my = 0;
  for (const auto& s : means) {
    mx += s.a;
    my += s.b;
  }
  const double t = static_cast<double>(trials);
  mx /= t;
  my /= t;
  auto prods = map_blocks<Sums>(trials, par, [&](std::uint64_t begin, std::uint64_t end) {
    Sums s;
    for (std::uint64_t i = begin; i < end; ++i) {
      const auto [x, y] = draw(i);
      const double z = (x - mx) * (y - my);
      s.ab += z;
      s.ab2 += z * z;
    }
    return s;
  });
  double sum = 0, sum2 = 0;
  for (const auto& s : prods) {
    sum += s.ab;
    sum2 += s.ab2;
  }
  const double mean = sum / t;
  const double var = std::max(0.0, sum2 / t - mean * mean);
  return {sum / (t - 1.0), std::sqrt(var / t)};
}

}  // namespace girg
