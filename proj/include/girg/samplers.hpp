#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "girg/graph.hpp"
#include "girg/model.hpp"
#include "girg/random.hpp"
#include "girg/torus.hpp"

namespace girg {

/// Per-vertex factors r_v = w_v^(1/d) so that t_uv = scale * r_u * r_v.
class LinfThresholds {
 public:
  LinfThresholds(const WeightSequence& weights, const ModelParams& params)
      : weights_(&weights),
        lambda_(params.lambda),
        n_(static_cast<double>(params.n)),
        scale_(0.5 * std::exp((std::log(params.lambda) - std::log(static_cast<double>(params.n))) / params.d)) {
    root_.resize(weights.size());
    for (std::size_t v = 0; v < weights.size(); ++v) root_[v] = std::exp(std::log(weights[v]) / params.d);
  }

  double operator()(std::size_t u, std::size_t v) const noexcept {
    if (lambda_ * (*weights_)[u] * (*weights_)[v] >= n_) return 0.5;
    return std::min(0.5, scale_ * (root_[u] * root_[v]));
  }
  double scale() const noexcept { return scale_; }

 private:
  const WeightSequence* weights_;
  double lambda_, n_, scale_;
  std::vector<double> root_;
};

inline bool linf_within(const double* x, const double* y, int d, double t) noexcept {
  if (t >= 0.5) return true;
  for (int j = 0; j < d; ++j)
    if (circle_distance(x[j], y[j]) > t) return false;
  return true;
}

inline bool lp_within(const double* x, const double* y, int d, double p, double t_pow_p) noexcept {
  double s = 0.0;
  for (int j = 0; j < d; ++j) {
    s += std::pow(circle_distance(x[j], y[j]), p);
    if (s > t_pow_p) return false;
  }
  return true;
}

namespace detail {
inline void check_weights(const WeightSequence& weights, const ModelParams& params) {
  params.validate();
  if (weights.size() != params.n) throw std::invalid_argument("weight sequence length differs from n");
}
}  // namespace detail

inline GraphSample sample_irg(const ModelParams& params, const WeightSequence& weights, const SeededStream& rng) {
  detail::check_weights(weights, params);
  const SeededStream s = rng.substream(streams::kEdges);
  const std::size_t n = params.n;
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) {
      const double q = kappa(weights[u], weights[v], params) / static_cast<double>(n);
      if (s.uniform_at(GraphSample::pair_index(n, u, v)) < q) edges.emplace_back(u, v);
    }
  return GraphSample(n, std::move(edges));
}

/// Threshold t^p for each pair under a finite norm, from the lattice quantile.
class LpThresholds {
 public:
  LpThresholds(const WeightSequence& weights, const ModelParams& params)
      : weights_(&weights), params_(params), dist_(lp_sum_distribution(params.norm.p(), params.d)) {}

  /// +inf when the pair is saturated.
  double power(std::size_t u, std::size_t v) const {
    const double q = kappa((*weights_)[u], (*weights_)[v], params_) / static_cast<double>(params_.n);
    if (q >= 1.0) return std::numeric_limits<double>::infinity();
    return dist_->quantile(q);
  }

 private:
  const WeightSequence* weights_;
  ModelParams params_;
  std::shared_ptr<const LpSumDistribution> dist_;
};

/// All-pairs GIRG sampler.
inline GraphSample sample_girg(const ModelParams& params, const WeightSequence& weights, const SeededStream& rng) {
  detail::check_weights(weights, params);
  const std::size_t n = params.n;
  const int d = params.d;
  const auto pos = sample_positions(n, d, rng);
  std::vector<Edge> edges;
  if (params.norm.is_linf()) {
    const LinfThresholds t(weights, params);
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v)
        if (linf_within(&pos[u * d], &pos[v * d], d, t(u, v))) edges.emplace_back(u, v);
  } else {
    const LpThresholds t(weights, params);
    const double p = params.norm.p();
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v)
        if (lp_within(&pos[u * d], &pos[v * d], d, p, t.power(u, v))) edges.emplace_back(u, v);
  }
  return GraphSample(n, std::move(edges));
}

struct GridSampleResult {
  GraphSample graph;
  bool fell_back = false;
};

/// Cell-grid GIRG sampler for L_inf and small d.
///
/// Vertices are bucketed into layers [w0 2^i, w0 2^(i+1)). For each pair of
/// layers the torus is cut into g^d cells of side at least the largest
/// threshold between the two layers, so that adjacent vertices always lie in
/// neighbouring cells. Positions and the adjacency test are shared with
/// sample_girg, so both samplers return the same graph for the same seed.
inline GridSampleResult sample_girg_grid(const ModelParams& params, const WeightSequence& weights,
                                         const SeededStream& rng, int max_dim = 5) {
  detail::check_weights(weights, params);
  if (!params.norm.is_linf() || params.d > max_dim) return {sample_girg(params, weights, rng), true};
  const std::size_t n = params.n;
  const int d = params.d;
  const auto pos = sample_positions(n, d, rng);
  const LinfThresholds t(weights, params);

  double wmin = weights.size() ? *std::min_element(weights.begin(), weights.end()) : 1.0;
  std::vector<std::vector<Vertex>> layers;
  for (Vertex v = 0; v < n; ++v) {
    const auto layer = static_cast<std::size_t>(std::max(0.0, std::floor(std::log2(weights[v] / wmin))));
    if (layer >= layers.size()) layers.resize(layer + 1);
    layers[layer].push_back(v);
  }
  auto layer_top = [&](std::size_t i) {
    double top = 0.0;
    for (Vertex v : layers[i]) top = std::max(top, weights[v]);
    return top;
  };
  std::vector<double> tops(layers.size());
  for (std::size_t i = 0; i < layers.size(); ++i) tops[i] = layer_top(i);

  struct Grid {
    std::size_t g = 0;
    std::vector<std::size_t> start;  // cell -> first slot in order
    std::vector<Vertex> order;
  };
  auto cell_of = [&](Vertex v, std::size_t g) {
    std::size_t id = 0;
    for (int j = 0; j < d; ++j)
      id = id * g + std::min(g - 1, static_cast<std::size_t>(pos[v * d + j] * static_cast<double>(g)));
    return id;
  };
  auto build = [&](const std::vector<Vertex>& members, std::size_t g) {
    Grid grid;
    grid.g = g;
    std::size_t cells = 1;
    for (int j = 0; j < d; ++j) cells *= g;
    grid.start.assign(cells + 1, 0);
    std::vector<std::size_t> ids(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
      ids[i] = cell_of(members[i], g);
      ++grid.start[ids[i] + 1];
    }
    for (std::size_t c = 0; c < cells; ++c) grid.start[c + 1] += grid.start[c];
    grid.order.resize(members.size());
    std::vector<std::size_t> fill(grid.start.begin(), grid.start.end() - 1);
    for (std::size_t i = 0; i < members.size(); ++i) grid.order[fill[ids[i]]++] = members[i];
    return grid;
  };

  std::vector<Edge> edges;
  std::vector<std::size_t> coord(d);
  std::vector<std::array<std::size_t, 3>> options(d);
  std::vector<int> option_count(d);
  for (std::size_t a = 0; a < layers.size(); ++a) {
    if (layers[a].empty()) continue;
    for (std::size_t b = a; b < layers.size(); ++b) {
      if (layers[b].empty()) continue;
      const double tmax = std::min(0.5, t.scale() * std::exp(std::log(tops[a] * tops[b]) / d) * (1 + 1e-9));
      const double budget = 4.0 * static_cast<double>(layers[a].size() + layers[b].size());
      auto g = static_cast<std::size_t>(std::max(1.0, std::floor(1.0 / tmax)));
      g = std::min<std::size_t>(g, static_cast<std::size_t>(std::max(1.0, std::floor(std::pow(budget, 1.0 / d)))));
      const Grid ga = build(layers[a], g);
      const Grid gb = a == b ? Grid{} : build(layers[b], g);
      const Grid& other = a == b ? ga : gb;
      const std::size_t cells = ga.start.size() - 1;
      for (std::size_t c = 0; c < cells; ++c) {
        if (ga.start[c] == ga.start[c + 1]) continue;
        std::size_t rest = c;
        for (int j = d - 1; j >= 0; --j) {
          coord[j] = rest % g;
          rest /= g;
        }
        for (int j = 0; j < d; ++j) {
          const std::size_t x = coord[j];
          if (g == 1) {
            options[j] = {x, 0, 0};
            option_count[j] = 1;
          } else if (g == 2) {
            options[j] = {x, 1 - x, 0};
            option_count[j] = 2;
          } else {
            options[j] = {(x + g - 1) % g, x, (x + 1) % g};
            option_count[j] = 3;
          }
        }
        std::vector<int> digit(d, 0);
        for (;;) {
          std::size_t nb = 0;
          for (int j = 0; j < d; ++j) nb = nb * g + options[j][digit[j]];
          for (std::size_t i = ga.start[c]; i < ga.start[c + 1]; ++i) {
            const Vertex u = ga.order[i];
            for (std::size_t k = other.start[nb]; k < other.start[nb + 1]; ++k) {
              const Vertex v = other.order[k];
              if (a == b && v <= u) continue;
              if (linf_within(&pos[u * d], &pos[v * d], d, t(u, v))) edges.emplace_back(std::min(u, v), std::max(u, v));
            }
          }
          int j = d - 1;
          while (j >= 0 && ++digit[j] == option_count[j]) digit[j--] = 0;
          if (j < 0) break;
        }
      }
    }
  }
  return {GraphSample(n, std::move(edges)), false};
}

/// Exact law of k positions given that vertex 0 is adjacent to all others:
/// v_1 uniform, v_i uniform in the L_inf ball of radius t_1i around v_1.
/// Writes k * d coordinates into `out`.
inline void star_conditioned_positions_into(const ModelParams& params, std::span<const double> thresholds,
                                            SeededStream& s, double* out) {
  const int d = params.d;
  const std::size_t k = thresholds.size() + 1;
  for (int j = 0; j < d; ++j) out[j] = s.uniform();
  for (std::size_t i = 1; i < k; ++i) {
    const double r = thresholds[i - 1];
    for (int j = 0; j < d; ++j) {
      double x = out[j] + (2.0 * s.uniform() - 1.0) * r;
      x -= std::floor(x);
      if (x >= 1.0) x = 0.0;
      out[i * d + j] = x;
    }
  }
}

inline std::vector<TorusPoint> sample_star_conditioned_positions(const ModelParams& params,
                                                                 const WeightSequence& weights_k,
                                                                 const SeededStream& rng) {
  if (!params.norm.is_linf()) throw std::domain_error("star conditioning requires the L_inf norm");
  const std::size_t k = weights_k.size();
  if (k < 2) throw std::domain_error("star conditioning requires k >= 2");
  std::vector<double> thresholds(k - 1);
  for (std::size_t i = 1; i < k; ++i) {
    thresholds[i - 1] = connection_threshold_linf(weights_k[0], weights_k[i], params);
    if (thresholds[i - 1] >= 0.5) throw std::domain_error("star conditioning is vacuous: threshold at cap");
  }
  SeededStream s = rng;
  std::vector<double> flat(k * params.d);
  star_conditioned_positions_into(params, thresholds, s, flat.data());
  std::vector<TorusPoint> out;
  for (std::size_t i = 0; i < k; ++i)
    out.emplace_back(std::vector<double>(flat.begin() + i * params.d, flat.begin() + (i + 1) * params.d));
  return out;
}

enum class Space { torus, hypercube };

/// One-dimensional distances (u, v) and (u, s) for i.i.d. uniform u, v, s.
inline std::pair<double, double> component_distances_at(Space space, const SeededStream& s, std::uint64_t i) {
  const double u = s.uniform_at(3 * i), v = s.uniform_at(3 * i + 1), w = s.uniform_at(3 * i + 2);
  if (space == Space::torus) return {circle_distance(u, v), circle_distance(u, w)};
  return {std::abs(u - v), std::abs(u - w)};
}

inline std::vector<std::pair<double, double>> sample_component_distances(Space space, std::uint64_t count,
                                                                         const SeededStream& rng) {
  if (count < 1) throw std::invalid_argument("sample_component_distances: count must be positive");
  std::vector<std::pair<double, double>> out(count);
  for (std::uint64_t i = 0; i < count; ++i) out[i] = component_distances_at(space, rng, i);
  return out;
}

}  // namespace girg
