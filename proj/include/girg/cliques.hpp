#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "girg/graph.hpp"
#include "girg/model.hpp"

namespace girg {

struct CliqueStats {
  int k;
  std::uint64_t count;
  std::size_t n;
};

namespace detail {

/// Degeneracy ordering and the induced forward adjacency lists.
struct Oriented {
  std::vector<std::uint32_t> rank;
  std::vector<std::vector<Vertex>> out;  // later neighbours, sorted by rank
  std::size_t max_out = 0;
};

inline Oriented orient(const GraphSample& g) {
  const std::size_t n = g.n();
  std::vector<std::size_t> deg(n);
  std::size_t maxdeg = 0;
  for (Vertex v = 0; v < n; ++v) maxdeg = std::max(maxdeg, deg[v] = g.degree(v));
  std::vector<std::vector<Vertex>> buckets(maxdeg + 1);
  for (Vertex v = 0; v < n; ++v) buckets[deg[v]].push_back(v);
  std::vector<char> done(n, 0);
  Oriented o;
  o.rank.assign(n, 0);
  std::uint32_t next = 0;
  std::size_t cur = 0;
  while (next < n) {
    cur = cur > 0 ? cur - 1 : 0;
    while (buckets[cur].empty()) ++cur;
    const Vertex v = buckets[cur].back();
    buckets[cur].pop_back();
    if (done[v] || deg[v] != cur) continue;
    done[v] = 1;
    o.rank[v] = next++;
    for (Vertex u : g.neighbors(v))
      if (!done[u]) buckets[--deg[u]].push_back(u);
  }
  o.out.resize(n);
  for (Vertex v = 0; v < n; ++v) {
    for (Vertex u : g.neighbors(v))
      if (o.rank[u] > o.rank[v]) o.out[v].push_back(u);
    std::sort(o.out[v].begin(), o.out[v].end(), [&](Vertex a, Vertex b) { return o.rank[a] < o.rank[b]; });
    o.max_out = std::max(o.max_out, o.out[v].size());
  }
  return o;
}

/// Dense bitset graph on the forward neighbourhood of one vertex.
class LocalGraph {
 public:
  void build(const Oriented& o, Vertex v, std::vector<std::int32_t>& local_index, bool symmetric) {
    const auto& nb = o.out[v];
    size_ = nb.size();
    words_ = (size_ + 63) / 64;
    rows_.assign(size_ * words_, 0);
    for (std::size_t i = 0; i < size_; ++i) local_index[nb[i]] = static_cast<std::int32_t>(i);
    for (std::size_t i = 0; i < size_; ++i)
      for (Vertex y : o.out[nb[i]]) {
        const std::int32_t j = local_index[y];
        if (j < 0) continue;
        set(i, static_cast<std::size_t>(j));
        if (symmetric) set(static_cast<std::size_t>(j), i);
      }
    for (Vertex x : nb) local_index[x] = -1;
  }

  std::size_t size() const noexcept { return size_; }
  std::size_t words() const noexcept { return words_; }
  const std::uint64_t* row(std::size_t i) const noexcept { return rows_.data() + i * words_; }

 private:
  void set(std::size_t i, std::size_t j) noexcept { rows_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64); }

  std::size_t size_ = 0, words_ = 0;
  std::vector<std::uint64_t> rows_;
};

inline std::uint64_t count_forward(const LocalGraph& lg, const std::vector<std::uint64_t>& cand, int depth,
                                   std::vector<std::vector<std::uint64_t>>& scratch) {
  const std::size_t words = lg.words();
  std::uint64_t total = 0;
  if (depth == 1) {
    for (std::size_t w = 0; w < words; ++w) total += static_cast<std::uint64_t>(std::popcount(cand[w]));
    return total;
  }
  auto& next = scratch[depth];
  next.resize(words);
  for (std::size_t w = 0; w < words; ++w)
    for (std::uint64_t bits = cand[w]; bits; bits &= bits - 1) {
      const std::size_t i = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
      const std::uint64_t* r = lg.row(i);
      bool any = false;
      for (std::size_t x = 0; x < words; ++x) any |= (next[x] = cand[x] & r[x]) != 0;
      if (any) total += count_forward(lg, next, depth - 1, scratch);
    }
  return total;
}

/// Branch and bound with greedy colouring bounds on a symmetric local graph.
class MaxCliqueSearch {
 public:
  explicit MaxCliqueSearch(const LocalGraph& lg) : lg_(lg) {}

  int run(int lower_bound) {
    best_ = lower_bound;
    std::vector<std::uint64_t> cand(lg_.words(), 0);
    for (std::size_t i = 0; i < lg_.size(); ++i) cand[i / 64] |= std::uint64_t{1} << (i % 64);
    expand(cand, 0);
    return best_;
  }

 private:
  void expand(std::vector<std::uint64_t> cand, int size) {
    const std::size_t words = lg_.words();
    std::vector<std::size_t> order;
    std::vector<int> colour;
    std::vector<std::uint64_t> uncoloured = cand, q(words);
    int c = 0;
    for (bool left = true; left;) {
      ++c;
      q = uncoloured;
      left = false;
      for (std::size_t w = 0; w < words; ++w) {
        while (q[w]) {
          const std::size_t i = w * 64 + static_cast<std::size_t>(std::countr_zero(q[w]));
          q[w] &= q[w] - 1;
          uncoloured[w] &= ~(std::uint64_t{1} << (i % 64));
          const std::uint64_t* r = lg_.row(i);
          for (std::size_t x = w; x < words; ++x) q[x] &= ~r[x];
          order.push_back(i);
          colour.push_back(c);
        }
      }
      for (std::size_t w = 0; w < words; ++w) left |= uncoloured[w] != 0;
    }
    for (std::size_t idx = order.size(); idx-- > 0;) {
      if (size + colour[idx] <= best_) return;
      const std::size_t i = order[idx];
      const std::uint64_t* r = lg_.row(i);
      std::vector<std::uint64_t> next(words);
      bool any = false;
      for (std::size_t x = 0; x < words; ++x) any |= (next[x] = cand[x] & r[x]) != 0;
      if (any)
        expand(std::move(next), size + 1);
      else if (size + 1 > best_)
        best_ = size + 1;
      cand[i / 64] &= ~(std::uint64_t{1} << (i % 64));
    }
  }

  const LocalGraph& lg_;
  int best_ = 0;
};

}  // namespace detail

/// Exact triangle count via forward neighbourhood intersection.
inline std::uint64_t count_triangles(const GraphSample& g) {
  const auto o = detail::orient(g);
  std::vector<char> mark(g.n(), 0);
  std::uint64_t total = 0;
  for (Vertex v = 0; v < g.n(); ++v) {
    for (Vertex x : o.out[v]) mark[x] = 1;
    for (Vertex x : o.out[v])
      for (Vertex y : o.out[x]) total += mark[y];
    for (Vertex x : o.out[v]) mark[x] = 0;
  }
  return total;
}

/// Number of triangles through each vertex.
inline std::vector<std::uint64_t> triangles_per_vertex(const GraphSample& g) {
  const auto o = detail::orient(g);
  std::vector<char> mark(g.n(), 0);
  std::vector<std::uint64_t> per(g.n(), 0);
  for (Vertex v = 0; v < g.n(); ++v) {
    for (Vertex x : o.out[v]) mark[x] = 1;
    for (Vertex x : o.out[v])
      for (Vertex y : o.out[x])
        if (mark[y]) {
          ++per[v];
          ++per[x];
          ++per[y];
        }
    for (Vertex x : o.out[v]) mark[x] = 0;
  }
  return per;
}

inline std::uint64_t count_k_cliques(const GraphSample& g, int k) {
  if (k < 1) throw std::invalid_argument("count_k_cliques: k must be at least 1");
  if (k == 1) return g.n();
  if (k == 2) return g.edge_count();
  if (k == 3) return count_triangles(g);
  const auto o = detail::orient(g);
  if (o.max_out + 1 < static_cast<std::size_t>(k)) return 0;
  std::vector<std::int32_t> local_index(g.n(), -1);
  detail::LocalGraph lg;
  std::vector<std::vector<std::uint64_t>> scratch(k);
  std::uint64_t total = 0;
  for (Vertex v = 0; v < g.n(); ++v) {
    if (o.out[v].size() + 1 < static_cast<std::size_t>(k)) continue;
    lg.build(o, v, local_index, false);
    std::vector<std::uint64_t> all(lg.words(), 0);
    for (std::size_t i = 0; i < lg.size(); ++i) all[i / 64] |= std::uint64_t{1} << (i % 64);
    total += detail::count_forward(lg, all, k - 1, scratch);
  }
  return total;
}

/// Size of a largest clique; 0 for the empty vertex set.
inline int clique_number(const GraphSample& g) {
  if (g.n() == 0) return 0;
  if (g.edge_count() == 0) return 1;
  const auto o = detail::orient(g);
  std::vector<Vertex> by_rank(g.n());
  for (Vertex v = 0; v < g.n(); ++v) by_rank[o.rank[v]] = v;
  std::vector<std::int32_t> local_index(g.n(), -1);
  detail::LocalGraph lg;
  int best = 2;
  for (std::size_t r = g.n(); r-- > 0;) {
    const Vertex v = by_rank[r];
    if (static_cast<int>(o.out[v].size()) + 1 <= best) continue;
    lg.build(o, v, local_index, true);
    best = std::max(best, 1 + detail::MaxCliqueSearch(lg).run(best - 1));
  }
  return best;
}

struct InducedSubgraph {
  GraphSample graph;
  std::vector<Vertex> original;  // new label -> original label
};

/// Induced subgraph on the vertices of weight at most w_c.
inline InducedSubgraph subgraph_leq_weight(const GraphSample& g, const WeightSequence& weights, double w_c) {
  if (weights.size() != g.n()) throw std::invalid_argument("subgraph_leq_weight: weight count differs from n");
  InducedSubgraph out;
  std::vector<std::int64_t> relabel(g.n(), -1);
  for (Vertex v = 0; v < g.n(); ++v)
    if (weights[v] <= w_c) {
      relabel[v] = static_cast<std::int64_t>(out.original.size());
      out.original.push_back(v);
    }
  std::vector<Edge> edges;
  for (auto [u, v] : g.edges())
    if (relabel[u] >= 0 && relabel[v] >= 0)
      edges.emplace_back(static_cast<Vertex>(relabel[u]), static_cast<Vertex>(relabel[v]));
  out.graph = GraphSample(out.original.size(), std::move(edges));
  return out;
}

}  // namespace girg
