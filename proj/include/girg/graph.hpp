#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "girg/model.hpp"

namespace girg {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Immutable labelled simple graph in compressed sparse row form with
/// sorted neighbour lists.
class GraphSample {
 public:
  GraphSample() = default;

  /// Builds from an arbitrary edge list; self-loops are rejected and
  /// duplicates (in either orientation) collapse.
  GraphSample(std::size_t n, std::vector<Edge> edges) : n_(n) {
    for (auto& [u, v] : edges) {
      if (u == v) throw std::invalid_argument("GraphSample: self-loop");
      if (u >= n || v >= n) throw std::out_of_range("GraphSample: vertex out of range");
      if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    m_ = edges.size();
    offsets_.assign(n + 1, 0);
    for (auto [u, v] : edges) {
      ++offsets_[u + 1];
      ++offsets_[v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    adj_.resize(2 * m_);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (auto [u, v] : edges) {
      adj_[fill[u]++] = v;
      adj_[fill[v]++] = u;
    }
    for (std::size_t v = 0; v < n; ++v) std::sort(adj_.begin() + offsets_[v], adj_.begin() + offsets_[v + 1]);
  }

  static GraphSample empty(std::size_t n) { return GraphSample(n, {}); }
  static GraphSample complete(std::size_t n) {
    std::vector<Edge> e;
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v) e.emplace_back(u, v);
    return GraphSample(n, std::move(e));
  }

  /// Graph on n <= 11 vertices from a bitmask over lexicographically ordered pairs.
  static GraphSample from_edge_mask(std::size_t n, std::uint64_t mask) {
    std::vector<Edge> e;
    std::size_t bit = 0;
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v, ++bit)
        if (mask >> bit & 1) e.emplace_back(u, v);
    return GraphSample(n, std::move(e));
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return m_; }
  std::size_t degree(Vertex v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  std::span<const Vertex> neighbors(Vertex v) const noexcept {
    return {adj_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

  bool has_edge(Vertex u, Vertex v) const noexcept {
    if (u == v || u >= n_ || v >= n_) return false;
    if (degree(u) > degree(v)) std::swap(u, v);
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  /// Edges (u, v) with u < v in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(m_);
    for (Vertex u = 0; u < n_; ++u)
      for (Vertex v : neighbors(u))
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  /// Bit index of pair {u, v}, u < v, in lexicographic pair order.
  static std::size_t pair_index(std::size_t n, Vertex u, Vertex v) noexcept {
    return u * n - u * (u + 1) / 2 + (v - u - 1);
  }

  std::uint64_t edge_mask() const {
    if (n_ * (n_ - (n_ > 0)) / 2 > 64) throw std::length_error("edge_mask: more than 64 vertex pairs");
    std::uint64_t mask = 0;
    for (auto [u, v] : edges()) mask |= std::uint64_t{1} << pair_index(n_, u, v);
    return mask;
  }

  friend bool operator==(const GraphSample& a, const GraphSample& b) noexcept {
    return a.n_ == b.n_ && a.offsets_ == b.offsets_ && a.adj_ == b.adj_;
  }

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<Vertex> adj_;
};

/// FNV-1a digest of the canonical parameter string.
inline std::string params_digest(const ModelParams& p) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "n=%llu;beta=%.17g;w0=%.17g;lambda=%.17g;d=%d;p=%s",
                static_cast<unsigned long long>(p.n), p.beta, p.w0, p.lambda, p.d, p.norm.to_string().c_str());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char* c = buf; *c; ++c) {
    h ^= static_cast<unsigned char>(*c);
    h *= 0x100000001b3ULL;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

struct EdgeListHeader {
  std::size_t n = 0;
  std::string params_digest;
  std::uint64_t seed = 0;
};

/// One-line JSON header followed by "u v" lines, sorted and 0-indexed.
inline void write_edge_list(std::ostream& out, const GraphSample& g, const EdgeListHeader& header) {
  nlohmann::ordered_json h;
  h["n"] = g.n();
  h["params_digest"] = header.params_digest;
  h["seed"] = header.seed;
  out << h.dump() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

inline std::pair<GraphSample, EdgeListHeader> read_edge_list(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_edge_list: missing header");
  const auto h = nlohmann::json::parse(line);
  EdgeListHeader header{h.at("n").get<std::size_t>(), h.at("params_digest").get<std::string>(),
                        h.at("seed").get<std::uint64_t>()};
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Vertex u, v;
    if (!(ls >> u >> v)) throw std::runtime_error("read_edge_list: malformed edge line");
    edges.emplace_back(u, v);
  }
  return {GraphSample(header.n, std::move(edges)), header};
}

}  // namespace girg
