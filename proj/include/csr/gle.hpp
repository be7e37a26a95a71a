#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "csr/graph.hpp"

namespace csr {

// Greedy walk embedding of a connected graph into a line: order holds each
// vertex once (first occurrence), walk is the full traversal including
// backtracking revisits.
struct Embedding {
  std::vector<int> order;
  std::vector<int> walk;
};

namespace detail {

// Neighborhood-similarity index as an exact rational, for tie-free
// comparison: #((Adj(u) n Adj(v)) u {u, v}) / #(Adj(u) u Adj(v)).
// Can exceed 1; the denominator-zero case is defined as 0.
inline std::pair<std::int64_t, std::int64_t> similarity_ratio(
    const std::vector<std::vector<int>>& adj, int u, int v, bool normalized = false) {
  std::vector<int> inter, uni;
  std::set_intersection(adj[u].begin(), adj[u].end(), adj[v].begin(), adj[v].end(),
                        std::back_inserter(inter));
  std::set_union(adj[u].begin(), adj[u].end(), adj[v].begin(), adj[v].end(),
                 std::back_inserter(uni));
  // numerator set: (Adj(u) n Adj(v)) u {u, v}
  std::int64_t num = static_cast<std::int64_t>(inter.size());
  if (!std::binary_search(inter.begin(), inter.end(), u)) ++num;
  if (!std::binary_search(inter.begin(), inter.end(), v)) ++num;
  std::int64_t den = static_cast<std::int64_t>(uni.size());
  if (normalized) {
    // denominator also unions {u, v}, bounding the index by 1
    if (!std::binary_search(uni.begin(), uni.end(), u)) ++den;
    if (!std::binary_search(uni.begin(), uni.end(), v)) ++den;
  }
  return {num, den};
}

}  // namespace detail

inline double similarity(const SimpleGraph& g, int u, int v, bool normalized = false) {
  if (u == v || u < 0 || v < 0 || u >= g.n || v >= g.n)
    throw std::invalid_argument("similarity: invalid vertex pair");
  const auto adj = g.adjacency_list();
  const auto [num, den] = detail::similarity_ratio(adj, u, v, normalized);
  if (den == 0) return 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

inline Embedding gle_embed(const SimpleGraph& g, bool normalized_similarity = false) {
  if (!g.connected()) throw std::runtime_error("graph not connected");
  if (g.n == 0) return {};
  const auto adj = g.adjacency_list();

  // Start at the minimum-degree vertex, ties by ascending id.
  int start = 0;
  for (int v = 1; v < g.n; ++v)
    if (adj[v].size() < adj[start].size()) start = v;

  std::vector<char> in_b(g.n, 1);
  in_b[start] = 0;
  int b_count = g.n - 1;

  Embedding emb;
  emb.walk.push_back(start);
  std::vector<int> stack{start};
  std::vector<char> in_order(g.n, 0);
  emb.order.push_back(start);
  in_order[start] = 1;

  while (b_count > 0) {
    const int cur = stack.back();
    int best = -1;
    std::pair<std::int64_t, std::int64_t> best_ratio{0, 1};
    for (int v : adj[cur]) {
      if (!in_b[v]) continue;
      const auto r = detail::similarity_ratio(adj, cur, v, normalized_similarity);
      // cross-multiplied comparison; similarity ties by ascending id, and
      // adjacency lists are ascending already
      if (best == -1 || r.first * best_ratio.second > best_ratio.first * r.second) {
        best = v;
        best_ratio = r;
      }
    }
    if (best >= 0) {
      in_b[best] = 0;
      --b_count;
      stack.push_back(best);
      emb.walk.push_back(best);
      if (!in_order[best]) {
        emb.order.push_back(best);
        in_order[best] = 1;
      }
    } else {
      stack.pop_back();
      if (stack.empty())
        throw std::runtime_error("graph not connected");  // unreachable on valid input
      emb.walk.push_back(stack.back());
    }
  }
  return emb;
}

}  // namespace csr
