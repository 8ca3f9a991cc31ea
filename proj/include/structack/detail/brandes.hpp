// brandes.hpp — Brandes' betweenness accumulation, templated on the value
// type so the exactness tests can run it over rationals while production
// uses doubles. Scores are raw dependency sums over ordered source/target
// pairs, no normalization.

#pragma once

#include <queue>
#include <vector>

#include "structack/graph.hpp"

namespace structack::detail {

template <class Value>
std::vector<Value> brandes_betweenness(const Graph& g) {
  const int n = g.node_count();
  std::vector<Value> centrality(n, Value(0));
  std::vector<int> dist(n);
  std::vector<Value> sigma(n), delta(n);
  std::vector<std::vector<NodeId>> predecessors(n);
  std::vector<NodeId> order;
  order.reserve(n);
  std::queue<NodeId> frontier;

  for (NodeId s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), Value(0));
    std::fill(delta.begin(), delta.end(), Value(0));
    for (auto& preds : predecessors) preds.clear();
    order.clear();

    dist[s] = 0;
    sigma[s] = Value(1);
    frontier.push(s);
    while (!frontier.empty()) {
      const NodeId u = frontier.front();
      frontier.pop();
      order.push_back(u);
      for (const NodeId v : g.neighbors(u)) {
        if (dist[v] == -1) {
          dist[v] = dist[u] + 1;
          frontier.push(v);
        }
        if (dist[v] == dist[u] + 1) {
          sigma[v] += sigma[u];
          predecessors[v].push_back(u);
        }
      }
    }

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const NodeId w = *it;
      for (const NodeId u : predecessors[w])
        delta[u] += sigma[u] / sigma[w] * (Value(1) + delta[w]);
      if (w != s) centrality[w] += delta[w];
    }
  }
  return centrality;
}

}  // namespace structack::detail
