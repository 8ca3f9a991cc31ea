#include "structack/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "structack/assignment.hpp"
#include "structack/rng.hpp"

namespace structack {

namespace {

// Splits `count` items into 10 near-equal contiguous subsets, remainder
// spread over the first ones.
std::vector<int> decile_sizes(int count) {
  std::vector<int> sizes(10, count / 10);
  for (int i = 0; i < count % 10; ++i) ++sizes[i];
  return sizes;
}

// Enumerates all absent non-self pairs; only used as a fallback when
// rejection sampling stalls near-complete graphs.
std::vector<Edge> absent_pairs(const Graph& g) {
  std::vector<Edge> out;
  for (NodeId u = 0; u < g.node_count(); ++u)
    for (NodeId v = u + 1; v < g.node_count(); ++v)
      if (!g.has_edge(u, v)) out.push_back(Edge{u, v});
  return out;
}

SimilarityMatrix build_similarity(const Graph& g, SimilarityMeasure measure,
                                  std::span<const NodeId> u1, std::span<const NodeId> u2,
                                  std::uint64_t seed, const StructackOptions& options) {
  switch (measure) {
    case SimilarityMeasure::Katz: {
      double alpha = options.katz_alpha;
      if (options.katz_spectral_rescale) {
        const double radius = spectral_radius_estimate(g);
        if (radius > 0.0) alpha = options.katz_alpha / radius;
      }
      return katz_similarity(g, alpha, options.katz_iterations, u1, u2);
    }
    case SimilarityMeasure::Community:
      return community_similarity(g, seed, u1, u2);
    case SimilarityMeasure::Distance:
      return distance_similarity(g, u1, u2);
    case SimilarityMeasure::Random:
      return random_similarity(static_cast<int>(u1.size()), seed);
  }
  throw std::invalid_argument("build_similarity: unknown measure");
}

}  // namespace

std::int64_t attack_budget(const Graph& g, double rate) {
  if (rate < 0.0) throw std::invalid_argument("attack_budget: negative rate");
  return static_cast<std::int64_t>(std::floor(rate * static_cast<double>(g.edge_count())));
}

AttackPlan structack_attack(const Graph& g, CentralityMeasure centrality, SimilarityMeasure similarity,
                     double rate, std::uint64_t seed, const StructackOptions& options) {
  AttackPlan plan;
  plan.attack_name = std::string(centrality_abbreviation(centrality)) + "*" +
                     std::string(similarity_abbreviation(similarity));
  plan.rate = rate;
  plan.seed = seed;
  plan.budget = attack_budget(g, rate);
  const std::int64_t k = plan.budget;
  if (k == 0) return plan;
  if (2 * k > g.node_count())
    throw std::invalid_argument("structack: budget 2k=" + std::to_string(2 * k) +
                                " exceeds node count " + std::to_string(g.node_count()));

  const CentralityScores scores = compute_centrality(g, centrality, seed);
  const std::vector<NodeId> selected = lowest_centrality_nodes(scores, static_cast<int>(2 * k));
  const std::span<const NodeId> u1(selected.data(), k);
  const std::span<const NodeId> u2(selected.data() + k, k);

  const SimilarityMatrix sim = build_similarity(g, similarity, u1, u2, seed, options);

  // Minimize total similarity of linked pairs; raw distances are negated
  // since a higher distance means a lower similarity.
  Matrix cost = sim.values;
  if (!sim.higher_is_closer)
    for (double& c : cost.data()) c = -c;
  const AssignmentResult assignment = min_cost_assignment(cost);

  // Matched pairs that collide with existing edges free their U2 partner;
  // colliding U1 nodes then take the least-similar free partner left.
  std::vector<char> used(k, 0);
  std::vector<int> pending;
  for (int i = 0; i < k; ++i) {
    const int j = assignment.permutation[i];
    if (g.has_edge(u1[i], u2[j])) {
      pending.push_back(i);
    } else {
      plan.edges_to_add.add(u1[i], u2[j]);
      used[j] = 1;
    }
  }
  for (const int i : pending) {
    int best = -1;
    for (int j = 0; j < k; ++j) {
      if (used[j] || g.has_edge(u1[i], u2[j])) continue;
      if (best == -1) {
        best = j;
        continue;
      }
      const double a = sim.values(i, j), b = sim.values(i, best);
      const bool less_similar = sim.higher_is_closer ? a < b : a > b;
      if (less_similar) best = j;
    }
    if (best == -1) {
      ++plan.dropped;
      continue;
    }
    plan.edges_to_add.add(u1[i], u2[best]);
    used[best] = 1;
  }
  return plan;
}

AttackPlan random_attack(const Graph& g, double rate, std::uint64_t seed) {
  AttackPlan plan;
  plan.attack_name = "Random";
  plan.rate = rate;
  plan.seed = seed;
  plan.budget = attack_budget(g, rate);
  const std::int64_t k = plan.budget;
  if (k == 0) return plan;

  const std::int64_t n = g.node_count();
  const std::int64_t absent = n * (n - 1) / 2 - g.edge_count();
  if (absent < k)
    throw std::invalid_argument("random_attack: only " + std::to_string(absent) +
                                " absent pairs for budget " + std::to_string(k));

  Rng rng(seed);
  std::int64_t rejections = 0;
  while (static_cast<std::int64_t>(plan.edges_to_add.size()) < k) {
    if (rejections > 1000 * k + 1000) {
      // Dense corner: enumerate what is left and sample exactly.
      std::vector<Edge> pool = absent_pairs(g);
      std::erase_if(pool, [&](const Edge& e) { return plan.edges_to_add.contains(e.u, e.v); });
      while (static_cast<std::int64_t>(plan.edges_to_add.size()) < k) {
        const std::size_t at = static_cast<std::size_t>(uniform_below(rng, pool.size()));
        plan.edges_to_add.add(pool[at].u, pool[at].v);
        pool.erase(pool.begin() + at);
      }
      break;
    }
    const NodeId u = static_cast<NodeId>(uniform_below(rng, n));
    const NodeId v = static_cast<NodeId>(uniform_below(rng, n));
    if (u == v || g.has_edge(u, v) || !plan.edges_to_add.add(u, v)) ++rejections;
  }
  return plan;
}

AttackPlan dice_attack(const Graph& g, double rate, std::uint64_t seed) {
  if (!g.has_labels()) throw std::invalid_argument("dice_attack: graph has no labels");
  AttackPlan plan;
  plan.attack_name = "DICE";
  plan.rate = rate;
  plan.seed = seed;
  plan.budget = attack_budget(g, rate);
  const std::int64_t k = plan.budget;
  if (k == 0) return plan;

  const std::vector<int>& y = g.labels();
  std::vector<Edge> intra;
  std::int64_t inter_edges = 0;
  for (const Edge& e : g.edges()) {
    if (y[e.u] == y[e.v])
      intra.push_back(e);
    else
      ++inter_edges;
  }
  std::vector<std::int64_t> class_size(g.label_count(), 0);
  for (const int label : y) ++class_size[label];
  const std::int64_t n = g.node_count();
  std::int64_t cross_pairs = n * (n - 1) / 2;
  for (const std::int64_t s : class_size) cross_pairs -= s * (s - 1) / 2;
  std::int64_t inter_absent = cross_pairs - inter_edges;

  Rng rng(seed);
  auto try_add = [&]() -> bool {
    if (inter_absent <= static_cast<std::int64_t>(plan.edges_to_add.size())) return false;
    std::int64_t rejections = 0;
    while (true) {
      if (rejections > 1000 * k + 1000) {
        std::vector<Edge> pool = absent_pairs(g);
        std::erase_if(pool, [&](const Edge& e) {
          return y[e.u] == y[e.v] || plan.edges_to_add.contains(e.u, e.v);
        });
        if (pool.empty()) return false;
        const std::size_t at = static_cast<std::size_t>(uniform_below(rng, pool.size()));
        plan.edges_to_add.add(pool[at].u, pool[at].v);
        return true;
      }
      const NodeId u = static_cast<NodeId>(uniform_below(rng, n));
      const NodeId v = static_cast<NodeId>(uniform_below(rng, n));
      if (u == v || y[u] == y[v] || g.has_edge(u, v) ||
          plan.edges_to_add.contains(u, v)) {
        ++rejections;
        continue;
      }
      plan.edges_to_add.add(u, v);
      return true;
    }
  };
  auto try_remove = [&]() -> bool {
    if (intra.empty()) return false;
    const std::size_t at = static_cast<std::size_t>(uniform_below(rng, intra.size()));
    plan.edges_to_remove.add(intra[at].u, intra[at].v);
    intra[at] = intra.back();
    intra.pop_back();
    return true;
  };

  for (std::int64_t step = 0; step < k; ++step) {
    const bool remove_first = uniform_below(rng, 2) == 0;
    if (remove_first) {
      if (!try_remove() && !try_add()) break;
    } else {
      if (!try_add() && !try_remove()) break;
    }
  }
  return plan;
}

std::vector<std::vector<NodeId>> degree_deciles(const Graph& g) {
  std::vector<NodeId> order(g.node_count());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (g.degree(a) != g.degree(b)) return g.degree(a) < g.degree(b);
    return a < b;
  });
  std::vector<std::vector<NodeId>> deciles(10);
  const std::vector<int> sizes = decile_sizes(g.node_count());
  std::size_t at = 0;
  for (int d = 0; d < 10; ++d) {
    deciles[d].assign(order.begin() + at, order.begin() + at + sizes[d]);
    std::sort(deciles[d].begin(), deciles[d].end());
    at += sizes[d];
  }
  return deciles;
}

std::vector<std::vector<NodeId>> distance_deciles(const Graph& g, NodeId source) {
  const std::vector<int> dist = bfs_distances(g, source);
  std::vector<NodeId> order;
  order.reserve(g.node_count() - 1);
  for (NodeId u = 0; u < g.node_count(); ++u)
    if (u != source) order.push_back(u);
  auto effective = [&](NodeId u) { return dist[u] < 0 ? g.node_count() : dist[u]; };
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (effective(a) != effective(b)) return effective(a) < effective(b);
    return a < b;
  });
  std::vector<std::vector<NodeId>> deciles(10);
  const std::vector<int> sizes = decile_sizes(static_cast<int>(order.size()));
  std::size_t at = 0;
  for (int d = 0; d < 10; ++d) {
    deciles[d].assign(order.begin() + at, order.begin() + at + sizes[d]);
    at += sizes[d];
  }
  return deciles;
}

AttackPlan degree_quantile_injection(const Graph& g, int decile_i, int decile_j, double rate,
                                     std::uint64_t seed) {
  if (g.node_count() < 10)
    throw std::invalid_argument("degree_quantile_injection: need at least 10 nodes");
  if (decile_i < 0 || decile_i > 9 || decile_j < 0 || decile_j > 9)
    throw std::invalid_argument("degree_quantile_injection: decile out of range");
  AttackPlan plan;
  plan.attack_name = "degree-quantile(" + std::to_string(decile_i) + "," +
                     std::to_string(decile_j) + ")";
  plan.rate = rate;
  plan.seed = seed;
  plan.budget = attack_budget(g, rate);
  const std::int64_t k = plan.budget;
  if (k == 0) return plan;

  const std::vector<std::vector<NodeId>> deciles = degree_deciles(g);
  const std::vector<NodeId>& si = deciles[decile_i];
  const std::vector<NodeId>& sj = deciles[decile_j];
  const std::int64_t pairs =
      decile_i == decile_j
          ? static_cast<std::int64_t>(si.size()) * (static_cast<std::int64_t>(si.size()) - 1) / 2
          : static_cast<std::int64_t>(si.size()) * static_cast<std::int64_t>(sj.size());
  if (pairs < k)
    throw std::invalid_argument("degree_quantile_injection: only " + std::to_string(pairs) +
                                " candidate pairs for budget " + std::to_string(k));

  Rng rng(seed);
  while (static_cast<std::int64_t>(plan.edges_to_add.size()) < k) {
    const NodeId u = si[uniform_below(rng, si.size())];
    const NodeId v = sj[uniform_below(rng, sj.size())];
    if (u == v) continue;
    plan.edges_to_add.add(u, v);
  }
  return plan;
}

AttackPlan distance_quantile_injection(const Graph& g, int trial, double rate,
                                       std::uint64_t seed) {
  if (trial < 1 || trial > 10)
    throw std::invalid_argument("distance_quantile_injection: trial must be in [1, 10]");
  AttackPlan plan;
  plan.attack_name = "distance-quantile(" + std::to_string(trial) + ")";
  plan.rate = rate;
  plan.seed = seed;
  plan.budget = attack_budget(g, rate);
  const std::int64_t k = plan.budget;
  if (k == 0) return plan;

  Rng rng(seed);
  for (std::int64_t step = 0; step < k; ++step) {
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      const NodeId u = static_cast<NodeId>(uniform_below(rng, g.node_count()));
      const std::vector<std::vector<NodeId>> deciles = distance_deciles(g, u);
      const std::vector<NodeId>& subset = deciles[trial - 1];
      if (subset.empty()) continue;
      const NodeId v = subset[uniform_below(rng, subset.size())];
      if (g.has_edge(u, v) || plan.edges_to_add.contains(u, v)) continue;
      plan.edges_to_add.add(u, v);
      placed = true;
    }
    if (!placed)
      throw std::runtime_error("distance_quantile_injection: resample limit exceeded at edge " +
                               std::to_string(step));
  }
  return plan;
}

Graph apply_plan(const Graph& g, const AttackPlan& plan) {
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(g.edge_count()) + plan.edges_to_add.size());
  for (const Edge& e : g.edges())
    if (!plan.edges_to_remove.contains(e.u, e.v)) edges.push_back(e);
  for (const Edge& e : plan.edges_to_add.edges()) {
    if (e.u < 0 || e.v >= g.node_count())
      throw std::out_of_range("apply_plan: endpoint out of range");
    edges.push_back(e);
  }
  Graph out = Graph::from_edges(g.node_count(), edges);
  out.set_original_ids(g.original_ids());
  if (g.has_features()) out.set_features(g.features());
  if (g.has_labels()) out.set_labels(g.labels());
  return out;
}

void to_json(nlohmann::json& j, const AttackPlan& plan) {
  nlohmann::json add = nlohmann::json::array();
  for (const Edge& e : plan.edges_to_add.edges()) add.push_back({e.u, e.v});
  nlohmann::json remove = nlohmann::json::array();
  for (const Edge& e : plan.edges_to_remove.edges()) remove.push_back({e.u, e.v});
  j = nlohmann::json{{"attack_name", plan.attack_name}, {"k", plan.budget},
                     {"r", plan.rate},                  {"seed", plan.seed},
                     {"add", std::move(add)},           {"remove", std::move(remove)}};
  if (plan.dropped > 0) j["dropped"] = plan.dropped;
}

void from_json(const nlohmann::json& j, AttackPlan& plan) {
  plan = AttackPlan{};
  plan.attack_name = j.at("attack_name").get<std::string>();
  plan.budget = j.at("k").get<std::int64_t>();
  plan.rate = j.at("r").get<double>();
  plan.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& pair : j.at("add")) plan.edges_to_add.add(pair.at(0), pair.at(1));
  for (const auto& pair : j.at("remove")) plan.edges_to_remove.add(pair.at(0), pair.at(1));
  plan.dropped = j.value("dropped", 0);
}

}  // namespace structack
