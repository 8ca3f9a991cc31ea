#include "structack/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "structack/rng.hpp"

namespace structack {

namespace {

// Weighted multigraph view used across Louvain levels. Self-loop weight
// counts twice in a node's strength, matching the usual convention.
struct LevelGraph {
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::vector<double> self_loop;
  std::vector<double> strength;
  double total_weight = 0.0;  // 2m

  int size() const { return static_cast<int>(adj.size()); }
};

LevelGraph level_from_graph(const Graph& g) {
  LevelGraph lg;
  lg.adj.resize(g.node_count());
  lg.self_loop.assign(g.node_count(), 0.0);
  lg.strength.assign(g.node_count(), 0.0);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    for (const NodeId v : g.neighbors(u)) lg.adj[u].emplace_back(v, 1.0);
    lg.strength[u] = g.degree(u);
    lg.total_weight += lg.strength[u];
  }
  return lg;
}

struct LocalMoveResult {
  std::vector<int> community;  // dense ids
  int community_count = 0;
  double modularity = 0.0;
  bool moved = false;
};

double level_modularity(const LevelGraph& lg, const std::vector<double>& internal,
                        const std::vector<double>& total) {
  double q = 0.0;
  const double two_m = lg.total_weight;
  for (std::size_t c = 0; c < total.size(); ++c) {
    const double frac = total[c] / two_m;
    q += internal[c] / two_m - frac * frac;
  }
  return q;
}

LocalMoveResult local_moving(const LevelGraph& lg, const std::vector<int>& visit_order) {
  const int n = lg.size();
  LocalMoveResult result;
  std::vector<int>& comm = result.community;
  comm.resize(n);
  std::iota(comm.begin(), comm.end(), 0);

  // internal[c] counts both directions of internal edges plus 2·self.
  std::vector<double> internal(n), total(n);
  for (int i = 0; i < n; ++i) {
    internal[i] = 2.0 * lg.self_loop[i];
    total[i] = lg.strength[i];
  }

  std::vector<double> weight_to(n, -1.0);
  std::vector<int> touched;
  const double two_m = lg.total_weight;

  bool changed = true;
  for (int pass = 0; changed && pass < 128; ++pass) {
    changed = false;
    for (const int node : visit_order) {
      const int old_comm = comm[node];

      touched.clear();
      weight_to[old_comm] = 0.0;
      touched.push_back(old_comm);
      for (const auto& [nbr, w] : lg.adj[node]) {
        const int c = comm[nbr];
        if (weight_to[c] < 0.0) {
          weight_to[c] = 0.0;
          touched.push_back(c);
        }
        weight_to[c] += w;
      }

      // Remove the node, then insert where the gain is largest.
      comm[node] = -1;
      internal[old_comm] -= 2.0 * (weight_to[old_comm] + lg.self_loop[node]);
      total[old_comm] -= lg.strength[node];

      int best = old_comm;
      double best_gain = weight_to[old_comm] - total[old_comm] * lg.strength[node] / two_m;
      for (const int c : touched) {
        const double gain = weight_to[c] - total[c] * lg.strength[node] / two_m;
        if (gain > best_gain + 1e-12 || (std::fabs(gain - best_gain) <= 1e-12 && c < best)) {
          best_gain = gain;
          best = c;
        }
      }

      comm[node] = best;
      internal[best] += 2.0 * (weight_to[best] + lg.self_loop[node]);
      total[best] += lg.strength[node];
      if (best != old_comm) {
        changed = true;
        result.moved = true;
      }
      for (const int c : touched) weight_to[c] = -1.0;
    }
  }

  // Dense relabel in order of smallest member node.
  std::vector<int> relabel(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    if (relabel[comm[i]] == -1) relabel[comm[i]] = next++;
    comm[i] = relabel[comm[i]];
  }
  result.community_count = next;

  std::vector<double> internal2(next, 0.0), total2(next, 0.0);
  for (int i = 0; i < n; ++i) total2[comm[i]] += lg.strength[i];
  for (int i = 0; i < n; ++i) {
    internal2[comm[i]] += 2.0 * lg.self_loop[i];
    for (const auto& [nbr, w] : lg.adj[i])
      if (comm[nbr] == comm[i]) internal2[comm[i]] += w;
  }
  result.modularity = level_modularity(lg, internal2, total2);
  return result;
}

LevelGraph aggregate(const LevelGraph& lg, const std::vector<int>& comm, int count) {
  LevelGraph out;
  out.adj.resize(count);
  out.self_loop.assign(count, 0.0);
  out.strength.assign(count, 0.0);
  out.total_weight = lg.total_weight;

  std::vector<std::unordered_map<int, double>> between(count);
  for (int i = 0; i < lg.size(); ++i) {
    const int ci = comm[i];
    out.self_loop[ci] += lg.self_loop[i];
    for (const auto& [nbr, w] : lg.adj[i]) {
      const int cj = comm[nbr];
      if (ci == cj) {
        out.self_loop[ci] += w / 2.0;  // each internal edge appears twice
      } else {
        between[ci][cj] += w;
      }
    }
  }
  for (int c = 0; c < count; ++c) {
    std::vector<std::pair<int, double>> row(between[c].begin(), between[c].end());
    std::sort(row.begin(), row.end());
    out.adj[c] = std::move(row);
    double s = 2.0 * out.self_loop[c];
    for (const auto& [nbr, w] : out.adj[c]) s += w;
    out.strength[c] = s;
  }
  return out;
}

Matrix community_density(const Graph& g, const std::vector<int>& comm, int count) {
  std::vector<std::int64_t> size(count, 0);
  for (const int c : comm) ++size[c];
  Matrix counts(count, count, 0.0);
  for (const Edge& e : g.edges()) {
    const int a = comm[e.u], b = comm[e.v];
    counts(a, b) += 1.0;
    if (a != b) counts(b, a) += 1.0;
  }
  Matrix density(count, count, 0.0);
  for (int a = 0; a < count; ++a) {
    for (int b = 0; b < count; ++b) {
      if (a == b) {
        if (size[a] > 1)
          density(a, a) = 2.0 * counts(a, a) / (static_cast<double>(size[a]) * (size[a] - 1));
      } else {
        density(a, b) = counts(a, b) / (static_cast<double>(size[a]) * size[b]);
      }
    }
  }
  return density;
}

}  // namespace

CommunityAssignment louvain_communities(const Graph& g, std::uint64_t seed, bool shuffle) {
  const int n = g.node_count();
  CommunityAssignment out;
  out.community_of.resize(n);
  std::iota(out.community_of.begin(), out.community_of.end(), 0);
  out.community_count = n;
  if (g.edge_count() == 0) {
    out.density = Matrix(n, n, 0.0);
    return out;
  }

  Rng rng(seed);
  LevelGraph level = level_from_graph(g);
  std::vector<int> node_to_comm(n);
  std::iota(node_to_comm.begin(), node_to_comm.end(), 0);

  while (true) {
    std::vector<int> order(level.size());
    std::iota(order.begin(), order.end(), 0);
    if (shuffle) shuffle_in_place(order, rng);

    LocalMoveResult moved = local_moving(level, order);
    out.pass_modularity.push_back(moved.modularity);
    if (!moved.moved) break;
    for (int i = 0; i < n; ++i) node_to_comm[i] = moved.community[node_to_comm[i]];
    if (moved.community_count == level.size()) break;
    level = aggregate(level, moved.community, moved.community_count);
  }

  // Final dense relabel by smallest original member.
  std::vector<int> relabel(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    if (relabel[node_to_comm[i]] == -1) relabel[node_to_comm[i]] = next++;
    out.community_of[i] = relabel[node_to_comm[i]];
  }
  out.community_count = next;
  out.density = community_density(g, out.community_of, next);
  return out;
}

double modularity(const Graph& g, std::span<const int> community_of) {
  if (static_cast<int>(community_of.size()) != g.node_count())
    throw std::invalid_argument("modularity: assignment size mismatch");
  if (g.edge_count() == 0) return 0.0;
  const int count = *std::max_element(community_of.begin(), community_of.end()) + 1;
  std::vector<double> internal(count, 0.0), degree_sum(count, 0.0);
  for (const Edge& e : g.edges())
    if (community_of[e.u] == community_of[e.v]) internal[community_of[e.u]] += 1.0;
  for (NodeId u = 0; u < g.node_count(); ++u) degree_sum[community_of[u]] += g.degree(u);
  const double m = static_cast<double>(g.edge_count());
  double q = 0.0;
  for (int c = 0; c < count; ++c) {
    const double frac = degree_sum[c] / (2.0 * m);
    q += internal[c] / m - frac * frac;
  }
  return q;
}

SimilarityMatrix community_similarity(const Graph& g, std::uint64_t seed,
                                      std::span<const NodeId> u1, std::span<const NodeId> u2) {
  if (u1.empty() || u2.empty())
    throw std::invalid_argument("community_similarity: empty node set");
  const CommunityAssignment communities = louvain_communities(g, seed);
  SimilarityMatrix out;
  out.measure = SimilarityMeasure::Community;
  out.rows.assign(u1.begin(), u1.end());
  out.cols.assign(u2.begin(), u2.end());
  out.values = Matrix(static_cast<int>(u1.size()), static_cast<int>(u2.size()));
  for (std::size_t i = 0; i < u1.size(); ++i)
    for (std::size_t j = 0; j < u2.size(); ++j)
      out.values(static_cast<int>(i), static_cast<int>(j)) =
          communities.density(communities.community_of[u1[i]], communities.community_of[u2[j]]);
  return out;
}

SimilarityMatrix distance_similarity(const Graph& g, std::span<const NodeId> u1,
                                     std::span<const NodeId> u2) {
  SimilarityMatrix out;
  out.measure = SimilarityMeasure::Distance;
  out.higher_is_closer = false;
  out.rows.assign(u1.begin(), u1.end());
  out.cols.assign(u2.begin(), u2.end());
  out.values = Matrix(static_cast<int>(u1.size()), static_cast<int>(u2.size()));
  for (std::size_t i = 0; i < u1.size(); ++i) {
    const std::vector<int> dist = bfs_distances(g, u1[i]);
    for (std::size_t j = 0; j < u2.size(); ++j) {
      const int d = dist[u2[j]];
      out.values(static_cast<int>(i), static_cast<int>(j)) = d < 0 ? g.node_count() : d;
    }
  }
  return out;
}

SimilarityMatrix katz_similarity(const Graph& g, double alpha, int iterations,
                                 std::span<const NodeId> u1, std::span<const NodeId> u2) {
  if (alpha <= 0.0) throw std::invalid_argument("katz_similarity: alpha must be positive");
  if (iterations < 1) throw std::invalid_argument("katz_similarity: iterations must be >= 1");

  SimilarityMatrix out;
  out.measure = SimilarityMeasure::Katz;
  out.rows.assign(u1.begin(), u1.end());
  out.cols.assign(u2.begin(), u2.end());
  out.values = Matrix(static_cast<int>(u1.size()), static_cast<int>(u2.size()));
  if (g.edge_count() > 0 && alpha * spectral_radius_estimate(g, 50) >= 1.0)
    out.divergence_warning = true;

  const int n = g.node_count();
  std::vector<double> current(n), next(n);
  for (std::size_t j = 0; j < u2.size(); ++j) {
    std::fill(current.begin(), current.end(), 0.0);
    current[u2[j]] = 1.0;  // i = 0 identity term
    for (int it = 1; it <= iterations; ++it) {
      bool finite = true;
      for (NodeId u = 0; u < n; ++u) {
        double sum = 0.0;
        for (const NodeId v : g.neighbors(u)) sum += current[v];
        const double value = alpha * sum + (u == u2[j] ? 1.0 : 0.0);
        next[u] = value;
        finite &= std::isfinite(value);
      }
      if (!finite)
        throw std::runtime_error("katz_similarity: overflow at iteration " + std::to_string(it));
      current.swap(next);
    }
    for (std::size_t i = 0; i < u1.size(); ++i)
      out.values(static_cast<int>(i), static_cast<int>(j)) = current[u1[i]];
  }
  return out;
}

SimilarityMatrix random_similarity(int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("random_similarity: k must be >= 1");
  SimilarityMatrix out;
  out.measure = SimilarityMeasure::Random;
  out.values = Matrix(k, k);
  Rng rng(seed);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) out.values(i, j) = uniform_unit(rng);
  return out;
}

double spectral_radius_estimate(const Graph& g, int iterations) {
  const int n = g.node_count();
  if (n == 0 || g.edge_count() == 0) return 0.0;
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), ax(n);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    for (NodeId u = 0; u < n; ++u) {
      double sum = 0.0;
      for (const NodeId v : g.neighbors(u)) sum += x[v];
      ax[u] = sum;
    }
    double norm = 0.0;
    for (const double v : ax) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    lambda = 0.0;
    for (NodeId u = 0; u < n; ++u) lambda += x[u] * ax[u];  // Rayleigh quotient, ||x|| = 1
    for (NodeId u = 0; u < n; ++u) x[u] = ax[u] / norm;
  }
  return lambda;
}

std::string_view similarity_abbreviation(SimilarityMeasure measure) {
  switch (measure) {
    case SimilarityMeasure::Katz: return "Katz";
    case SimilarityMeasure::Community: return "Comm";
    case SimilarityMeasure::Distance: return "Dist";
    case SimilarityMeasure::Random: return "Random";
  }
  return "?";
}

SimilarityMeasure parse_similarity(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "katz") return SimilarityMeasure::Katz;
  if (lower == "comm" || lower == "community") return SimilarityMeasure::Community;
  if (lower == "dist" || lower == "distance") return SimilarityMeasure::Distance;
  if (lower == "random" || lower == "rnd") return SimilarityMeasure::Random;
  throw std::invalid_argument("unknown similarity measure: " + std::string(name));
}

void write_similarity_csv(const SimilarityMatrix& sim, std::ostream& out) {
  for (const NodeId c : sim.cols) out << ',' << c;
  out << '\n';
  char buf[64];
  for (int i = 0; i < sim.values.rows(); ++i) {
    out << sim.rows[i];
    for (int j = 0; j < sim.values.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", sim.values(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace structack
