#include "structack/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "structack/detail/brandes.hpp"
#include "structack/rng.hpp"

namespace structack {

namespace {

constexpr int kMaxIterations = 100;
constexpr double kTolerance = 1e-6;

CentralityScores degree_scores(const Graph& g) {
  CentralityScores out{CentralityMeasure::Degree, {}, 0, true};
  out.scores.reserve(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) out.scores.push_back(g.degree(u));
  return out;
}

CentralityScores eigenvector_scores(const Graph& g) {
  const int n = g.node_count();
  CentralityScores out{CentralityMeasure::Eigenvector, std::vector<double>(n, 0.0), 0, true};
  if (g.edge_count() == 0) {
    out.converged = false;
    return out;
  }
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), next(n);
  out.converged = false;
  for (int it = 0; it < kMaxIterations; ++it) {
    for (NodeId u = 0; u < n; ++u) {
      double sum = 0.0;
      for (const NodeId v : g.neighbors(u)) sum += x[v];
      next[u] = sum;
    }
    double norm = 0.0;
    for (const double v : next) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) break;  // start vector orthogonal to every eigenvector with A != 0 cannot happen
    double shift = 0.0;
    for (NodeId u = 0; u < n; ++u) {
      next[u] /= norm;
      shift = std::max(shift, std::fabs(next[u] - x[u]));
    }
    x.swap(next);
    if (shift < kTolerance) {
      out.converged = true;
      break;
    }
  }
  out.scores = std::move(x);
  return out;
}

CentralityScores pagerank_scores(const Graph& g) {
  const int n = g.node_count();
  const double damping = 0.85;
  CentralityScores out{CentralityMeasure::Pagerank, std::vector<double>(n, 1.0 / n), 0, false};
  std::vector<double> next(n);
  for (int it = 0; it < kMaxIterations; ++it) {
    double dangling = 0.0;
    for (NodeId u = 0; u < n; ++u)
      if (g.degree(u) == 0) dangling += out.scores[u];
    const double base = (1.0 - damping) / n + damping * dangling / n;
    for (NodeId u = 0; u < n; ++u) {
      double sum = 0.0;
      for (const NodeId v : g.neighbors(u)) sum += out.scores[v] / g.degree(v);
      next[u] = base + damping * sum;
    }
    double residual = 0.0;
    for (NodeId u = 0; u < n; ++u) residual += std::fabs(next[u] - out.scores[u]);
    out.scores.swap(next);
    if (residual < kTolerance) {
      out.converged = true;
      break;
    }
  }
  return out;
}

CentralityScores closeness_scores(const Graph& g) {
  const int n = g.node_count();
  CentralityScores out{CentralityMeasure::Closeness, std::vector<double>(n, 0.0), 0, true};
  for (NodeId u = 0; u < n; ++u) {
    const std::vector<int> dist = bfs_distances(g, u);
    std::int64_t total = 0;
    int reached = 0;
    for (const int d : dist) {
      if (d >= 0) {
        total += d;
        ++reached;
      }
    }
    if (reached <= 1 || total == 0) continue;
    const double r = reached - 1;
    out.scores[u] = (r / total) * (n > 1 ? r / (n - 1) : 1.0);
  }
  return out;
}

CentralityScores random_scores(const Graph& g, std::uint64_t seed) {
  CentralityScores out{CentralityMeasure::Random, {}, seed, true};
  Rng rng(seed);
  out.scores.reserve(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) out.scores.push_back(uniform_unit(rng));
  return out;
}

}  // namespace

CentralityScores compute_centrality(const Graph& g, CentralityMeasure measure,
                                    std::uint64_t seed) {
  if (g.node_count() == 0) throw std::invalid_argument("compute_centrality: empty graph");
  switch (measure) {
    case CentralityMeasure::Degree:
      return degree_scores(g);
    case CentralityMeasure::Eigenvector:
      return eigenvector_scores(g);
    case CentralityMeasure::Pagerank:
      return pagerank_scores(g);
    case CentralityMeasure::Betweenness: {
      CentralityScores out{CentralityMeasure::Betweenness, {}, 0, true};
      out.scores = detail::brandes_betweenness<double>(g);
      return out;
    }
    case CentralityMeasure::Closeness:
      return closeness_scores(g);
    case CentralityMeasure::Random:
      return random_scores(g, seed);
  }
  throw std::invalid_argument("compute_centrality: unknown measure");
}

std::vector<NodeId> lowest_centrality_nodes(const CentralityScores& scores, int count) {
  const int n = static_cast<int>(scores.scores.size());
  if (count < 0 || count > n)
    throw std::invalid_argument("lowest_centrality_nodes: count " + std::to_string(count) +
                                " out of range for n=" + std::to_string(n));
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (scores.scores[a] != scores.scores[b]) return scores.scores[a] < scores.scores[b];
    return a < b;
  });
  order.resize(count);
  return order;
}

std::string_view centrality_abbreviation(CentralityMeasure measure) {
  switch (measure) {
    case CentralityMeasure::Degree: return "DG";
    case CentralityMeasure::Eigenvector: return "EV";
    case CentralityMeasure::Pagerank: return "PR";
    case CentralityMeasure::Betweenness: return "BT";
    case CentralityMeasure::Closeness: return "CL";
    case CentralityMeasure::Random: return "RND";
  }
  return "?";
}

CentralityMeasure parse_centrality(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "dg" || lower == "degree") return CentralityMeasure::Degree;
  if (lower == "ev" || lower == "eigenvector") return CentralityMeasure::Eigenvector;
  if (lower == "pr" || lower == "pagerank") return CentralityMeasure::Pagerank;
  if (lower == "bt" || lower == "betweenness") return CentralityMeasure::Betweenness;
  if (lower == "cl" || lower == "closeness") return CentralityMeasure::Closeness;
  if (lower == "rnd" || lower == "random") return CentralityMeasure::Random;
  throw std::invalid_argument("unknown centrality measure: " + std::string(name));
}

void write_scores_csv(const CentralityScores& scores, std::ostream& out) {
  out << "node_id,score\n";
  char buf[64];
  for (std::size_t u = 0; u < scores.scores.size(); ++u) {
    std::snprintf(buf, sizeof buf, "%.17g", scores.scores[u]);
    out << u << ',' << buf << '\n';
  }
}

}  // namespace structack
