// centrality.hpp — the five node centralities used for attack-node
// selection, plus seeded random scores for the randomized baselines.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "structack/graph.hpp"

namespace structack {

enum class CentralityMeasure { Degree, Eigenvector, Pagerank, Betweenness, Closeness, Random };

struct CentralityScores {
  CentralityMeasure measure = CentralityMeasure::Degree;
  std::vector<double> scores;
  std::uint64_t seed = 0;
  // False when an iterative measure hit its iteration cap; the best
  // iterate is returned regardless.
  bool converged = true;
};

// Degree: plain degrees. Eigenvector: power iteration on A, L2-normalized,
// tolerance 1e-6 within 100 iterations. Pagerank: damping 0.85, L1
// residual below 1e-6 within 100 iterations. Betweenness: Brandes,
// unnormalized. Closeness: per-component closeness with the
// Wasserman-Faust scaling (n_reach-1)/(n-1). Random: seeded uniforms.
CentralityScores compute_centrality(const Graph& g, CentralityMeasure measure,
                                    std::uint64_t seed = 0);

// Node ids ordered by ascending score, ties by ascending id; first `count`.
std::vector<NodeId> lowest_centrality_nodes(const CentralityScores& scores, int count);

// Abbreviations used in result tables: DG, EV, PR, BT, CL, RND.
std::string_view centrality_abbreviation(CentralityMeasure measure);
CentralityMeasure parse_centrality(std::string_view name);

// node_id,score per line.
void write_scores_csv(const CentralityScores& scores, std::ostream& out);

}  // namespace structack
