// similarity.hpp — pairwise structural similarity between the two selected
// node sets: Katz (truncated series), community edge density (Louvain),
// hop distance, and seeded random scores.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "structack/graph.hpp"
#include "structack/matrix.hpp"

namespace structack {

enum class SimilarityMeasure { Katz, Community, Distance, Random };

struct SimilarityMatrix {
  SimilarityMeasure measure = SimilarityMeasure::Katz;
  std::vector<NodeId> rows;  // U1
  std::vector<NodeId> cols;  // U2
  Matrix values;             // |U1| × |U2|
  // Distance stores raw hop counts, so higher means *less* similar there;
  // every other measure stores a direct similarity.
  bool higher_is_closer = true;
  // Set when the Katz series is truncated outside its convergence radius
  // (alpha * lambda_max >= 1). Values are still the truncated sum.
  bool divergence_warning = false;
};

struct CommunityAssignment {
  std::vector<int> community_of;  // dense ids in [0, community_count)
  int community_count = 0;
  // Edge density between communities: count/(|i|·|j|) off-diagonal,
  // 2·internal/(|i|(|i|-1)) on the diagonal, 0 for singletons.
  Matrix density;
  // Modularity after each level's local-moving phase; non-decreasing.
  std::vector<double> pass_modularity;
};

// Louvain with deterministic pass order: nodes visited in ascending id,
// best-gain community with ties to the smallest community id. The seed
// shuffles the visit order only when `shuffle` is set.
CommunityAssignment louvain_communities(const Graph& g, std::uint64_t seed = 0,
                                        bool shuffle = false);

double modularity(const Graph& g, std::span<const int> community_of);

SimilarityMatrix community_similarity(const Graph& g, std::uint64_t seed,
                                      std::span<const NodeId> u1, std::span<const NodeId> u2);

// values[i][j] = hop distance; unreachable pairs get the sentinel n, which
// is strictly larger than any finite distance.
SimilarityMatrix distance_similarity(const Graph& g, std::span<const NodeId> u1,
                                     std::span<const NodeId> u2);

// Truncated series Σ_{i=0..t} (αA)^i via s ← e + αA·s per column, sparse
// products only; returns the U1×U2 block. Throws if an intermediate
// overflows, naming the iteration.
SimilarityMatrix katz_similarity(const Graph& g, double alpha, int iterations,
                                 std::span<const NodeId> u1, std::span<const NodeId> u2);

SimilarityMatrix random_similarity(int k, std::uint64_t seed);

// Power-iteration estimate of the largest adjacency eigenvalue.
double spectral_radius_estimate(const Graph& g, int iterations = 100);

std::string_view similarity_abbreviation(SimilarityMeasure measure);
SimilarityMeasure parse_similarity(std::string_view name);

// CSV with U1 ids as row header and U2 ids as column header.
void write_similarity_csv(const SimilarityMatrix& sim, std::ostream& out);

}  // namespace structack
