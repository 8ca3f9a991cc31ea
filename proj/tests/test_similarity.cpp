#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "structack/assignment.hpp"
#include "structack/similarity.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace structack;
namespace testing = structack::testing;

namespace {

// Two 5-cliques joined by the single edge 0-5.
Graph joined_cliques() {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < 5; ++u)
    for (NodeId v = u + 1; v < 5; ++v) edges.push_back(Edge{u, v});
  for (NodeId u = 5; u < 10; ++u)
    for (NodeId v = u + 1; v < 10; ++v) edges.push_back(Edge{u, v});
  edges.push_back(Edge{0, 5});
  return Graph::from_edges(10, edges);
}

}  // namespace

TEST_CASE("louvain separates two joined cliques") {
  const CommunityAssignment communities = louvain_communities(joined_cliques());
  CHECK(communities.community_count == 2);
  for (NodeId u = 0; u < 5; ++u) CHECK(communities.community_of[u] == 0);
  for (NodeId u = 5; u < 10; ++u) CHECK(communities.community_of[u] == 1);
}

TEST_CASE("louvain on a single clique yields one community with density 1") {
  const CommunityAssignment communities = louvain_communities(testing::complete_graph(6));
  CHECK(communities.community_count == 1);
  CHECK(communities.density.rows() == 1);
  CHECK(communities.density(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("louvain on an edgeless graph keeps singletons") {
  const CommunityAssignment communities = louvain_communities(Graph::from_edges(4, {}));
  CHECK(communities.community_count == 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) CHECK(communities.density(a, b) == 0.0);
}

TEST_CASE("louvain recovers planted blocks on an SBM") {
  const Graph g = testing::sbm_two_block(30, 0.5, 0.02, 12345);
  const CommunityAssignment communities = louvain_communities(g);
  // Majority mapping from recovered communities to planted blocks.
  int agree = 0;
  for (int c = 0; c < communities.community_count; ++c) {
    int in_block[2] = {0, 0};
    for (NodeId u = 0; u < g.node_count(); ++u)
      if (communities.community_of[u] == c) ++in_block[g.labels()[u]];
    agree += std::max(in_block[0], in_block[1]);
  }
  CHECK(agree >= 54);  // >= 90% of 60 nodes
}

TEST_CASE("louvain modularity is non-decreasing across passes") {
  const Graph g = extract_lcc(testing::gnp(80, 0.05, 31));
  const CommunityAssignment communities = louvain_communities(g);
  for (std::size_t p = 1; p < communities.pass_modularity.size(); ++p)
    CHECK(communities.pass_modularity[p] >= communities.pass_modularity[p - 1] - 1e-9);
  // Final assignment reproduces the last pass modularity on the original graph.
  CHECK(modularity(g, communities.community_of) ==
        doctest::Approx(communities.pass_modularity.back()).epsilon(1e-9));
}

TEST_CASE("community density entries stay within [0,1] and vanish without edges") {
  const Graph g = extract_lcc(testing::gnp(40, 0.08, 91));
  const CommunityAssignment communities = louvain_communities(g);
  std::vector<std::vector<int>> members(communities.community_count);
  for (NodeId u = 0; u < g.node_count(); ++u)
    members[communities.community_of[u]].push_back(u);
  for (int a = 0; a < communities.community_count; ++a) {
    for (int b = 0; b < communities.community_count; ++b) {
      const double d = communities.density(a, b);
      CHECK(d >= 0.0);
      CHECK(d <= 1.0);
      if (a != b) {
        int between = 0;
        for (const int u : members[a])
          for (const int v : members[b]) between += g.has_edge(u, v);
        CHECK(d == doctest::Approx(static_cast<double>(between) /
                                   (members[a].size() * members[b].size())));
      }
    }
  }
}

TEST_CASE("community similarity is constant when one community covers everything") {
  const Graph g = testing::complete_graph(6);
  const std::vector<NodeId> u1{0, 1}, u2{3, 4};
  const SimilarityMatrix sim = community_similarity(g, 0, u1, u2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(sim.values(i, j) == doctest::Approx(1.0));
}

TEST_CASE("cross-clique community similarity equals the bridge density") {
  const std::vector<NodeId> u1{1, 2}, u2{6, 7};
  const SimilarityMatrix sim = community_similarity(joined_cliques(), 0, u1, u2);
  // One bridge edge between two 5-node communities: density 1/25.
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(sim.values(i, j) == doctest::Approx(0.04));
}

TEST_CASE("matching cost is invariant under louvain seed shuffling") {
  const Graph g = joined_cliques();
  const std::vector<NodeId> u1{1, 6}, u2{2, 7};
  double reference = 0.0;
  for (const std::uint64_t seed : {1u, 2u, 3u}) {
    CommunityAssignment communities = louvain_communities(g, seed, /*shuffle=*/true);
    Matrix cost(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        cost(i, j) =
            communities.density(communities.community_of[u1[i]], communities.community_of[u2[j]]);
    const double total = min_cost_assignment(cost).total_cost;
    if (seed == 1u)
      reference = total;
    else
      CHECK(total == doctest::Approx(reference));
  }
}

TEST_CASE("distance similarity on a path") {
  const Graph g = testing::path_graph(4);
  const std::vector<NodeId> u1{0}, u2{3};
  const SimilarityMatrix sim = distance_similarity(g, u1, u2);
  CHECK_FALSE(sim.higher_is_closer);
  CHECK(sim.values(0, 0) == 3.0);
}

TEST_CASE("distance similarity is zero for a node paired with itself") {
  const Graph g = testing::path_graph(4);
  const std::vector<NodeId> u1{2}, u2{2};
  CHECK(distance_similarity(g, u1, u2).values(0, 0) == 0.0);
}

TEST_CASE("distance similarity matches Floyd-Warshall and uses the sentinel") {
  const Graph g = testing::gnp(40, 0.05, 321);
  std::vector<NodeId> u1, u2;
  for (NodeId u = 0; u < 10; ++u) u1.push_back(u);
  for (NodeId u = 10; u < 20; ++u) u2.push_back(u);
  const SimilarityMatrix sim = distance_similarity(g, u1, u2);
  const auto apsp = testing::floyd_warshall(g);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const int d = apsp[u1[i]][u2[j]];
      CHECK(sim.values(i, j) == (d < 0 ? 40.0 : static_cast<double>(d)));
    }
}

TEST_CASE("distance block obeys symmetry and the triangle inequality on finite entries") {
  const Graph g = extract_lcc(testing::gnp(30, 0.12, 8));
  std::vector<NodeId> all;
  for (NodeId u = 0; u < g.node_count(); ++u) all.push_back(u);
  const SimilarityMatrix sim = distance_similarity(g, all, all);
  for (int i = 0; i < sim.values.rows(); ++i) {
    CHECK(sim.values(i, i) == 0.0);
    for (int j = 0; j < sim.values.cols(); ++j) {
      CHECK(sim.values(i, j) == sim.values(j, i));
      for (int k = 0; k < sim.values.cols(); ++k)
        CHECK(sim.values(i, j) <= sim.values(i, k) + sim.values(k, j));
    }
  }
}

TEST_CASE("katz on an edgeless graph is the identity block") {
  const Graph g = Graph::from_edges(5, {});
  const std::vector<NodeId> u1{0, 1}, u2{1, 3};
  const SimilarityMatrix sim = katz_similarity(g, 0.5, 10, u1, u2);
  CHECK(sim.values(0, 0) == 0.0);
  CHECK(sim.values(0, 1) == 0.0);
  CHECK(sim.values(1, 0) == 1.0);  // node 1 with itself
  CHECK(sim.values(1, 1) == 0.0);
}

TEST_CASE("katz on a single edge matches the geometric series closed form") {
  const Graph g = Graph::from_edges(2, {{0, 1}});
  const std::vector<NodeId> u1{0}, u2{1};
  const SimilarityMatrix sim = katz_similarity(g, 0.25, 100, u1, u2);
  // Σ over odd powers: α/(1-α²) = 0.25/0.9375.
  CHECK(sim.values(0, 0) == doctest::Approx(0.25 / 0.9375).epsilon(1e-12));
  CHECK_FALSE(sim.divergence_warning);
}

TEST_CASE("katz matches a dense linear solve inside the convergence radius") {
  const Graph g = extract_lcc(testing::gnp(20, 0.2, 64));
  const double alpha = 0.9 / spectral_radius_estimate(g, 200);
  std::vector<NodeId> u1, u2;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    u1.push_back(u);
    u2.push_back(u);
  }
  const SimilarityMatrix sim = katz_similarity(g, alpha, 200, u1, u2);
  const Matrix inverse = testing::dense_katz_inverse(g, alpha);
  for (int i = 0; i < sim.values.rows(); ++i)
    for (int j = 0; j < sim.values.cols(); ++j)
      CHECK(sim.values(i, j) == doctest::Approx(inverse(i, j)).epsilon(1e-5));
}

TEST_CASE("katz truncated sum is entrywise monotone in the iteration count") {
  const Graph g = extract_lcc(testing::gnp(15, 0.2, 19));
  std::vector<NodeId> u1{0, 1, 2}, u2{3, 4, 5};
  const SimilarityMatrix s5 = katz_similarity(g, 0.3, 5, u1, u2);
  const SimilarityMatrix s10 = katz_similarity(g, 0.3, 10, u1, u2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(s10.values(i, j) >= s5.values(i, j));
}

TEST_CASE("katz flags divergence outside the convergence radius") {
  const Graph g = testing::complete_graph(8);  // lambda_max = 7
  const std::vector<NodeId> u1{0}, u2{1};
  const SimilarityMatrix sim = katz_similarity(g, 0.85, 50, u1, u2);
  CHECK(sim.divergence_warning);
  CHECK(std::isfinite(sim.values(0, 0)));
}

TEST_CASE("katz overflow reports the iteration") {
  const Graph g = testing::complete_graph(12);
  const std::vector<NodeId> u1{0}, u2{1};
  CHECK_THROWS_WITH_AS(katz_similarity(g, 1e30, 20, u1, u2),
                       doctest::Contains("overflow at iteration"), std::runtime_error);
}

TEST_CASE("random similarity is seed-reproducible with entries in [0,1)") {
  const SimilarityMatrix a = random_similarity(4, 7);
  const SimilarityMatrix b = random_similarity(4, 7);
  CHECK(a.values == b.values);
  const SimilarityMatrix single = random_similarity(1, 3);
  CHECK(single.values(0, 0) >= 0.0);
  CHECK(single.values(0, 0) < 1.0);
  for (const double v : a.values.data()) {
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("random similarity entries pass a one-sample uniformity KS check") {
  const SimilarityMatrix sim = random_similarity(100, 424242);  // 10^4 draws
  std::vector<double> values = sim.values.data();
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double hi = (i + 1) / n - values[i];
    const double lo = values[i] - i / n;
    d = std::max(d, std::max(hi, lo));
  }
  // One-sample KS critical value at alpha = 0.01 is 1.63/sqrt(n).
  CHECK(d < 1.63 / std::sqrt(n));
}

TEST_CASE("spectral radius estimate is exact on regular graphs") {
  CHECK(spectral_radius_estimate(testing::cycle_graph(10)) == doctest::Approx(2.0));
  CHECK(spectral_radius_estimate(testing::complete_graph(6)) == doctest::Approx(5.0));
}
