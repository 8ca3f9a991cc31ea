#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "structack/graph.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace structack;
namespace testing = structack::testing;

TEST_CASE("edge list loading builds a dense-id graph") {
  std::istringstream in("0 1\n1 2\n");
  const Graph g = load_edge_list(in);
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 2);
  CHECK(degree_sequence(g) == std::vector<int>{1, 2, 1});
}

TEST_CASE("duplicate and self-loop lines are dropped") {
  std::istringstream in("0 1\n1 0\n2 2\n");
  LoadStats stats;
  const Graph g = load_edge_list(in, &stats);
  CHECK(g.node_count() == 3);  // node 2 still exists
  CHECK(g.edge_count() == 1);
  CHECK(stats.self_loops_dropped == 1);
  CHECK(stats.duplicate_lines == 1);
}

TEST_CASE("sparse original ids are remapped in ascending order") {
  std::istringstream in("# comment line\n10 30\n30 20\n");
  const Graph g = load_edge_list(in);
  CHECK(g.node_count() == 3);
  CHECK(g.original_ids() == std::vector<std::int64_t>{10, 20, 30});
  CHECK(g.has_edge(0, 2));  // 10-30
  CHECK(g.has_edge(1, 2));  // 20-30
  CHECK_FALSE(g.has_edge(0, 1));
}

TEST_CASE("malformed lines report the line number") {
  std::istringstream in("0 1\n2 x\n");
  CHECK_THROWS_WITH_AS(load_edge_list(in), "edge list: malformed line 2", std::runtime_error);
}

TEST_CASE("feature and label shape errors are rejected") {
  std::istringstream edges("0 1\n1 2\n");
  Graph g = load_edge_list(edges);
  CHECK_THROWS_AS(g.set_features(Matrix(2, 4)), std::invalid_argument);
  CHECK_THROWS_AS(g.set_labels({0, 1}), std::invalid_argument);
  g.set_labels({0, 1, 0});
  CHECK(g.label_count() == 2);
}

TEST_CASE("lcc of two triangles plus isolated node keeps the one with the smallest id") {
  // Triangle {0,1,2}, triangle {4,5,6}, isolated 3.
  const Graph g = Graph::from_edges(
      7, {{0, 1}, {1, 2}, {0, 2}, {4, 5}, {5, 6}, {4, 6}});
  const Graph lcc = extract_lcc(g);
  CHECK(lcc.node_count() == 3);
  CHECK(lcc.original_ids() == std::vector<std::int64_t>{0, 1, 2});
}

TEST_CASE("lcc of a connected graph is the identity") {
  const Graph g = testing::path_graph(6);
  const Graph lcc = extract_lcc(g);
  CHECK(lcc.node_count() == 6);
  CHECK(lcc.edges() == g.edges());
}

TEST_CASE("lcc matches a brute-force component search on a planted instance") {
  // 30-node connected component plus scattered small ones.
  std::vector<Edge> edges;
  for (NodeId u = 0; u + 1 < 30; ++u) edges.push_back(Edge{u, static_cast<NodeId>(u + 1)});
  Rng rng(7);
  for (int extra = 0; extra < 15; ++extra) {
    const NodeId u = static_cast<NodeId>(30 + uniform_below(rng, 20));
    const NodeId v = static_cast<NodeId>(30 + uniform_below(rng, 20));
    if (u != v) edges.push_back(make_edge(u, v));
  }
  const Graph g = Graph::from_edges(50, edges);

  const std::vector<int> labels = testing::components_by_relaxation(g);
  std::vector<int> the_component;
  for (NodeId u = 0; u < 50; ++u)
    if (labels[u] == labels[0]) the_component.push_back(u);
  REQUIRE(the_component.size() == 30);

  const Graph lcc = extract_lcc(g);
  CHECK(lcc.node_count() == 30);
  for (std::size_t i = 0; i < the_component.size(); ++i)
    CHECK(lcc.original_ids()[i] == the_component[i]);
}

TEST_CASE("lcc slices features and labels consistently") {
  Graph g = Graph::from_edges(4, {{2, 3}, {0, 2}});  // node 1 isolated
  Matrix x(4, 2);
  for (int i = 0; i < 4; ++i) x(i, 0) = i;
  g.set_features(x);
  g.set_labels({3, 1, 4, 1});
  const Graph lcc = extract_lcc(g);
  CHECK(lcc.node_count() == 3);
  CHECK(lcc.features()(0, 0) == 0.0);
  CHECK(lcc.features()(1, 0) == 2.0);
  CHECK(lcc.features()(2, 0) == 3.0);
  CHECK(lcc.labels() == std::vector<int>{3, 4, 1});
}

TEST_CASE("add_edges closes a path into a triangle") {
  const Graph path = testing::path_graph(3);
  EdgeSet additions;
  additions.add(0, 2);
  const Graph triangle = add_edges(path, additions);
  CHECK(triangle.edge_count() == 3);
  CHECK(triangle.has_edge(0, 2));
  CHECK(path.edge_count() == 2);  // original untouched
}

TEST_CASE("add_edges with an empty set or an existing edge is a no-op") {
  const Graph g = testing::path_graph(4);
  CHECK(add_edges(g, EdgeSet{}).edges() == g.edges());
  EdgeSet existing;
  existing.add(1, 2);
  CHECK(add_edges(g, existing).edge_count() == g.edge_count());
}

TEST_CASE("add_edges rejects out-of-range endpoints") {
  const Graph g = testing::path_graph(3);
  EdgeSet bad;
  bad.add(0, 9);
  CHECK_THROWS_AS(add_edges(g, bad), std::out_of_range);
}

TEST_CASE("degree sequence basics") {
  CHECK(degree_sequence(testing::star_graph(4)) == std::vector<int>{4, 1, 1, 1, 1});
  CHECK(degree_sequence(Graph::from_edges(3, {})) == std::vector<int>{0, 0, 0});
}

TEST_CASE("degree sequence matches per-row adjacency recount on a random graph") {
  const Graph g = testing::gnp(40, 0.1, 11);
  const std::vector<int> degrees = degree_sequence(g);
  for (NodeId u = 0; u < g.node_count(); ++u)
    CHECK(degrees[u] == static_cast<int>(g.neighbors(u).size()));
}

TEST_CASE("degree increments after add_edges touch exactly the new endpoints") {
  const Graph g = testing::gnp(25, 0.1, 3);
  EdgeSet additions;
  additions.add(0, 24);
  additions.add(1, 2);
  const std::vector<int> before = degree_sequence(g);
  std::vector<int> expected = before;
  for (const Edge& e : additions.edges()) {
    if (!g.has_edge(e.u, e.v)) {
      ++expected[e.u];
      ++expected[e.v];
    }
  }
  CHECK(degree_sequence(add_edges(g, additions)) == expected);
}

TEST_CASE("clustering coefficients on canonical graphs") {
  CHECK(local_clustering_coefficients(testing::complete_graph(3)) ==
        std::vector<double>{1.0, 1.0, 1.0});
  const std::vector<double> star = local_clustering_coefficients(testing::star_graph(4));
  for (const double c : star) CHECK(c == 0.0);
}

TEST_CASE("clustering coefficients match cubic triangle enumeration") {
  const Graph g = testing::gnp(30, 0.2, 5);
  const std::vector<double> coeff = local_clustering_coefficients(g);
  const std::vector<std::int64_t> tri = testing::triangle_counts_cubic(g);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const int d = g.degree(u);
    const double expected = d < 2 ? 0.0 : 2.0 * tri[u] / (static_cast<double>(d) * (d - 1));
    CHECK(coeff[u] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("clustering coefficients are invariant under relabeling") {
  const Graph g = testing::gnp(12, 0.3, 9);
  // Relabel u -> (u + 5) mod 12.
  std::vector<Edge> relabeled;
  for (const Edge& e : g.edges())
    relabeled.push_back(make_edge((e.u + 5) % 12, (e.v + 5) % 12));
  const Graph h = Graph::from_edges(12, relabeled);
  const std::vector<double> cg = local_clustering_coefficients(g);
  const std::vector<double> ch = local_clustering_coefficients(h);
  for (NodeId u = 0; u < 12; ++u) CHECK(cg[u] == doctest::Approx(ch[(u + 5) % 12]));
}

TEST_CASE("write then load round-trips the graph") {
  // Isolated nodes cannot appear in an edge list, so round-trip the LCC.
  const Graph g = extract_lcc(testing::gnp(20, 0.15, 21));
  std::ostringstream out;
  write_edge_list(g, out);
  std::istringstream in(out.str());
  const Graph back = load_edge_list(in);
  CHECK(back.edges() == g.edges());
}

TEST_CASE("lcc output is connected") {
  const Graph g = testing::gnp(60, 0.03, 17);
  const Graph lcc = extract_lcc(g);
  const std::vector<int> dist = bfs_distances(lcc, 0);
  for (const int d : dist) CHECK(d >= 0);
}

TEST_CASE("feature parser accepts commas and whitespace") {
  std::istringstream in("1.5, 2\n3 4.25\n");
  const Matrix x = load_feature_matrix(in);
  CHECK(x.rows() == 2);
  CHECK(x.cols() == 2);
  CHECK(x(0, 0) == 1.5);
  CHECK(x(1, 1) == 4.25);
}

TEST_CASE("edge set rejects self pairs and duplicates") {
  EdgeSet set;
  CHECK_THROWS_AS(set.add(3, 3), std::invalid_argument);
  CHECK(set.add(1, 2));
  CHECK_FALSE(set.add(2, 1));
  CHECK(set.contains(2, 1));
  CHECK(set.size() == 1);
}
