#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "structack/victim.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace structack;
namespace testing = structack::testing;

namespace {

Matrix dense_operator(const NormalizedOperator& op) {
  const int n = op.node_count();
  Matrix dense(n, n);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < n; ++j) dense(i, j) = op.entry(i, j);
  return dense;
}

// Two disjoint cliques with one-hot clique indicator features.
struct CliquePair {
  Graph graph;
  Matrix features;
  std::vector<int> labels;
};

CliquePair two_cliques(int per_clique) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < per_clique; ++u)
    for (NodeId v = u + 1; v < per_clique; ++v) edges.push_back(Edge{u, v});
  for (NodeId u = per_clique; u < 2 * per_clique; ++u)
    for (NodeId v = u + 1; v < 2 * per_clique; ++v) edges.push_back(Edge{u, v});
  CliquePair out{Graph::from_edges(2 * per_clique, edges), Matrix(2 * per_clique, 2), {}};
  out.labels.resize(2 * per_clique);
  for (NodeId u = 0; u < 2 * per_clique; ++u) {
    out.labels[u] = u < per_clique ? 0 : 1;
    out.features(u, out.labels[u]) = 1.0;
  }
  return out;
}

}  // namespace

TEST_CASE("normalized adjacency of a single edge with self loops") {
  const Graph g = Graph::from_edges(2, {{0, 1}});
  const NormalizedOperator op = normalized_adjacency(g, NormalizationVariant::WithSelfLoops);
  for (NodeId i = 0; i < 2; ++i)
    for (NodeId j = 0; j < 2; ++j) CHECK(op.entry(i, j) == doctest::Approx(0.5));
}

TEST_CASE("plain-neighbors operator on a triangle") {
  const NormalizedOperator op =
      normalized_adjacency(testing::complete_graph(3), NormalizationVariant::PlainNeighbors);
  for (NodeId i = 0; i < 3; ++i) {
    CHECK(op.entry(i, i) == 0.0);
    for (NodeId j = 0; j < 3; ++j)
      if (i != j) CHECK(op.entry(i, j) == doctest::Approx(0.5));
  }
}

TEST_CASE("isolated nodes get a unit diagonal under self loops") {
  const Graph g = Graph::from_edges(3, {{0, 1}});
  const NormalizedOperator op = normalized_adjacency(g, NormalizationVariant::WithSelfLoops);
  CHECK(op.entry(2, 2) == doctest::Approx(1.0));
}

TEST_CASE("operator entries match the dense formula on a random graph") {
  const Graph g = testing::gnp(15, 0.25, 33);
  for (const NormalizationVariant variant :
       {NormalizationVariant::WithSelfLoops, NormalizationVariant::PlainNeighbors}) {
    const bool self = variant == NormalizationVariant::WithSelfLoops;
    const NormalizedOperator op = normalized_adjacency(g, variant);
    for (NodeId i = 0; i < 15; ++i)
      for (NodeId j = 0; j < 15; ++j) {
        const double di = g.degree(i) + (self ? 1.0 : 0.0);
        const double dj = g.degree(j) + (self ? 1.0 : 0.0);
        const bool linked = g.has_edge(i, j) || (self && i == j);
        const double expected = linked && di > 0 && dj > 0 ? 1.0 / std::sqrt(di * dj) : 0.0;
        CHECK(op.entry(i, j) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(op.entry(i, j) == doctest::Approx(op.entry(j, i)).epsilon(1e-12));
      }
  }
}

TEST_CASE("propagate with depth zero returns the features") {
  const Graph g = testing::path_graph(4);
  Matrix x(4, 2);
  x(1, 0) = 2.5;
  const NormalizedOperator op = normalized_adjacency(g, NormalizationVariant::WithSelfLoops);
  CHECK(propagate(op, x, 0) == x);
}

TEST_CASE("all-ones features are preserved on a regular graph with self loops") {
  const Graph g = testing::cycle_graph(8);  // 2-regular
  const NormalizedOperator op = normalized_adjacency(g, NormalizationVariant::WithSelfLoops);
  const Matrix propagated = propagate(op, Matrix(8, 1, 1.0), 4);
  for (int i = 0; i < 8; ++i) CHECK(propagated(i, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("propagation matches the dense matrix power") {
  const Graph g = testing::gnp(15, 0.2, 71);
  const NormalizedOperator op = normalized_adjacency(g, NormalizationVariant::WithSelfLoops);
  Matrix x(15, 3);
  Rng rng(4);
  for (double& v : x.data()) v = uniform_unit(rng);
  const Matrix via_sparse = propagate(op, x, 3);
  const Matrix via_dense = matmul(testing::dense_matrix_power(dense_operator(op), 3), x);
  CHECK(max_abs_diff(via_sparse, via_dense) < 1e-10);
}

TEST_CASE("softmax rows sum to one") {
  Matrix logits(3, 4);
  Rng rng(9);
  for (double& v : logits.data()) v = 10.0 * uniform_unit(rng) - 5.0;
  const Matrix probs = softmax_rows(logits);
  for (int i = 0; i < 3; ++i) {
    double total = 0.0;
    for (int j = 0; j < 4; ++j) {
      CHECK(probs(i, j) > 0.0);
      CHECK(probs(i, j) < 1.0);
      total += probs(i, j);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("training separates two labeled cliques perfectly") {
  const CliquePair data = two_cliques(10);
  Split split;
  split.train = {0, 1, 10, 11};  // two per class
  split.val = {2, 12};
  for (NodeId u = 3; u < 10; ++u) split.test.push_back(u);
  for (NodeId u = 13; u < 20; ++u) split.test.push_back(u);
  const VictimParams params =
      train_victim(data.graph, data.features, data.labels, split, TrainConfig{}, 17);
  CHECK(evaluate_accuracy(params, data.graph, data.features, data.labels, split.test) == 1.0);
}

TEST_CASE("zero features predict the first class everywhere") {
  const CliquePair data = two_cliques(8);
  // Class 0 is the majority on this test mask.
  Split split;
  split.train = {0, 8};
  split.test = {1, 2, 3, 4, 9, 10};
  const Matrix zero(16, 3);
  const VictimParams params =
      train_victim(data.graph, zero, data.labels, split, TrainConfig{}, 5);
  const double accuracy =
      evaluate_accuracy(params, data.graph, zero, data.labels, split.test);
  CHECK(accuracy == doctest::Approx(4.0 / 6.0));
}

TEST_CASE("training loss decreases over the first epochs on separable data") {
  const CliquePair data = two_cliques(10);
  Split split;
  for (NodeId u = 0; u < 20; ++u) split.train.push_back(u);
  TrainConfig config;
  double previous = std::numeric_limits<double>::infinity();
  for (int epochs = 1; epochs <= 10; ++epochs) {
    config.epochs = epochs;
    const VictimParams params =
        train_victim(data.graph, data.features, data.labels, split, config, 3);
    CHECK(params.metrics.final_loss >= 0.0);
    CHECK(params.metrics.final_loss < previous);
    previous = params.metrics.final_loss;
  }
}

TEST_CASE("analytic gradient matches finite differences of the loss") {
  // Small random instance, one explicit gradient step against central
  // differences of the full objective (cross entropy + weight decay).
  const Graph g = extract_lcc(testing::gnp(12, 0.3, 21));
  const int n = g.node_count();
  Matrix x(n, 3);
  Rng rng(8);
  for (double& v : x.data()) v = uniform_unit(rng);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) y[i] = static_cast<int>(uniform_below(rng, 2));

  Split split;
  for (NodeId u = 0; u < n; ++u) split.train.push_back(u);

  TrainConfig config;
  config.depth = 2;
  config.weight_decay = 1e-3;
  config.row_normalize_features = false;
  config.epochs = 1;
  config.learning_rate = 1.0;  // W1 = W0 - grad

  const NormalizedOperator op = normalized_adjacency(g, NormalizationVariant::WithSelfLoops);
  const Matrix propagated = propagate(op, x, config.depth);

  auto loss_at = [&](const Matrix& w) {
    const Matrix probs = softmax_rows(matmul(propagated, w));
    double loss = 0.0;
    for (int i = 0; i < n; ++i) loss -= std::log(probs(i, y[i]));
    loss /= n;
    for (const double v : w.data()) loss += config.weight_decay * v * v;
    return loss;
  };

  // Recover W0 by rerunning the seeded initialization path with 0 epochs.
  TrainConfig zero_epochs = config;
  zero_epochs.epochs = 0;
  const Matrix w0 = train_on_propagated(propagated, y, split, zero_epochs, 99).weights;
  const Matrix w1 = train_on_propagated(propagated, y, split, config, 99).weights;

  const double eps = 1e-6;
  for (int i = 0; i < w0.rows(); ++i)
    for (int j = 0; j < w0.cols(); ++j) {
      Matrix plus = w0, minus = w0;
      plus(i, j) += eps;
      minus(i, j) -= eps;
      const double numeric = (loss_at(plus) - loss_at(minus)) / (2.0 * eps);
      const double analytic = w0(i, j) - w1(i, j);  // lr = 1
      CHECK(analytic == doctest::Approx(numeric).epsilon(1e-4));
    }
}

TEST_CASE("evaluate_accuracy agrees with an explicit per-node loop") {
  const CliquePair data = two_cliques(6);
  Split split;
  split.train = {0, 6};
  split.test = {1, 2, 7, 8};
  const VictimParams params =
      train_victim(data.graph, data.features, data.labels, split, TrainConfig{}, 2);
  const Prediction prediction = predict(params, data.graph, data.features);
  int hits = 0;
  for (const NodeId u : split.test)
    if (prediction.predicted[u] == data.labels[u]) ++hits;
  CHECK(evaluate_accuracy(params, data.graph, data.features, data.labels, split.test) ==
        doctest::Approx(static_cast<double>(hits) / split.test.size()));
  CHECK_THROWS_AS(
      evaluate_accuracy(params, data.graph, data.features, data.labels, std::vector<NodeId>{}),
      std::invalid_argument);
}

TEST_CASE("jacobian of an isolated edge at depth one is 1") {
  const Graph g = Graph::from_edges(2, {{0, 1}});
  CHECK(jacobian_closed_form(g, 0, 1, 1) == doctest::Approx(1.0));
}

TEST_CASE("jacobian across a path of two hops") {
  const Graph g = testing::path_graph(3);
  CHECK(jacobian_closed_form(g, 0, 2, 2) == doctest::Approx(0.5));
}

TEST_CASE("jacobian matches walk enumeration on random graphs") {
  for (const std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const Graph g = extract_lcc(testing::gnp(10, 0.3, seed));
    const int n = g.node_count();
    for (int k = 1; k <= 3; ++k)
      for (NodeId u = 0; u < n; ++u)
        for (NodeId w = 0; w < n; ++w)
          CHECK(jacobian_closed_form(g, u, w, k) ==
                doctest::Approx(testing::jacobian_by_walk_enumeration(g, u, w, k))
                    .epsilon(1e-12));
  }
}

TEST_CASE("jacobian is symmetric in its endpoints") {
  const Graph g = extract_lcc(testing::gnp(12, 0.25, 13));
  for (NodeId u = 0; u < g.node_count(); ++u)
    for (NodeId w = 0; w < g.node_count(); ++w)
      CHECK(jacobian_closed_form(g, u, w, 3) ==
            doctest::Approx(jacobian_closed_form(g, w, u, 3)).epsilon(1e-12));
}

TEST_CASE("finite differences agree with the closed form") {
  Rng rng(55);
  int cases = 0;
  for (std::uint64_t seed = 1; cases < 50; ++seed) {
    const Graph g = extract_lcc(testing::gnp(9, 0.35, seed));
    if (g.node_count() < 4) continue;
    Matrix x(g.node_count(), 2);
    for (double& v : x.data()) v = uniform_unit(rng);
    const int k = 1 + static_cast<int>(uniform_below(rng, 4));
    const NodeId u = static_cast<NodeId>(uniform_below(rng, g.node_count()));
    const NodeId w = static_cast<NodeId>(uniform_below(rng, g.node_count()));
    const double closed = jacobian_closed_form(g, u, w, k);
    const double numeric = jacobian_finite_difference(g, x, u, w, k, 1e-5);
    CHECK(closed == doctest::Approx(numeric).epsilon(1e-6));
    ++cases;
  }
}

TEST_CASE("finite difference is independent of component and of the features") {
  const Graph g = extract_lcc(testing::gnp(10, 0.3, 2));
  Matrix xa(g.node_count(), 3), xb(g.node_count(), 3);
  Rng rng(6);
  for (double& v : xa.data()) v = uniform_unit(rng);
  for (double& v : xb.data()) v = 10.0 * uniform_unit(rng);
  const double a0 = jacobian_finite_difference(g, xa, 0, 1, 2, 1e-5, 0);
  const double a2 = jacobian_finite_difference(g, xa, 0, 1, 2, 1e-5, 2);
  const double b1 = jacobian_finite_difference(g, xb, 0, 1, 2, 1e-5, 1);
  CHECK(a0 == doctest::Approx(a2).epsilon(1e-9));
  CHECK(a0 == doctest::Approx(b1).epsilon(1e-7));
}

TEST_CASE("depth-one jacobian vanishes for non-adjacent nodes") {
  const Graph g = testing::path_graph(4);
  const Matrix x(4, 1, 1.0);
  CHECK(jacobian_finite_difference(g, x, 0, 3, 1, 1e-5) == doctest::Approx(0.0));
}

TEST_CASE("perturbing one component leaves other components unchanged") {
  const Graph g = testing::path_graph(3);
  Matrix x(3, 2, 0.5);
  const NormalizedOperator op = normalized_adjacency(g, NormalizationVariant::PlainNeighbors);
  Matrix bumped = x;
  bumped(2, 0) += 1e-3;  // component 0 of node 2
  const Matrix h = propagate(op, x, 2);
  const Matrix hb = propagate(op, bumped, 2);
  for (int i = 0; i < 3; ++i) CHECK(h(i, 1) == hb(i, 1));  // component 1 untouched
}

TEST_CASE("low-degree neighbors have more influence at depth one") {
  // Star around u = 0; w1 has fewer pendant children than w2.
  std::vector<Edge> edges{{0, 1}, {0, 2}};
  edges.push_back(Edge{1, 3});  // w1 = 1, degree 2
  for (NodeId extra = 4; extra < 9; ++extra) edges.push_back(Edge{2, extra});  // w2 = 2, degree 6
  const Graph g = Graph::from_edges(9, edges);
  CHECK(jacobian_closed_form(g, 0, 1, 1) > jacobian_closed_form(g, 0, 2, 1));
}

TEST_CASE("params serialize to JSON and back") {
  const CliquePair data = two_cliques(5);
  Split split;
  split.train = {0, 5};
  split.test = {1, 6};
  const VictimParams params =
      train_victim(data.graph, data.features, data.labels, split, TrainConfig{}, 1);
  std::stringstream buffer;
  write_params_json(params, buffer);
  const VictimParams back = read_params_json(buffer);
  CHECK(back.weights == params.weights);
  CHECK(back.depth == params.depth);
}

TEST_CASE("non-finite loss names the epoch") {
  const CliquePair data = two_cliques(4);
  Split split;
  split.train = {0, 4};
  TrainConfig config;
  config.learning_rate = 1e100;  // diverges immediately
  config.row_normalize_features = false;
  CHECK_THROWS_WITH_AS(
      train_victim(data.graph, data.features, data.labels, split, config, 1),
      doctest::Contains("epoch"), std::runtime_error);
}
