// victim.hpp — the linearized propagation victim: K-step feature smoothing
// through a symmetric degree-normalized adjacency followed by a single
// softmax classifier, plus the Jacobian machinery that quantifies how much
// a neighbor's input features can move a node's representation.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "structack/graph.hpp"
#include "structack/matrix.hpp"

namespace structack {

enum class NormalizationVariant {
  WithSelfLoops,   // D̃^{-1/2} (A+I) D̃^{-1/2}
  PlainNeighbors,  // D^{-1/2} A D^{-1/2}
};

// Sparse symmetric normalized adjacency in CSR form.
class NormalizedOperator {
 public:
  static NormalizedOperator build(const Graph& g, NormalizationVariant variant);

  int node_count() const { return n_; }
  NormalizationVariant variant() const { return variant_; }

  Matrix apply(const Matrix& x) const;
  std::vector<double> apply(std::span<const double> x) const;
  double entry(NodeId i, NodeId j) const;

 private:
  int n_ = 0;
  NormalizationVariant variant_ = NormalizationVariant::WithSelfLoops;
  std::vector<std::int64_t> row_ptr_;
  std::vector<NodeId> col_;
  std::vector<double> value_;
};

NormalizedOperator normalized_adjacency(const Graph& g, NormalizationVariant variant);

// Âᴷ·X by K sparse-dense products; K = 0 returns X unchanged.
Matrix propagate(const NormalizedOperator& op, const Matrix& x, int k);

struct Split {
  std::vector<NodeId> train, val, test;
};

// Seeded shuffle, then train/val/test by fraction (train and val rounded
// down, remainder to test).
Split random_split(int n, double train_fraction, double val_fraction, std::uint64_t seed);

struct TrainConfig {
  int depth = 2;  // K
  double learning_rate = 0.2;
  double weight_decay = 1e-5;
  int epochs = 300;
  int patience = 30;
  bool row_normalize_features = true;
};

struct TrainMetrics {
  int epochs_run = 0;
  double final_loss = 0.0;
  double best_val_accuracy = 0.0;
};

struct VictimParams {
  Matrix weights;  // f × |L|
  int depth = 2;
  bool row_normalize_features = true;
  TrainMetrics metrics;
};

// Full-batch gradient descent on the cross entropy of
// softmax(Âᴷ X W) over the train nodes, with L2 weight decay and
// early stopping on validation accuracy. W starts uniform(-s, s) with
// s = sqrt(6 / (f + |L|)) from the seed; the best-validation weights are
// returned. Throws if the loss goes non-finite, naming the epoch.
VictimParams train_victim(const Graph& g, const Matrix& x, const std::vector<int>& y,
                          const Split& split, const TrainConfig& config, std::uint64_t seed);

// Same optimization on an already propagated feature matrix; the
// experiment runner shares one propagation across weight initializations.
VictimParams train_on_propagated(const Matrix& propagated, const std::vector<int>& y,
                                 const Split& split, const TrainConfig& config,
                                 std::uint64_t seed);

struct Prediction {
  Matrix probabilities;        // n × |L|, rows sum to 1
  std::vector<int> predicted;  // argmax per node, first index on ties
};

Prediction predict(const VictimParams& params, const Graph& g, const Matrix& x);
Prediction predict_on_propagated(const VictimParams& params, const Matrix& propagated);

double evaluate_accuracy(const VictimParams& params, const Graph& g, const Matrix& x,
                         const std::vector<int>& y, std::span<const NodeId> mask);

// Row-wise softmax with max-subtraction; exposed for tests.
Matrix softmax_rows(const Matrix& logits);

// L1-normalizes each feature row (zero rows pass through).
Matrix row_normalize(const Matrix& x);

// Entry (u, w) of (D^{-1/2} A D^{-1/2})^K: the diagonal Jacobian value of
// node u's K-step representation with respect to w's input features.
double jacobian_closed_form(const Graph& g, NodeId u, NodeId w, int k);

// Central finite difference of the same quantity through an actual
// propagation of X; independent of the probed component and of X.
double jacobian_finite_difference(const Graph& g, const Matrix& x, NodeId u, NodeId w, int k,
                                  double epsilon, int component = 0);

// JSON weight dump with a shape header.
void write_params_json(const VictimParams& params, std::ostream& out);
VictimParams read_params_json(std::istream& in);

}  // namespace structack
