#include "structack/victim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "structack/rng.hpp"

namespace structack {

NormalizedOperator NormalizedOperator::build(const Graph& g, NormalizationVariant variant) {
  NormalizedOperator op;
  op.n_ = g.node_count();
  op.variant_ = variant;
  const bool self_loops = variant == NormalizationVariant::WithSelfLoops;

  std::vector<double> inv_sqrt(op.n_);
  for (NodeId u = 0; u < op.n_; ++u) {
    const double d = g.degree(u) + (self_loops ? 1.0 : 0.0);
    inv_sqrt[u] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }

  op.row_ptr_.assign(op.n_ + 1, 0);
  for (NodeId u = 0; u < op.n_; ++u)
    op.row_ptr_[u + 1] = op.row_ptr_[u] + g.degree(u) + (self_loops ? 1 : 0);
  op.col_.resize(op.row_ptr_[op.n_]);
  op.value_.resize(op.row_ptr_[op.n_]);
  for (NodeId u = 0; u < op.n_; ++u) {
    std::int64_t at = op.row_ptr_[u];
    bool placed_self = !self_loops;
    for (const NodeId v : g.neighbors(u)) {
      if (!placed_self && v > u) {
        op.col_[at] = u;
        op.value_[at] = inv_sqrt[u] * inv_sqrt[u];
        ++at;
        placed_self = true;
      }
      op.col_[at] = v;
      op.value_[at] = inv_sqrt[u] * inv_sqrt[v];
      ++at;
    }
    if (!placed_self) {
      op.col_[at] = u;
      op.value_[at] = inv_sqrt[u] * inv_sqrt[u];
      ++at;
    }
  }
  return op;
}

Matrix NormalizedOperator::apply(const Matrix& x) const {
  if (x.rows() != n_) throw std::invalid_argument("NormalizedOperator::apply: row mismatch");
  Matrix out(n_, x.cols());
  for (NodeId u = 0; u < n_; ++u) {
    double* orow = out.row(u);
    for (std::int64_t at = row_ptr_[u]; at < row_ptr_[u + 1]; ++at) {
      const double w = value_[at];
      const double* xrow = x.row(col_[at]);
      for (int j = 0; j < x.cols(); ++j) orow[j] += w * xrow[j];
    }
  }
  return out;
}

std::vector<double> NormalizedOperator::apply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_)
    throw std::invalid_argument("NormalizedOperator::apply: size mismatch");
  std::vector<double> out(n_, 0.0);
  for (NodeId u = 0; u < n_; ++u) {
    double sum = 0.0;
    for (std::int64_t at = row_ptr_[u]; at < row_ptr_[u + 1]; ++at)
      sum += value_[at] * x[col_[at]];
    out[u] = sum;
  }
  return out;
}

double NormalizedOperator::entry(NodeId i, NodeId j) const {
  for (std::int64_t at = row_ptr_[i]; at < row_ptr_[i + 1]; ++at)
    if (col_[at] == j) return value_[at];
  return 0.0;
}

NormalizedOperator normalized_adjacency(const Graph& g, NormalizationVariant variant) {
  return NormalizedOperator::build(g, variant);
}

Matrix propagate(const NormalizedOperator& op, const Matrix& x, int k) {
  if (k < 0) throw std::invalid_argument("propagate: negative depth");
  Matrix out = x;
  for (int step = 0; step < k; ++step) out = op.apply(out);
  return out;
}

Split random_split(int n, double train_fraction, double val_fraction, std::uint64_t seed) {
  if (train_fraction < 0 || val_fraction < 0 || train_fraction + val_fraction > 1.0)
    throw std::invalid_argument("random_split: bad fractions");
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle_in_place(order, rng);
  const int n_train = static_cast<int>(train_fraction * n);
  const int n_val = static_cast<int>(val_fraction * n);
  Split split;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  split.test.assign(order.begin() + n_train + n_val, order.end());
  return split;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (int i = 0; i < logits.rows(); ++i) {
    const double* in = logits.row(i);
    double* o = out.row(i);
    double peak = in[0];
    for (int j = 1; j < logits.cols(); ++j) peak = std::max(peak, in[j]);
    double total = 0.0;
    for (int j = 0; j < logits.cols(); ++j) {
      o[j] = std::exp(in[j] - peak);
      total += o[j];
    }
    for (int j = 0; j < logits.cols(); ++j) o[j] /= total;
  }
  return out;
}

Matrix row_normalize(const Matrix& x) {
  Matrix out = x;
  for (int i = 0; i < out.rows(); ++i) {
    double total = 0.0;
    for (int j = 0; j < out.cols(); ++j) total += std::fabs(out(i, j));
    if (total > 0.0)
      for (int j = 0; j < out.cols(); ++j) out(i, j) /= total;
  }
  return out;
}

namespace {

Matrix gather_rows(const Matrix& x, std::span<const NodeId> ids) {
  Matrix out(static_cast<int>(ids.size()), x.cols());
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (int j = 0; j < x.cols(); ++j) out(static_cast<int>(i), j) = x(ids[i], j);
  return out;
}

// Row i of `probabilities` corresponds to node mask[i].
double gathered_accuracy(const Matrix& probabilities, const std::vector<int>& y,
                         std::span<const NodeId> mask) {
  if (mask.empty()) throw std::invalid_argument("accuracy: empty mask");
  int hits = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const double* row = probabilities.row(static_cast<int>(i));
    int arg = 0;
    for (int j = 1; j < probabilities.cols(); ++j)
      if (row[j] > row[arg]) arg = j;
    if (arg == y[mask[i]]) ++hits;
  }
  return static_cast<double>(hits) / mask.size();
}

}  // namespace

VictimParams train_on_propagated(const Matrix& propagated, const std::vector<int>& y,
                                 const Split& split, const TrainConfig& config,
                                 std::uint64_t seed) {
  if (split.train.empty()) throw std::invalid_argument("train_victim: empty train mask");
  if (static_cast<int>(y.size()) != propagated.rows())
    throw std::invalid_argument("train_victim: label count mismatch");
  const int classes = *std::max_element(y.begin(), y.end()) + 1;
  const int f = propagated.cols();

  const Matrix p_train = gather_rows(propagated, split.train);
  const Matrix p_val = split.val.empty() ? Matrix() : gather_rows(propagated, split.val);

  VictimParams params;
  params.depth = config.depth;
  params.row_normalize_features = config.row_normalize_features;
  params.weights = Matrix(f, classes);
  {
    Rng rng(seed);
    const double s = std::sqrt(6.0 / (f + classes));
    for (double& w : params.weights.data()) w = (2.0 * uniform_unit(rng) - 1.0) * s;
  }

  Matrix best_weights = params.weights;
  double best_val = -1.0;
  int since_best = 0;
  const double inv_train = 1.0 / static_cast<double>(split.train.size());

  int epoch = 0;
  double loss = 0.0;
  for (epoch = 1; epoch <= config.epochs; ++epoch) {
    Matrix probs = softmax_rows(matmul(p_train, params.weights));

    loss = 0.0;
    for (std::size_t i = 0; i < split.train.size(); ++i)
      loss -= std::log(std::max(probs(static_cast<int>(i), y[split.train[i]]), 1e-300));
    loss *= inv_train;
    double sq = 0.0;
    for (const double w : params.weights.data()) sq += w * w;
    loss += config.weight_decay * sq;
    if (!std::isfinite(loss))
      throw std::runtime_error("train_victim: non-finite loss at epoch " + std::to_string(epoch));

    // dL/dW = (1/|train|) Pᵀ(Z - Y) + 2λW
    for (std::size_t i = 0; i < split.train.size(); ++i)
      probs(static_cast<int>(i), y[split.train[i]]) -= 1.0;
    Matrix grad = transpose_matmul(p_train, probs);
    for (std::size_t at = 0; at < grad.data().size(); ++at)
      grad.data()[at] = grad.data()[at] * inv_train +
                        2.0 * config.weight_decay * params.weights.data()[at];
    for (std::size_t at = 0; at < grad.data().size(); ++at)
      params.weights.data()[at] -= config.learning_rate * grad.data()[at];

    if (!split.val.empty()) {
      const Matrix val_probs = softmax_rows(matmul(p_val, params.weights));
      const double val_acc = gathered_accuracy(val_probs, y, split.val);
      if (val_acc > best_val) {
        best_val = val_acc;
        best_weights = params.weights;
        since_best = 0;
      } else if (++since_best > config.patience) {
        break;
      }
    }
  }

  if (!split.val.empty()) params.weights = std::move(best_weights);
  params.metrics.epochs_run = std::min(epoch, config.epochs);
  params.metrics.final_loss = loss;
  params.metrics.best_val_accuracy = std::max(best_val, 0.0);
  return params;
}

VictimParams train_victim(const Graph& g, const Matrix& x, const std::vector<int>& y,
                          const Split& split, const TrainConfig& config, std::uint64_t seed) {
  const Matrix inputs = config.row_normalize_features ? row_normalize(x) : x;
  const NormalizedOperator op = normalized_adjacency(g, NormalizationVariant::WithSelfLoops);
  const Matrix propagated = propagate(op, inputs, config.depth);
  return train_on_propagated(propagated, y, split, config, seed);
}

Prediction predict_on_propagated(const VictimParams& params, const Matrix& propagated) {
  Prediction prediction;
  prediction.probabilities = softmax_rows(matmul(propagated, params.weights));
  prediction.predicted.resize(prediction.probabilities.rows());
  for (int i = 0; i < prediction.probabilities.rows(); ++i) {
    const double* row = prediction.probabilities.row(i);
    int arg = 0;
    for (int j = 1; j < prediction.probabilities.cols(); ++j)
      if (row[j] > row[arg]) arg = j;
    prediction.predicted[i] = arg;
  }
  return prediction;
}

Prediction predict(const VictimParams& params, const Graph& g, const Matrix& x) {
  const Matrix inputs = params.row_normalize_features ? row_normalize(x) : x;
  const NormalizedOperator op = normalized_adjacency(g, NormalizationVariant::WithSelfLoops);
  return predict_on_propagated(params, propagate(op, inputs, params.depth));
}

double evaluate_accuracy(const VictimParams& params, const Graph& g, const Matrix& x,
                         const std::vector<int>& y, std::span<const NodeId> mask) {
  if (mask.empty()) throw std::invalid_argument("evaluate_accuracy: empty mask");
  const Prediction prediction = predict(params, g, x);
  int hits = 0;
  for (const NodeId u : mask)
    if (prediction.predicted[u] == y[u]) ++hits;
  return static_cast<double>(hits) / mask.size();
}

double jacobian_closed_form(const Graph& g, NodeId u, NodeId w, int k) {
  if (k < 1) throw std::invalid_argument("jacobian_closed_form: depth must be >= 1");
  if (g.degree(u) == 0 || g.degree(w) == 0)
    throw std::invalid_argument("jacobian_closed_form: isolated endpoint");
  const NormalizedOperator op = normalized_adjacency(g, NormalizationVariant::PlainNeighbors);
  std::vector<double> x(g.node_count(), 0.0);
  x[w] = 1.0;
  for (int step = 0; step < k; ++step) x = op.apply(x);
  return x[u];
}

double jacobian_finite_difference(const Graph& g, const Matrix& x, NodeId u, NodeId w, int k,
                                  double epsilon, int component) {
  const NormalizedOperator op = normalized_adjacency(g, NormalizationVariant::PlainNeighbors);
  Matrix plus = x, minus = x;
  plus(w, component) += epsilon;
  minus(w, component) -= epsilon;
  const Matrix hp = propagate(op, plus, k);
  const Matrix hm = propagate(op, minus, k);
  return (hp(u, component) - hm(u, component)) / (2.0 * epsilon);
}

void write_params_json(const VictimParams& params, std::ostream& out) {
  nlohmann::json j{
      {"rows", params.weights.rows()},
      {"cols", params.weights.cols()},
      {"depth", params.depth},
      {"row_normalize_features", params.row_normalize_features},
      {"weights", params.weights.data()},
  };
  out << j.dump(2) << '\n';
}

VictimParams read_params_json(std::istream& in) {
  nlohmann::json j;
  in >> j;
  VictimParams params;
  params.depth = j.at("depth").get<int>();
  params.row_normalize_features = j.at("row_normalize_features").get<bool>();
  params.weights = Matrix(j.at("rows").get<int>(), j.at("cols").get<int>());
  params.weights.data() = j.at("weights").get<std::vector<double>>();
  return params;
}

}  // namespace structack
