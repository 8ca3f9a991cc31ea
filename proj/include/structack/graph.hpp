// graph.hpp — immutable undirected simple graph in CSR form, plus loaders
// and the structural statistics the attack and detection code builds on.
//
// Node ids are remapped to a dense 0..n-1 range at load time (ascending
// original id); the original ids are kept for reporting. Optional node
// features and labels travel with the structure so perturbed copies stay
// consistent with the clean graph.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "structack/matrix.hpp"

namespace structack {

using NodeId = std::int32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Normalized unordered pair (u < v). Self-pairs are rejected.
Edge make_edge(NodeId a, NodeId b);

// Duplicate-free set of unordered node pairs, kept in insertion order.
class EdgeSet {
 public:
  // Returns false if the pair was already present. Throws on a == b.
  bool add(NodeId a, NodeId b);
  bool contains(NodeId a, NodeId b) const;
  std::span<const Edge> edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }

 private:
  std::vector<Edge> edges_;
  std::unordered_set<std::uint64_t> index_;
};

class Graph {
 public:
  Graph() = default;

  // Builds from an edge list over ids in [0, node_count). Duplicates and
  // reversed copies collapse to one edge; self-loops are rejected.
  static Graph from_edges(NodeId node_count, const std::vector<Edge>& edges);

  int node_count() const { return n_; }
  std::int64_t edge_count() const { return m_; }

  std::span<const NodeId> neighbors(NodeId u) const {
    return {adjacency_.data() + row_ptr_[u], adjacency_.data() + row_ptr_[u + 1]};
  }
  int degree(NodeId u) const { return static_cast<int>(row_ptr_[u + 1] - row_ptr_[u]); }
  bool has_edge(NodeId u, NodeId v) const;

  // All edges with u < v, sorted.
  std::vector<Edge> edges() const;

  bool has_features() const { return features_.has_value(); }
  const Matrix& features() const { return *features_; }
  bool has_labels() const { return !labels_.empty(); }
  const std::vector<int>& labels() const { return labels_; }
  int label_count() const { return label_count_; }

  // Original ids of each node, in internal order. Identity when the graph
  // was built programmatically.
  const std::vector<std::int64_t>& original_ids() const { return original_ids_; }

  // Attribute attachment is part of construction; graphs are treated as
  // immutable once handed to the pipeline.
  void set_features(Matrix x);
  void set_labels(std::vector<int> y);
  void set_original_ids(std::vector<std::int64_t> ids);

 private:
  int n_ = 0;
  std::int64_t m_ = 0;
  std::vector<std::int64_t> row_ptr_;
  std::vector<NodeId> adjacency_;
  std::optional<Matrix> features_;
  std::vector<int> labels_;
  int label_count_ = 0;
  std::vector<std::int64_t> original_ids_;
};

struct LoadStats {
  int self_loops_dropped = 0;
  int duplicate_lines = 0;
};

// One "u <whitespace> v" pair per line; '#' starts a comment. Ids may be
// sparse; they are remapped to 0..n-1 in ascending original order.
Graph load_edge_list(std::istream& in, LoadStats* stats = nullptr);

// Dense numeric matrix, one row per node, comma- or whitespace-separated.
Matrix load_feature_matrix(std::istream& in);

// One integer label per line.
std::vector<int> load_label_list(std::istream& in);

// Convenience loader wiring the three files together; feature/label row
// counts must match the edge-derived node count.
Graph load_dataset(const std::string& edge_path,
                   const std::string& feature_path = {},
                   const std::string& label_path = {},
                   LoadStats* stats = nullptr);

// Internal-id edge list, one "u v" per line, u < v sorted.
void write_edge_list(const Graph& g, std::ostream& out);
void write_feature_matrix(const Matrix& x, std::ostream& out);
void write_label_list(std::span<const int> y, std::ostream& out);

// Induced subgraph on the largest connected component; ties go to the
// component containing the smallest node id. Node order is preserved and
// features/labels are sliced along.
Graph extract_lcc(const Graph& g);

// New graph with the pairs added; existing pairs are no-ops.
Graph add_edges(const Graph& g, const EdgeSet& additions);

std::vector<int> degree_sequence(const Graph& g);

// c_u = 2·tri(u) / (d_u (d_u − 1)); nodes of degree < 2 get 0.
std::vector<double> local_clustering_coefficients(const Graph& g);

// Hop distances from source; -1 for unreachable nodes.
std::vector<int> bfs_distances(const Graph& g, NodeId source);

// Component id per node, ids assigned in order of first appearance.
std::vector<int> connected_components(const Graph& g);

}  // namespace structack
