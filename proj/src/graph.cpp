#include "structack/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace structack {

namespace {

std::uint64_t pair_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

}  // namespace

Edge make_edge(NodeId a, NodeId b) {
  if (a == b) throw std::invalid_argument("make_edge: self-pair " + std::to_string(a));
  if (a > b) std::swap(a, b);
  return Edge{a, b};
}

bool EdgeSet::add(NodeId a, NodeId b) {
  const Edge e = make_edge(a, b);
  if (!index_.insert(pair_key(e.u, e.v)).second) return false;
  edges_.push_back(e);
  return true;
}

bool EdgeSet::contains(NodeId a, NodeId b) const {
  if (a == b) return false;
  return index_.count(pair_key(a, b)) != 0;
}

Graph Graph::from_edges(NodeId node_count, const std::vector<Edge>& edges) {
  if (node_count < 0) throw std::invalid_argument("Graph: negative node count");
  Graph g;
  g.n_ = node_count;

  std::vector<Edge> unique;
  unique.reserve(edges.size());
  {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(edges.size() * 2);
    for (const Edge& e : edges) {
      if (e.u == e.v) throw std::invalid_argument("Graph: self-loop on node " + std::to_string(e.u));
      if (e.u < 0 || e.v < 0 || e.u >= node_count || e.v >= node_count)
        throw std::out_of_range("Graph: edge endpoint out of range");
      if (seen.insert(pair_key(e.u, e.v)).second) unique.push_back(make_edge(e.u, e.v));
    }
  }
  g.m_ = static_cast<std::int64_t>(unique.size());

  std::vector<std::int64_t> deg(node_count, 0);
  for (const Edge& e : unique) {
    ++deg[e.u];
    ++deg[e.v];
  }
  g.row_ptr_.assign(node_count + 1, 0);
  for (NodeId u = 0; u < node_count; ++u) g.row_ptr_[u + 1] = g.row_ptr_[u] + deg[u];
  g.adjacency_.resize(static_cast<std::size_t>(2) * g.m_);
  std::vector<std::int64_t> cursor(g.row_ptr_.begin(), g.row_ptr_.end() - 1);
  for (const Edge& e : unique) {
    g.adjacency_[cursor[e.u]++] = e.v;
    g.adjacency_[cursor[e.v]++] = e.u;
  }
  for (NodeId u = 0; u < node_count; ++u)
    std::sort(g.adjacency_.begin() + g.row_ptr_[u], g.adjacency_.begin() + g.row_ptr_[u + 1]);

  g.original_ids_.resize(node_count);
  for (NodeId u = 0; u < node_count; ++u) g.original_ids_[u] = u;
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (u == v) return false;
  if (degree(u) > degree(v)) std::swap(u, v);
  const auto row = neighbors(u);
  return std::binary_search(row.begin(), row.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(m_));
  for (NodeId u = 0; u < n_; ++u)
    for (const NodeId v : neighbors(u))
      if (u < v) out.push_back(Edge{u, v});
  return out;
}

void Graph::set_features(Matrix x) {
  if (x.rows() != n_)
    throw std::invalid_argument("features: expected " + std::to_string(n_) + " rows, got " +
                                std::to_string(x.rows()));
  features_ = std::move(x);
}

void Graph::set_labels(std::vector<int> y) {
  if (static_cast<int>(y.size()) != n_)
    throw std::invalid_argument("labels: expected " + std::to_string(n_) + " entries, got " +
                                std::to_string(y.size()));
  int max_label = -1;
  for (const int label : y) {
    if (label < 0) throw std::invalid_argument("labels: negative label");
    max_label = std::max(max_label, label);
  }
  labels_ = std::move(y);
  label_count_ = max_label + 1;
}

void Graph::set_original_ids(std::vector<std::int64_t> ids) {
  if (static_cast<int>(ids.size()) != n_)
    throw std::invalid_argument("original_ids: size mismatch");
  original_ids_ = std::move(ids);
}

Graph load_edge_list(std::istream& in, LoadStats* stats) {
  LoadStats local;
  std::vector<std::pair<std::int64_t, std::int64_t>> raw;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::int64_t a, b;
    if (!(fields >> a)) continue;  // blank or comment-only line
    std::string trailing;
    if (!(fields >> b) || (fields >> trailing)) {
      throw std::runtime_error("edge list: malformed line " + std::to_string(line_no));
    }
    raw.emplace_back(a, b);
  }

  // Ids become 0..n-1 in ascending original order; endpoints of dropped
  // self-loop lines still count as nodes.
  std::map<std::int64_t, NodeId> remap;
  for (const auto& [a, b] : raw) {
    remap.emplace(a, 0);
    remap.emplace(b, 0);
  }
  NodeId next = 0;
  for (auto& [orig, dense] : remap) dense = next++;

  std::vector<Edge> edges;
  edges.reserve(raw.size());
  std::unordered_set<std::uint64_t> seen;
  for (const auto& [a, b] : raw) {
    if (a == b) {
      ++local.self_loops_dropped;
      continue;
    }
    const Edge e = make_edge(remap[a], remap[b]);
    if (!seen.insert(pair_key(e.u, e.v)).second) {
      ++local.duplicate_lines;
      continue;
    }
    edges.push_back(e);
  }

  Graph g = Graph::from_edges(next, edges);
  std::vector<std::int64_t> originals(next);
  for (const auto& [orig, dense] : remap) originals[dense] = orig;
  g.set_original_ids(std::move(originals));
  if (stats) *stats = local;
  return g;
}

Matrix load_feature_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream fields(line);
    std::vector<double> row;
    double value;
    while (fields >> value) row.push_back(value);
    if (!fields.eof())
      throw std::runtime_error("feature matrix: malformed line " + std::to_string(line_no));
    if (row.empty()) continue;
    if (!rows.empty() && rows.front().size() != row.size())
      throw std::runtime_error("feature matrix: ragged row at line " + std::to_string(line_no));
    rows.push_back(std::move(row));
  }
  Matrix x(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows.front().size()));
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) x(i, j) = rows[i][j];
  return x;
}

std::vector<int> load_label_list(std::istream& in) {
  std::vector<int> labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    int label;
    if (!(fields >> label)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw std::runtime_error("labels: malformed line " + std::to_string(line_no));
    }
    labels.push_back(label);
  }
  return labels;
}

Graph load_dataset(const std::string& edge_path, const std::string& feature_path,
                   const std::string& label_path, LoadStats* stats) {
  std::ifstream edges(edge_path);
  if (!edges) throw std::runtime_error("cannot open edge list: " + edge_path);
  Graph g = load_edge_list(edges, stats);
  if (!feature_path.empty()) {
    std::ifstream in(feature_path);
    if (!in) throw std::runtime_error("cannot open features: " + feature_path);
    g.set_features(load_feature_matrix(in));
  }
  if (!label_path.empty()) {
    std::ifstream in(label_path);
    if (!in) throw std::runtime_error("cannot open labels: " + label_path);
    g.set_labels(load_label_list(in));
  }
  return g;
}

void write_edge_list(const Graph& g, std::ostream& out) {
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

void write_feature_matrix(const Matrix& x, std::ostream& out) {
  char buf[64];
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", x(i, j));
      out << (j ? " " : "") << buf;
    }
    out << '\n';
  }
}

void write_label_list(std::span<const int> y, std::ostream& out) {
  for (const int label : y) out << label << '\n';
}

std::vector<int> connected_components(const Graph& g) {
  std::vector<int> component(g.node_count(), -1);
  int next = 0;
  std::queue<NodeId> frontier;
  for (NodeId start = 0; start < g.node_count(); ++start) {
    if (component[start] != -1) continue;
    component[start] = next;
    frontier.push(start);
    while (!frontier.empty()) {
      const NodeId u = frontier.front();
      frontier.pop();
      for (const NodeId v : g.neighbors(u)) {
        if (component[v] == -1) {
          component[v] = next;
          frontier.push(v);
        }
      }
    }
    ++next;
  }
  return component;
}

Graph extract_lcc(const Graph& g) {
  if (g.node_count() < 1) throw std::invalid_argument("extract_lcc: empty graph");
  const std::vector<int> component = connected_components(g);
  const int count = *std::max_element(component.begin(), component.end()) + 1;
  std::vector<int> size(count, 0);
  for (const int c : component) ++size[c];
  // Component ids are assigned in first-appearance order, so among equal
  // sizes the lower id contains the smallest node.
  int best = 0;
  for (int c = 1; c < count; ++c)
    if (size[c] > size[best]) best = c;

  std::vector<NodeId> dense(g.node_count(), -1);
  std::vector<NodeId> kept;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    if (component[u] == best) {
      dense[u] = static_cast<NodeId>(kept.size());
      kept.push_back(u);
    }
  }

  std::vector<Edge> edges;
  for (const Edge& e : g.edges())
    if (component[e.u] == best && component[e.v] == best)
      edges.push_back(Edge{dense[e.u], dense[e.v]});
  Graph sub = Graph::from_edges(static_cast<NodeId>(kept.size()), edges);

  std::vector<std::int64_t> originals(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) originals[i] = g.original_ids()[kept[i]];
  sub.set_original_ids(std::move(originals));

  if (g.has_features()) {
    Matrix x(static_cast<int>(kept.size()), g.features().cols());
    for (std::size_t i = 0; i < kept.size(); ++i)
      for (int j = 0; j < x.cols(); ++j) x(static_cast<int>(i), j) = g.features()(kept[i], j);
    sub.set_features(std::move(x));
  }
  if (g.has_labels()) {
    std::vector<int> y(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) y[i] = g.labels()[kept[i]];
    sub.set_labels(std::move(y));
  }
  return sub;
}

Graph add_edges(const Graph& g, const EdgeSet& additions) {
  std::vector<Edge> edges = g.edges();
  for (const Edge& e : additions.edges()) {
    if (e.u < 0 || e.v >= g.node_count())
      throw std::out_of_range("add_edges: endpoint out of range");
    if (!g.has_edge(e.u, e.v)) edges.push_back(e);
  }
  Graph out = Graph::from_edges(g.node_count(), edges);
  out.set_original_ids(g.original_ids());
  if (g.has_features()) out.set_features(g.features());
  if (g.has_labels()) out.set_labels(g.labels());
  return out;
}

std::vector<int> degree_sequence(const Graph& g) {
  std::vector<int> deg(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) deg[u] = g.degree(u);
  return deg;
}

std::vector<double> local_clustering_coefficients(const Graph& g) {
  std::vector<double> coeff(g.node_count(), 0.0);
  std::vector<char> marked(g.node_count(), 0);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const int d = g.degree(u);
    if (d < 2) continue;
    for (const NodeId v : g.neighbors(u)) marked[v] = 1;
    std::int64_t links = 0;
    for (const NodeId v : g.neighbors(u))
      for (const NodeId w : g.neighbors(v))
        if (w != u && marked[w]) ++links;
    for (const NodeId v : g.neighbors(u)) marked[v] = 0;
    // Each neighbor-neighbor edge was seen from both ends.
    coeff[u] = static_cast<double>(links) / (static_cast<double>(d) * (d - 1));
  }
  return coeff;
}

std::vector<int> bfs_distances(const Graph& g, NodeId source) {
  if (source < 0 || source >= g.node_count())
    throw std::out_of_range("bfs_distances: source out of range");
  std::vector<int> dist(g.node_count(), -1);
  dist[source] = 0;
  std::queue<NodeId> frontier;
  frontier.push(source);
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (const NodeId v : g.neighbors(u)) {
      if (dist[v] == -1) {
        dist[v] = dist[u] + 1;
        frontier.push(v);
      }
    }
  }
  return dist;
}

}  // namespace structack
