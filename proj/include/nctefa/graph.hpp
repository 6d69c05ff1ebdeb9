#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nctefa/diagnostics.hpp"
#include "nctefa/error.hpp"

namespace nctefa {

using NodeId = std::int32_t;
using GraphId = std::int64_t;
using Edge = std::pair<NodeId, NodeId>;

/// Undirected simple graph on nodes 0..n-1. Immutable once built.
///
/// Edges are stored canonically (u < v, sorted, unique); self-loops and
/// duplicates handed to `from_edges` are dropped and counted.
class Graph {
 public:
  /// Builds a graph with an explicit node count. Self-loops and duplicate
  /// edges are stripped; `diag` (optional) receives the counts.
  static Graph from_edges(GraphId id, NodeId n, std::span<const Edge> edges,
                          Diagnostics* diag = nullptr) {
    if (n < 1) {
      throw IntegrityError("graph " + std::to_string(id) + " is empty (n = 0)");
    }
    Graph g;
    g.id_ = id;
    g.n_ = n;
    std::int64_t loops = 0;
    g.edges_.reserve(edges.size());
    for (auto [u, v] : edges) {
      if (u < 0 || v < 0 || u >= n || v >= n) {
        throw IntegrityError("graph " + std::to_string(id) + ": edge (" + std::to_string(u) +
                             "," + std::to_string(v) + ") out of range for n = " +
                             std::to_string(n));
      }
      if (u == v) {
        ++loops;
        continue;
      }
      g.edges_.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(g.edges_.begin(), g.edges_.end());
    const auto before = g.edges_.size();
    g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());
    if (diag != nullptr) {
      diag->self_loops_stripped += loops;
      diag->duplicate_edges_stripped += static_cast<std::int64_t>(before - g.edges_.size());
    }
    g.neighbors_.assign(static_cast<std::size_t>(n), {});
    for (auto [u, v] : g.edges_) {
      g.neighbors_[u].push_back(v);
      g.neighbors_[v].push_back(u);
    }
    for (auto& nb : g.neighbors_) std::sort(nb.begin(), nb.end());
    return g;
  }

  /// Node count inferred as 1 + max referenced id.
  static Graph from_edges(GraphId id, std::span<const Edge> edges, Diagnostics* diag = nullptr) {
    NodeId max_id = -1;
    for (auto [u, v] : edges) max_id = std::max({max_id, u, v});
    return from_edges(id, max_id + 1, edges, diag);
  }

  GraphId id() const noexcept { return id_; }
  NodeId n() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<NodeId>& neighbors(NodeId v) const { return neighbors_.at(v); }
  NodeId degree(NodeId v) const { return static_cast<NodeId>(neighbors_.at(v).size()); }

  /// Same structure with node v renamed to perm[v].
  Graph permuted(std::span<const NodeId> perm) const {
    if (perm.size() != static_cast<std::size_t>(n_)) {
      throw ContractError("permutation length does not match node count");
    }
    std::vector<Edge> mapped;
    mapped.reserve(edges_.size());
    for (auto [u, v] : edges_) mapped.emplace_back(perm[u], perm[v]);
    return from_edges(id_, n_, mapped);
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.id_ == b.id_ && a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  Graph() = default;

  GraphId id_ = 0;
  NodeId n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> neighbors_;
};

/// Dense symmetric 0/1 adjacency with zero diagonal.
inline Eigen::MatrixXd adjacency(const Graph& g) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.n(), g.n());
  for (auto [u, v] : g.edges()) {
    a(u, v) = 1.0;
    a(v, u) = 1.0;
  }
  return a;
}

/// Hop distances from `source`; -1 marks unreachable nodes.
inline std::vector<int> bfs_distances(const Graph& g, NodeId source) {
  std::vector<int> dist(static_cast<std::size_t>(g.n()), -1);
  std::deque<NodeId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    for (NodeId w : g.neighbors(v)) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

/// Largest finite shortest-path length, i.e. the largest component diameter.
inline int graph_diameter(const Graph& g) {
  int best = 0;
  for (NodeId s = 0; s < g.n(); ++s) {
    for (int d : bfs_distances(g, s)) best = std::max(best, d);
  }
  return best;
}

inline double graph_density(const Graph& g) {
  if (g.n() < 2) return 0.0;
  const double n = g.n();
  return 2.0 * static_cast<double>(g.edge_count()) / (n * (n - 1.0));
}

/// Graphs in ascending id order with one label each.
class GraphDataset {
 public:
  GraphDataset() = default;

  GraphDataset(std::string name, std::vector<Graph> graphs, std::map<GraphId, int> labels)
      : name_(std::move(name)), graphs_(std::move(graphs)), labels_(std::move(labels)) {
    std::sort(graphs_.begin(), graphs_.end(),
              [](const Graph& a, const Graph& b) { return a.id() < b.id(); });
    for (std::size_t i = 1; i < graphs_.size(); ++i) {
      if (graphs_[i].id() == graphs_[i - 1].id()) {
        throw IntegrityError("duplicate graph id " + std::to_string(graphs_[i].id()));
      }
    }
    for (const auto& g : graphs_) {
      auto it = labels_.find(g.id());
      if (it == labels_.end()) {
        throw IntegrityError("no label for graph id " + std::to_string(g.id()));
      }
      if (it->second < 0) {
        throw IntegrityError("negative label for graph id " + std::to_string(g.id()));
      }
    }
    std::erase_if(labels_, [this](const auto& kv) { return !contains(kv.first); });
  }

  const std::string& name() const noexcept { return name_; }
  const std::vector<Graph>& graphs() const noexcept { return graphs_; }
  std::size_t size() const noexcept { return graphs_.size(); }
  int label(GraphId id) const { return labels_.at(id); }
  const std::map<GraphId, int>& labels() const noexcept { return labels_; }

  bool contains(GraphId id) const {
    return std::ranges::binary_search(graphs_, id, {}, &Graph::id);
  }

  friend bool operator==(const GraphDataset& a, const GraphDataset& b) {
    return a.name_ == b.name_ && a.graphs_ == b.graphs_ && a.labels_ == b.labels_;
  }

 private:
  std::string name_;
  std::vector<Graph> graphs_;
  std::map<GraphId, int> labels_;
};

struct DatasetStats {
  std::size_t graph_count = 0;
  NodeId nodes_min = 0;
  NodeId nodes_max = 0;
  double nodes_mean = 0.0;
  NodeId nodes_median = 0;
  double density_min = 0.0;
  double density_max = 0.0;
  int diameter_min = 0;
  int diameter_max = 0;
  std::size_t class_count = 0;
};

/// Aggregates over a non-empty dataset. The median of an even count is the
/// lower-middle element.
inline DatasetStats dataset_stats(const GraphDataset& ds) {
  if (ds.size() == 0) throw ContractError("dataset_stats needs a non-empty dataset");
  DatasetStats s;
  s.graph_count = ds.size();
  std::vector<NodeId> sizes;
  sizes.reserve(ds.size());
  s.density_min = std::numeric_limits<double>::infinity();
  s.density_max = -std::numeric_limits<double>::infinity();
  s.diameter_min = std::numeric_limits<int>::max();
  s.diameter_max = 0;
  double total = 0.0;
  for (const auto& g : ds.graphs()) {
    sizes.push_back(g.n());
    total += g.n();
    const double dens = graph_density(g);
    s.density_min = std::min(s.density_min, dens);
    s.density_max = std::max(s.density_max, dens);
    const int diam = graph_diameter(g);
    s.diameter_min = std::min(s.diameter_min, diam);
    s.diameter_max = std::max(s.diameter_max, diam);
  }
  std::sort(sizes.begin(), sizes.end());
  s.nodes_min = sizes.front();
  s.nodes_max = sizes.back();
  s.nodes_mean = total / static_cast<double>(sizes.size());
  s.nodes_median = sizes[(sizes.size() - 1) / 2];
  std::vector<int> classes;
  for (const auto& [id, label] : ds.labels()) classes.push_back(label);
  std::sort(classes.begin(), classes.end());
  s.class_count = static_cast<std::size_t>(
      std::distance(classes.begin(), std::unique(classes.begin(), classes.end())));
  return s;
}

}  // namespace nctefa
