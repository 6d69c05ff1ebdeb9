#pragma once

#include <cmath>
#include <deque>
#include <vector>

#include <Eigen/Dense>

#include "nctefa/diagnostics.hpp"
#include "nctefa/error.hpp"
#include "nctefa/graph.hpp"
#include "nctefa/metric.hpp"

namespace nctefa {

inline MetricVector degree_vector(const Graph& g) {
  Eigen::VectorXd d(g.n());
  for (NodeId v = 0; v < g.n(); ++v) d[v] = g.degree(v);
  return MetricVector(MetricKind::degree, std::move(d));
}

/// Closeness scaled by the reachable fraction:
///   c(v) = (r / (n - 1)) * (r / sum_{u reachable} d(u, v)),  r = #reachable nodes.
/// On connected graphs this is (n - 1) / sum_u d(u, v). Isolated nodes get 0.
inline MetricVector closeness_centrality(const Graph& g) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(g.n());
  if (g.n() > 1) {
    const double others = g.n() - 1.0;
    for (NodeId v = 0; v < g.n(); ++v) {
      long reach = 0;
      long total = 0;
      for (int d : bfs_distances(g, v)) {
        if (d > 0) {
          ++reach;
          total += d;
        }
      }
      if (reach > 0) {
        const double r = static_cast<double>(reach);
        c[v] = (r / others) * (r / static_cast<double>(total));
      }
    }
  }
  return MetricVector(MetricKind::closeness, std::move(c));
}

/// Brandes' algorithm. Each unordered pair {s, t} contributes once, endpoints
/// excluded, no normalization.
inline MetricVector betweenness_centrality(const Graph& g) {
  const auto n = static_cast<std::size_t>(g.n());
  Eigen::VectorXd cb = Eigen::VectorXd::Zero(g.n());
  std::vector<NodeId> order;
  std::vector<std::vector<NodeId>> preds(n);
  std::vector<double> sigma(n), delta(n);
  std::vector<int> dist(n);
  order.reserve(n);
  for (NodeId s = 0; s < g.n(); ++s) {
    order.clear();
    for (auto& p : preds) p.clear();
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    sigma[s] = 1.0;
    dist[s] = 0;
    std::deque<NodeId> queue{s};
    while (!queue.empty()) {
      const NodeId v = queue.front();
      queue.pop_front();
      order.push_back(v);
      for (NodeId w : g.neighbors(v)) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const NodeId w = *it;
      for (NodeId v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) cb[w] += delta[w];
    }
  }
  cb *= 0.5;
  return MetricVector(MetricKind::betweenness, std::move(cb));
}

struct EigenvectorCentrality {
  MetricVector centrality;
  double eigenvalue;
  /// lambda_max has multiplicity > 1 (e.g. two isomorphic components), so
  /// the vector is one arbitrary member of the eigenspace.
  bool degenerate_top;
};

/// Unit eigenvector of the largest adjacency eigenvalue, oriented so its
/// largest-magnitude entry is positive.
inline EigenvectorCentrality eigenvector_centrality_detail(const Graph& g) {
  if (g.edge_count() == 0) {
    throw DegenerateInputError("eigenvector centrality is undefined on an edgeless graph (graph " +
                               std::to_string(g.id()) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(adjacency(g));
  if (eig.info() != Eigen::Success) throw NumericError("eigenvector_centrality: eigensolver failed");
  const Eigen::Index top = g.n() - 1;
  const double lambda = eig.eigenvalues()[top];
  Eigen::VectorXd c = eig.eigenvectors().col(top);
  c.normalize();
  Eigen::Index arg = 0;
  const double peak = c.cwiseAbs().maxCoeff();
  // First index within rounding of the peak, so ties pick deterministically.
  while (std::abs(c[arg]) < peak * (1.0 - 1e-12)) ++arg;
  if (c[arg] < 0.0) c = -c;
  const bool degenerate =
      top > 0 && lambda - eig.eigenvalues()[top - 1] <= 1e-9 * std::max(1.0, std::abs(lambda));
  return {MetricVector(MetricKind::eigenvector, std::move(c)), lambda, degenerate};
}

inline MetricVector eigenvector_centrality(const Graph& g, Diagnostics* diag = nullptr) {
  auto r = eigenvector_centrality_detail(g);
  if (diag != nullptr && r.degenerate_top) ++diag->eigenvector_degenerate_top;
  return std::move(r.centrality);
}

}  // namespace nctefa
