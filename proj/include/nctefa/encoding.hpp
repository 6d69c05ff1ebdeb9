#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nctefa/centrality.hpp"
#include "nctefa/controllability.hpp"
#include "nctefa/diagnostics.hpp"
#include "nctefa/error.hpp"
#include "nctefa/graph.hpp"
#include "nctefa/metric.hpp"

namespace nctefa {

enum class Scheme { deg_onehot, nct_efa, ac_rank, concat_rank };

constexpr std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::deg_onehot: return "deg-onehot";
    case Scheme::nct_efa: return "nct-efa";
    case Scheme::ac_rank: return "ac-rank";
    case Scheme::concat_rank: return "concat-rank";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view name) {
  for (auto s : {Scheme::deg_onehot, Scheme::nct_efa, Scheme::ac_rank, Scheme::concat_rank}) {
    if (to_string(s) == name) return s;
  }
  throw ContractError("unknown scheme '" + std::string(name) +
                      "' (expected deg-onehot, nct-efa, ac-rank, concat-rank)");
}

/// Node features of one graph; row v belongs to node v.
struct FeatureMatrix {
  GraphId graph_id = 0;
  Scheme scheme = Scheme::nct_efa;
  Eigen::MatrixXd x;

  Eigen::Index dim() const noexcept { return x.cols(); }
  Eigen::Index rows() const noexcept { return x.rows(); }
};

struct RankEncodingSpec {
  int k = 10;

  void validate() const {
    if (k < 1) throw ContractError("rank encoding needs k >= 1");
  }
};

inline constexpr std::array<MetricKind, 4> kNctEfaMetrics{
    MetricKind::average_controllability, MetricKind::closeness, MetricKind::betweenness,
    MetricKind::eigenvector};

/// Row v = e_{min(deg(v), dim - 1)}.
inline FeatureMatrix one_hot_degree(const Graph& g, int dim, Diagnostics* diag = nullptr) {
  if (dim < 1) throw ContractError("one-hot degree dimension must be >= 1");
  FeatureMatrix f{g.id(), Scheme::deg_onehot, Eigen::MatrixXd::Zero(g.n(), dim)};
  for (NodeId v = 0; v < g.n(); ++v) {
    const int d = g.degree(v);
    if (d >= dim && diag != nullptr) ++diag->degrees_clipped;
    f.x(v, std::min(d, dim - 1)) = 1.0;
  }
  return f;
}

/// Histogram bin of each value: k equal-width bins spanning [min, max],
/// half-open except the last, which also holds the maximum. A constant
/// vector puts every node in bin 0.
inline std::vector<int> rank_bins(const Eigen::VectorXd& values, int k) {
  std::vector<int> bins(static_cast<std::size_t>(values.size()), 0);
  if (values.size() == 0) return bins;
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  // A spread at rounding level (e.g. automorphic nodes) counts as constant.
  if (hi - lo <= 1e-10 * std::max(std::abs(lo), std::abs(hi))) return bins;
  const double width = (hi - lo) / k;
  for (Eigen::Index v = 0; v < values.size(); ++v) {
    // The 1e-9 slack keeps values lying on an interior edge in the upper bin
    // when rounding lands them a hair below it.
    const double pos = std::floor((values[v] - lo) / width + 1e-9);
    bins[v] = std::clamp(static_cast<int>(pos), 0, k - 1);
  }
  return bins;
}

/// One-hot of each node's histogram bin (k columns).
inline FeatureMatrix rank_encode(const MetricVector& m, const RankEncodingSpec& spec,
                                 GraphId graph_id = 0) {
  spec.validate();
  const Eigen::VectorXd& values = m.values();
  for (Eigen::Index v = 0; v < values.size(); ++v) {
    if (!std::isfinite(values[v])) {
      throw NumericError("rank_encode: metric '" + std::string(short_name(m.kind())) +
                         "' is not finite at node " + std::to_string(v));
    }
  }
  const auto scheme =
      m.kind() == MetricKind::average_controllability ? Scheme::ac_rank : Scheme::concat_rank;
  FeatureMatrix f{graph_id, scheme, Eigen::MatrixXd::Zero(values.size(), spec.k)};
  const auto bins = rank_bins(values, spec.k);
  for (Eigen::Index v = 0; v < values.size(); ++v) f.x(v, bins[v]) = 1.0;
  return f;
}

/// Settings shared by every metric computation.
struct MetricOptions {
  Horizon horizon{};
  ControllabilityOptions controllability{};
};

/// Evaluates one metric on `g`. Eigenvector centrality of an edgeless graph
/// falls back to zeros and is counted in `diag`.
inline MetricVector compute_metric(const Graph& g, MetricKind kind, const MetricOptions& opts = {},
                                   Diagnostics* diag = nullptr) {
  switch (kind) {
    case MetricKind::average_controllability:
      return average_controllability_for_graph(g, opts.horizon, opts.controllability);
    case MetricKind::degree:
      return degree_vector(g);
    case MetricKind::closeness:
      return closeness_centrality(g);
    case MetricKind::betweenness:
      return betweenness_centrality(g);
    case MetricKind::eigenvector:
      if (g.edge_count() == 0) {
        if (diag != nullptr) ++diag->eigenvector_zero_fallback;
        return MetricVector(MetricKind::eigenvector, Eigen::VectorXd::Zero(g.n()));
      }
      return eigenvector_centrality(g, diag);
  }
  throw ContractError("unknown metric kind");
}

/// Raw metric values side by side, one column per metric in `metrics` order
/// (default: ac, clo, bet, eig).
inline FeatureMatrix nct_efa_features(const Graph& g, const MetricOptions& opts = {},
                                      std::span<const MetricKind> metrics = kNctEfaMetrics,
                                      Diagnostics* diag = nullptr) {
  if (metrics.empty()) throw ContractError("nct-efa needs at least one metric");
  FeatureMatrix f{g.id(), Scheme::nct_efa,
                  Eigen::MatrixXd(g.n(), static_cast<Eigen::Index>(metrics.size()))};
  for (std::size_t j = 0; j < metrics.size(); ++j) {
    f.x.col(static_cast<Eigen::Index>(j)) = compute_metric(g, metrics[j], opts, diag).values();
  }
  return f;
}

/// Rank encodings of each metric concatenated in list order; dim = k * |metrics|.
inline FeatureMatrix concat_rank_features(const Graph& g, const RankEncodingSpec& spec,
                                          const MetricOptions& opts = {},
                                          std::span<const MetricKind> metrics = kAllMetrics,
                                          Diagnostics* diag = nullptr) {
  spec.validate();
  if (metrics.empty()) throw ContractError("concat-rank needs at least one metric");
  FeatureMatrix f{g.id(), Scheme::concat_rank,
                  Eigen::MatrixXd(g.n(), spec.k * static_cast<Eigen::Index>(metrics.size()))};
  for (std::size_t j = 0; j < metrics.size(); ++j) {
    const auto block = rank_encode(compute_metric(g, metrics[j], opts, diag), spec, g.id());
    f.x.middleCols(static_cast<Eigen::Index>(j) * spec.k, spec.k) = block.x;
  }
  return f;
}

inline FeatureMatrix ac_rank_features(const Graph& g, const RankEncodingSpec& spec,
                                      const MetricOptions& opts = {}) {
  auto f = rank_encode(compute_metric(g, MetricKind::average_controllability, opts), spec, g.id());
  f.scheme = Scheme::ac_rank;
  return f;
}

}  // namespace nctefa
