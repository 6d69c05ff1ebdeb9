#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

#include "nctefa/error.hpp"

namespace nctefa {

enum class MetricKind { average_controllability, degree, closeness, betweenness, eigenvector };

inline constexpr std::array<MetricKind, 5> kAllMetrics{
    MetricKind::average_controllability, MetricKind::degree, MetricKind::closeness,
    MetricKind::betweenness, MetricKind::eigenvector};

/// Short name used on the command line and in feature-file metadata.
constexpr std::string_view short_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::average_controllability: return "ac";
    case MetricKind::degree: return "deg";
    case MetricKind::closeness: return "clo";
    case MetricKind::betweenness: return "bet";
    case MetricKind::eigenvector: return "eig";
  }
  return "?";
}

inline MetricKind parse_metric(std::string_view name) {
  for (auto kind : kAllMetrics) {
    if (short_name(kind) == name) return kind;
  }
  throw ContractError("unknown metric '" + std::string(name) + "' (expected ac, deg, clo, bet, eig)");
}

/// Per-node values of one metric. Every entry is finite.
class MetricVector {
 public:
  MetricVector(MetricKind kind, Eigen::VectorXd values) : kind_(kind), values_(std::move(values)) {
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw NumericError("metric '" + std::string(short_name(kind_)) + "': non-finite value at node " +
                           std::to_string(i));
      }
    }
  }

  MetricKind kind() const noexcept { return kind_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  Eigen::Index size() const noexcept { return values_.size(); }
  double operator[](Eigen::Index i) const { return values_[i]; }

 private:
  MetricKind kind_;
  Eigen::VectorXd values_;
};

}  // namespace nctefa
