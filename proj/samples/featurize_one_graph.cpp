// Builds a small graph in memory and prints every feature scheme for it.

#include <iostream>
#include <vector>

#include "nctefa.hpp"

int main() {
  using namespace nctefa;
  // Star with four leaves plus a tail hanging off one leaf.
  const std::vector<Edge> edges{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {4, 5}};
  const Graph g = Graph::from_edges(7, edges);

  const MetricOptions opts;  // T = 1, step = 0.001, spectral Gramian
  const Eigen::IOFormat fmt(6, 0, ", ", "\n", "  [", "]");

  std::cout << "average controllability:\n"
            << compute_metric(g, MetricKind::average_controllability, opts).values().transpose().format(fmt)
            << "\n\nnct-efa (ac, clo, bet, eig):\n"
            << nct_efa_features(g, opts).x.format(fmt)
            << "\n\nac-rank, k = 4:\n"
            << ac_rank_features(g, RankEncodingSpec{4}, opts).x.format(fmt)
            << "\n\none-hot degree, dim = 5:\n"
            << one_hot_degree(g, 5).x.format(fmt) << '\n';
}
