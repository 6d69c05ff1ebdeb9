#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace nctefa {

/// Counters for everything that was silently repaired or approximated.
/// Plain value type; workers keep their own copy and results are merged.
struct Diagnostics {
  std::int64_t self_loops_stripped = 0;
  std::int64_t duplicate_edges_stripped = 0;
  std::int64_t graphs_remapped = 0;
  std::int64_t unmatched_labels = 0;
  std::int64_t degrees_clipped = 0;
  std::int64_t eigenvector_zero_fallback = 0;
  std::int64_t eigenvector_degenerate_top = 0;
  /// graph id -> original node ids, index = compacted id. Only non-dense graphs.
  std::map<std::int64_t, std::vector<std::int64_t>> node_id_maps;

  Diagnostics& operator+=(const Diagnostics& o) {
    self_loops_stripped += o.self_loops_stripped;
    duplicate_edges_stripped += o.duplicate_edges_stripped;
    graphs_remapped += o.graphs_remapped;
    unmatched_labels += o.unmatched_labels;
    degrees_clipped += o.degrees_clipped;
    eigenvector_zero_fallback += o.eigenvector_zero_fallback;
    eigenvector_degenerate_top += o.eigenvector_degenerate_top;
    for (const auto& [id, map] : o.node_id_maps) node_id_maps[id] = map;
    return *this;
  }
};

}  // namespace nctefa
