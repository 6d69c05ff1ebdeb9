#pragma once

#include <charconv>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "nctefa/dataset_io.hpp"
#include "nctefa/encoding.hpp"
#include "nctefa/error.hpp"
#include "nctefa/graph.hpp"
#include "nctefa/metric.hpp"

namespace nctefa {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr int kFeatureFormatVersion = 1;

/// Shortest decimal that parses back to the same double; "0" for both zeros.
inline std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw NumericError("cannot format value");
  return std::string(buf, ptr);
}

struct FeaturizeConfig {
  std::filesystem::path dataset;
  Scheme scheme = Scheme::nct_efa;
  int k = 10;
  Horizon horizon{};
  GramianMethod method = GramianMethod::spectral;
  /// Empty means the scheme's default list.
  std::vector<MetricKind> metrics;
  bool rescale_spectral = false;
  bool standardize = false;
  int threads = 1;
  bool skip_errors = false;
  std::filesystem::path out;

  std::vector<MetricKind> effective_metrics() const {
    if (!metrics.empty()) return metrics;
    switch (scheme) {
      case Scheme::deg_onehot: return {MetricKind::degree};
      case Scheme::nct_efa: return {kNctEfaMetrics.begin(), kNctEfaMetrics.end()};
      case Scheme::ac_rank: return {MetricKind::average_controllability};
      case Scheme::concat_rank: return {kAllMetrics.begin(), kAllMetrics.end()};
    }
    return {};
  }

  void validate() const {
    if (threads < 1) throw ContractError("--threads must be >= 1");
    RankEncodingSpec{k}.validate();
    horizon.validate();
    if (method == GramianMethod::lyapunov) {
      throw ContractError("--method must be spectral or trapezoid");
    }
    if (scheme == Scheme::deg_onehot && !metrics.empty() &&
        metrics != std::vector<MetricKind>{MetricKind::degree}) {
      throw ContractError("deg-onehot only encodes degree; drop --metrics");
    }
    if (scheme == Scheme::ac_rank && !metrics.empty() &&
        metrics != std::vector<MetricKind>{MetricKind::average_controllability}) {
      throw ContractError("ac-rank only encodes average controllability; drop --metrics");
    }
    if (standardize && scheme != Scheme::nct_efa) {
      throw ContractError("--standardize applies to the nct-efa scheme only");
    }
  }

  MetricOptions metric_options() const {
    MetricOptions o;
    o.horizon = horizon;
    o.controllability.method = method;
    o.controllability.rescale_spectral = rescale_spectral;
    return o;
  }
};

struct SkippedGraph {
  GraphId id;
  std::string error;
};

struct FeaturizeReport {
  Eigen::Index dim = 0;
  std::size_t records = 0;
  std::vector<SkippedGraph> skipped;
  Diagnostics diagnostics;
  double wall_seconds = 0.0;
};

/// Runs `produce(i)` for i in [0, count) on `threads` workers and hands each
/// result to `consume(i, result)` on the calling thread in index order.
/// At most `window` results wait for consumption at any time. An exception
/// thrown by `produce` is rethrown when its index comes up for consumption.
template <class Produce, class Consume>
void ordered_parallel_for(std::size_t count, int threads, Produce&& produce, Consume&& consume) {
  using Result = std::invoke_result_t<Produce&, std::size_t>;
  using Slot = std::variant<std::monostate, Result, std::exception_ptr>;
  const std::size_t window = 64 * static_cast<std::size_t>(threads);
  std::vector<Slot> slots(count);
  std::mutex mu;
  std::condition_variable cv;
  std::size_t next_task = 0;
  std::size_t next_emit = 0;
  bool stop = false;

  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return stop || next_task >= count || next_task < next_emit + window; });
        if (stop || next_task >= count) return;
        i = next_task++;
      }
      Slot slot;
      try {
        slot.template emplace<1>(produce(i));
      } catch (...) {
        slot.template emplace<2>(std::current_exception());
      }
      {
        std::lock_guard lock(mu);
        slots[i] = std::move(slot);
      }
      cv.notify_all();
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);

  auto halt = [&] {
    {
      std::lock_guard lock(mu);
      stop = true;
    }
    cv.notify_all();
    pool.clear();
  };

  try {
    for (std::size_t e = 0; e < count; ++e) {
      Slot slot;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return slots[e].index() != 0; });
        slot = std::move(slots[e]);
        slots[e] = std::monostate{};
        ++next_emit;
      }
      cv.notify_all();
      if (slot.index() == 2) std::rethrow_exception(std::get<2>(slot));
      consume(e, std::move(std::get<1>(slot)));
    }
  } catch (...) {
    halt();
    throw;
  }
  halt();
}

namespace detail {

inline std::string metrics_json(const std::vector<MetricKind>& metrics) {
  std::string s = "[";
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    if (i > 0) s += ',';
    s += '"';
    s += short_name(metrics[i]);
    s += '"';
  }
  return s + "]";
}

inline std::string feature_record(const FeatureMatrix& f, int label) {
  std::string s;
  s.reserve(static_cast<std::size_t>(f.x.size()) * 4 + 64);
  s += R"({"id":)" + std::to_string(f.graph_id) + R"(,"label":)" + std::to_string(label) +
       R"(,"n":)" + std::to_string(f.x.rows()) + R"(,"x":[)";
  for (Eigen::Index r = 0; r < f.x.rows(); ++r) {
    if (r > 0) s += ',';
    s += '[';
    for (Eigen::Index c = 0; c < f.x.cols(); ++c) {
      if (c > 0) s += ',';
      s += format_double(f.x(r, c));
    }
    s += ']';
  }
  s += "]}\n";
  return s;
}

/// Per-column count/mean/M2, merged pairwise (Chan et al.).
struct ColumnMoments {
  double count = 0.0;
  Eigen::VectorXd mean;
  Eigen::VectorXd m2;

  static ColumnMoments of(const Eigen::MatrixXd& x) {
    ColumnMoments m;
    m.count = static_cast<double>(x.rows());
    m.mean = x.colwise().mean().transpose();
    m.m2 = (x.rowwise() - m.mean.transpose()).array().square().colwise().sum().transpose();
    return m;
  }

  void merge(const ColumnMoments& o) {
    if (o.count == 0.0) return;
    if (count == 0.0) {
      *this = o;
      return;
    }
    const double total = count + o.count;
    const Eigen::VectorXd delta = o.mean - mean;
    mean += delta * (o.count / total);
    m2 += o.m2 + delta.cwiseProduct(delta) * (count * o.count / total);
    count = total;
  }
};

}  // namespace detail

/// Featurizes every graph of `ds` and writes the feature file to `out`.
/// Output order is ascending graph id whatever the thread count.
inline FeaturizeReport featurize_dataset(const GraphDataset& ds, const FeaturizeConfig& cfg,
                                         std::ostream& out) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto metrics = cfg.effective_metrics();
  const auto opts = cfg.metric_options();
  const RankEncodingSpec spec{cfg.k};
  const auto& graphs = ds.graphs();

  int onehot_dim = 1;
  if (cfg.scheme == Scheme::deg_onehot) {
    for (const auto& g : graphs) {
      for (NodeId v = 0; v < g.n(); ++v) onehot_dim = std::max(onehot_dim, g.degree(v) + 1);
    }
  }
  const auto width = static_cast<Eigen::Index>(metrics.size());
  Eigen::Index dim = 0;
  switch (cfg.scheme) {
    case Scheme::deg_onehot: dim = onehot_dim; break;
    case Scheme::nct_efa: dim = width; break;
    case Scheme::ac_rank: dim = cfg.k; break;
    case Scheme::concat_rank: dim = cfg.k * width; break;
  }

  struct Computed {
    std::optional<FeatureMatrix> features;
    Diagnostics diag;
    std::string error;
  };
  auto compute = [&](std::size_t i) {
    Computed c;
    try {
      const Graph& g = graphs[i];
      switch (cfg.scheme) {
        case Scheme::deg_onehot: c.features = one_hot_degree(g, onehot_dim, &c.diag); break;
        case Scheme::nct_efa: c.features = nct_efa_features(g, opts, metrics, &c.diag); break;
        case Scheme::ac_rank: c.features = ac_rank_features(g, spec, opts); break;
        case Scheme::concat_rank:
          c.features = concat_rank_features(g, spec, opts, metrics, &c.diag);
          break;
      }
    } catch (const NumericError& e) {
      if (!cfg.skip_errors) throw;
      c.features.reset();
      c.error = e.what();
    }
    return c;
  };

  FeaturizeReport report;
  report.dim = dim;

  std::optional<Eigen::VectorXd> shift, scale;
  if (cfg.standardize) {
    detail::ColumnMoments total;
    ordered_parallel_for(graphs.size(), cfg.threads,
                         [&](std::size_t i) {
                           auto c = compute(i);
                           return c.features ? std::optional(detail::ColumnMoments::of(c.features->x))
                                             : std::nullopt;
                         },
                         [&](std::size_t, std::optional<detail::ColumnMoments> m) {
                           if (m) total.merge(*m);
                         });
    if (total.count > 0.0) {
      shift = total.mean;
      scale = (total.m2 / total.count).cwiseSqrt().unaryExpr([](double s) { return s > 0.0 ? s : 1.0; });
    }
  }

  out << R"({"meta":{"format_version":)" << kFeatureFormatVersion << R"(,"scheme":")"
      << to_string(cfg.scheme) << R"(","dim":)" << dim << R"(,"k":)" << cfg.k
      << R"(,"metrics":)" << detail::metrics_json(metrics) << R"(,"horizon":)"
      << format_double(cfg.horizon.end) << R"(,"step":)" << format_double(cfg.horizon.step)
      << R"(,"dataset":)" << nlohmann::json(ds.name()).dump() << "}}\n";

  ordered_parallel_for(
      graphs.size(), cfg.threads,
      [&](std::size_t i) {
        auto c = compute(i);
        std::string line;
        if (c.features) {
          if (shift) {
            c.features->x = ((c.features->x.rowwise() - shift->transpose()).array().rowwise() /
                             scale->transpose().array())
                                .matrix();
          }
          if (c.features->dim() != dim) {
            throw ContractError("internal: record width " + std::to_string(c.features->dim()) +
                                " != dim " + std::to_string(dim));
          }
          line = detail::feature_record(*c.features, ds.label(graphs[i].id()));
        }
        return std::make_pair(std::move(line), std::move(c));
      },
      [&](std::size_t i, std::pair<std::string, Computed> r) {
        report.diagnostics += r.second.diag;
        if (r.second.features) {
          out << r.first;
          ++report.records;
        } else {
          report.skipped.push_back({graphs[i].id(), r.second.error});
        }
      });
  out.flush();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

inline nlohmann::ordered_json manifest_json(const FeaturizeConfig& cfg, const FeaturizeReport& r,
                                            const Diagnostics& ingest_diag) {
  nlohmann::ordered_json m;
  m["code_version"] = kVersion;
  m["config"] = {{"dataset", cfg.dataset.string()},
                 {"scheme", to_string(cfg.scheme)},
                 {"k", cfg.k},
                 {"horizon", cfg.horizon.end},
                 {"step", cfg.horizon.step},
                 {"method", to_string(cfg.method)},
                 {"metrics", nlohmann::json::parse(detail::metrics_json(cfg.effective_metrics()))},
                 {"rescale_spectral", cfg.rescale_spectral},
                 {"standardize", cfg.standardize},
                 {"threads", cfg.threads},
                 {"skip_errors", cfg.skip_errors},
                 {"out", cfg.out.string()}};
  m["dim"] = r.dim;
  m["records"] = r.records;
  m["wall_time_seconds"] = r.wall_seconds;
  Diagnostics d = ingest_diag;
  d += r.diagnostics;
  m["diagnostics"] = {{"self_loops_stripped", d.self_loops_stripped},
                      {"duplicate_edges_stripped", d.duplicate_edges_stripped},
                      {"graphs_remapped", d.graphs_remapped},
                      {"unmatched_labels", d.unmatched_labels},
                      {"degrees_clipped", d.degrees_clipped},
                      {"eigenvector_zero_fallback", d.eigenvector_zero_fallback},
                      {"eigenvector_degenerate_top", d.eigenvector_degenerate_top}};
  auto skipped = nlohmann::ordered_json::array();
  for (const auto& s : r.skipped) skipped.push_back({{"id", s.id}, {"error", s.error}});
  m["skipped"] = std::move(skipped);
  return m;
}

inline std::filesystem::path manifest_path(const std::filesystem::path& out) {
  return std::filesystem::path(out.string() + ".manifest.json");
}

/// Loads `cfg.dataset`, writes `cfg.out` and `<out>.manifest.json`.
inline FeaturizeReport run_featurize(const FeaturizeConfig& cfg) {
  cfg.validate();
  if (cfg.out.empty()) throw ContractError("--out is required");
  const auto loaded = load_dataset(cfg.dataset);
  std::ofstream out(cfg.out, std::ios::binary | std::ios::trunc);
  if (!out) throw ContractError("cannot write " + cfg.out.string());
  auto report = featurize_dataset(loaded.dataset, cfg, out);
  std::ofstream manifest(manifest_path(cfg.out), std::ios::binary | std::ios::trunc);
  manifest << manifest_json(cfg, report, loaded.diagnostics).dump(2) << '\n';
  return report;
}

/// One-row table with the dataset statistics columns.
inline std::string format_stats_table(const std::string& name, const DatasetStats& s) {
  char row[512];
  std::snprintf(row, sizeof row, "| %s | %zu | %d | %d | %.2f | %d | %.3f | %.3f | %d | %d | %zu |\n",
                name.c_str(), s.graph_count, s.nodes_min, s.nodes_max, s.nodes_mean,
                s.nodes_median, s.density_min, s.density_max, s.diameter_min, s.diameter_max,
                s.class_count);
  return std::string(
             "| Dataset | Graphs | Nodes min | Nodes max | Nodes mean | Nodes median | Density min "
             "| Density max | Diameter min | Diameter max | Classes |\n"
             "|---|---|---|---|---|---|---|---|---|---|---|\n") +
         row;
}

inline DatasetStats run_stats(const std::filesystem::path& dataset, std::ostream& out) {
  const auto loaded = load_dataset(dataset);
  const auto stats = dataset_stats(loaded.dataset);
  out << format_stats_table(loaded.dataset.name(), stats);
  return stats;
}

}  // namespace nctefa
