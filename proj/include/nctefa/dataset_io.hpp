#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nctefa/diagnostics.hpp"
#include "nctefa/error.hpp"
#include "nctefa/graph.hpp"

namespace nctefa {

inline constexpr int kDatasetFormatVersion = 1;

struct IngestResult {
  GraphDataset dataset;
  Diagnostics diagnostics;
};

namespace detail {

inline std::int64_t parse_int(std::string_view text, const std::string& where) {
  std::int64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw ParseError(where + ": expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Edge list of one graph; entries must be [u, v] with non-negative integers.
inline std::vector<std::pair<std::int64_t, std::int64_t>> parse_edge_array(
    const nlohmann::json& arr, const std::string& where) {
  if (!arr.is_array()) throw ParseError(where + ": edge list is not an array");
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  out.reserve(arr.size());
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer()) {
      throw ParseError(where + ": edge " + e.dump() + " is not an [u,v] integer pair");
    }
    const auto u = e[0].get<std::int64_t>();
    const auto v = e[1].get<std::int64_t>();
    if (u < 0 || v < 0) throw ParseError(where + ": negative node id in " + e.dump());
    out.emplace_back(u, v);
  }
  return out;
}

}  // namespace detail

/// Parses the `id,target` label CSV.
inline std::map<GraphId, int> parse_labels_csv(std::istream& in) {
  std::map<GraphId, int> labels;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = detail::trim(line);
    if (row.empty()) continue;
    if (!header_seen) {
      if (row != "id,target") {
        throw ParseError("labels line " + std::to_string(line_no) +
                         ": expected header 'id,target', got '" + std::string(row) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError("labels line " + std::to_string(line_no) + ": expected two fields");
    }
    const std::string where = "labels line " + std::to_string(line_no);
    const auto id = detail::parse_int(detail::trim(row.substr(0, comma)), where);
    const auto target = detail::parse_int(detail::trim(row.substr(comma + 1)), where);
    if (target < 0) throw ParseError(where + ": negative label");
    if (!labels.emplace(id, static_cast<int>(target)).second) {
      throw IntegrityError(where + ": duplicate label for graph id " + std::to_string(id));
    }
  }
  if (!header_seen) throw ParseError("labels file is empty");
  return labels;
}

/// Reads the public distribution layout: a JSON object mapping graph-id
/// strings to [u,v] pair lists, plus an `id,target` CSV.
///
/// Node ids of each graph are compacted to 0..n-1 in ascending order of the
/// referenced ids; graphs that needed it are listed in the diagnostics.
inline IngestResult ingest_dataset(std::istream& edges_in, std::istream& labels_in,
                                   const std::string& name) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(edges_in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("edges file: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("edges file: top level is not an object");

  auto labels = parse_labels_csv(labels_in);
  Diagnostics diag;
  std::vector<Graph> graphs;
  graphs.reserve(doc.size());
  for (const auto& [key, value] : doc.items()) {
    const std::string where = "edges file, graph '" + key + "'";
    const GraphId id = detail::parse_int(key, where);
    const auto raw = detail::parse_edge_array(value, where);
    if (raw.empty()) throw IntegrityError(where + ": empty graph (n = 0)");

    std::vector<std::int64_t> ids;
    ids.reserve(raw.size() * 2);
    for (auto [u, v] : raw) {
      ids.push_back(u);
      ids.push_back(v);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    const bool dense = ids.back() + 1 == static_cast<std::int64_t>(ids.size());
    auto compact = [&](std::int64_t x) {
      return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), x) - ids.begin());
    };
    std::vector<Edge> edges;
    edges.reserve(raw.size());
    for (auto [u, v] : raw) edges.emplace_back(compact(u), compact(v));
    if (!dense) {
      ++diag.graphs_remapped;
      diag.node_id_maps[id] = ids;
    }
    if (!labels.contains(id)) throw IntegrityError("no label for graph id " + std::to_string(id));
    graphs.push_back(Graph::from_edges(id, static_cast<NodeId>(ids.size()), edges, &diag));
  }
  for (const auto& [id, label] : labels) {
    if (!doc.contains(std::to_string(id))) ++diag.unmatched_labels;
  }
  return {GraphDataset(name, std::move(graphs), std::move(labels)), std::move(diag)};
}

inline IngestResult ingest_dataset(const std::filesystem::path& edges_path,
                                   const std::filesystem::path& labels_path,
                                   const std::string& name) {
  std::ifstream edges(edges_path, std::ios::binary);
  if (!edges) throw ParseError("cannot open " + edges_path.string());
  std::ifstream labels(labels_path, std::ios::binary);
  if (!labels) throw ParseError("cannot open " + labels_path.string());
  return ingest_dataset(edges, labels, name);
}

/// Canonical line-oriented form: a metadata line, then one graph per line.
inline void write_canonical(const GraphDataset& ds, std::ostream& out) {
  out << R"({"meta":{"format_version":)" << kDatasetFormatVersion
      << R"(,"name":)" << nlohmann::json(ds.name()).dump() << "}}\n";
  for (const auto& g : ds.graphs()) {
    out << R"({"id":)" << g.id() << R"(,"n":)" << g.n() << R"(,"edges":[)";
    bool first = true;
    for (auto [u, v] : g.edges()) {
      if (!first) out << ',';
      first = false;
      out << '[' << u << ',' << v << ']';
    }
    out << R"(],"label":)" << ds.label(g.id()) << "}\n";
  }
}

inline IngestResult read_canonical(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto parse_line = [&](const std::string& text) {
    try {
      return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
  };
  std::string name;
  bool meta_seen = false;
  std::vector<Graph> graphs;
  std::map<GraphId, int> labels;
  Diagnostics diag;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto obj = parse_line(line);
    const std::string where = "dataset line " + std::to_string(line_no);
    if (!meta_seen) {
      if (!obj.is_object() || !obj.contains("meta")) throw ParseError(where + ": missing metadata");
      const auto& meta = obj["meta"];
      if (meta.value("format_version", -1) != kDatasetFormatVersion) {
        throw ParseError(where + ": unsupported format_version");
      }
      name = meta.value("name", std::string{});
      meta_seen = true;
      continue;
    }
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("n") ||
        !obj.contains("edges") || !obj.contains("label") || !obj["id"].is_number_integer() ||
        !obj["n"].is_number_integer() || !obj["label"].is_number_integer()) {
      throw ParseError(where + ": expected {id,n,edges,label}");
    }
    const auto id = obj["id"].get<GraphId>();
    const auto n = obj["n"].get<std::int64_t>();
    const auto raw = detail::parse_edge_array(obj["edges"], where);
    std::vector<Edge> edges;
    edges.reserve(raw.size());
    for (auto [u, v] : raw) {
      if (u >= n || v >= n) throw IntegrityError(where + ": node id out of range");
      edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
    graphs.push_back(Graph::from_edges(id, static_cast<NodeId>(n), edges, &diag));
    if (!labels.emplace(id, obj["label"].get<int>()).second) {
      throw IntegrityError(where + ": duplicate graph id " + std::to_string(id));
    }
  }
  if (!meta_seen) throw ParseError("dataset file is empty");
  return {GraphDataset(std::move(name), std::move(graphs), std::move(labels)), std::move(diag)};
}

/// Opens either a canonical dataset file or a directory in the public layout
/// (`<prefix>_edges.json` + `<prefix>_target.csv`, or `edges.json` + `target.csv`).
inline IngestResult load_dataset(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (fs::is_directory(path)) {
    fs::path edges, labels;
    for (const auto& entry : fs::directory_iterator(path)) {
      const auto file = entry.path().filename().string();
      if (file.ends_with("edges.json")) edges = entry.path();
      if (file.ends_with("target.csv")) labels = entry.path();
    }
    if (edges.empty() || labels.empty()) {
      throw ParseError(path.string() + ": directory has no *edges.json / *target.csv pair");
    }
    auto name = path.filename().string();
    if (name.empty()) name = path.parent_path().filename().string();
    return ingest_dataset(edges, labels, name);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_canonical(in);
}

}  // namespace nctefa
