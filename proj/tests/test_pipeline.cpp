#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "nctefa/pipeline.hpp"
#include "oracles.hpp"

namespace nctefa {
namespace {

GraphDataset random_dataset(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Graph> graphs;
  std::map<GraphId, int> labels;
  for (int i = 0; i < count; ++i) {
    graphs.push_back(testing::random_connected(i * 2 + 1, 4 + i % 13, 0.15, rng));
    labels[i * 2 + 1] = i % 2;
  }
  return GraphDataset("synthetic", graphs, labels);
}

std::vector<nlohmann::json> parse_lines(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(nlohmann::json::parse(line));
  return out;
}

std::string run(const GraphDataset& ds, FeaturizeConfig cfg, FeaturizeReport* report = nullptr) {
  std::ostringstream out;
  auto r = featurize_dataset(ds, cfg, out);
  if (report) *report = r;
  return out.str();
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.0), "0");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.3333333333333333");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(OrderedParallel, EmitsInIndexOrder) {
  std::vector<std::size_t> seen;
  ordered_parallel_for(
      500, 4, [](std::size_t i) { return i * i; },
      [&](std::size_t i, std::size_t v) {
        EXPECT_EQ(v, i * i);
        seen.push_back(i);
      });
  ASSERT_EQ(seen.size(), 500u);
  for (std::size_t i = 0; i < seen.size(); ++i) EXPECT_EQ(seen[i], i);
}

TEST(OrderedParallel, FirstFailureInOrderWins) {
  try {
    ordered_parallel_for(
        200, 4,
        [](std::size_t i) -> int {
          if (i == 37 || i == 150) throw std::runtime_error("fail " + std::to_string(i));
          return 0;
        },
        [](std::size_t, int) {});
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "fail 37");
  }
}

TEST(Featurize, MetadataLineExact) {
  const auto ds = random_dataset(3, 1);
  FeaturizeConfig cfg;
  cfg.scheme = Scheme::concat_rank;
  const auto text = run(ds, cfg);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            R"({"meta":{"format_version":1,"scheme":"concat-rank","dim":50,"k":10,"metrics":["ac","deg","clo","bet","eig"],"horizon":1,"step":0.001,"dataset":"synthetic"}})");
}

TEST(Featurize, RecordsMatchLibraryFunctions) {
  const auto ds = random_dataset(5, 2);
  FeaturizeConfig cfg;
  cfg.scheme = Scheme::nct_efa;
  const auto lines = parse_lines(run(ds, cfg));
  ASSERT_EQ(lines.size(), 6u);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Graph& g = ds.graphs()[i];
    const auto& rec = lines[i + 1];
    EXPECT_EQ(rec["id"], g.id());
    EXPECT_EQ(rec["label"], ds.label(g.id()));
    EXPECT_EQ(rec["n"], g.n());
    const auto f = nct_efa_features(g);
    for (NodeId v = 0; v < g.n(); ++v)
      for (int c = 0; c < 4; ++c) EXPECT_EQ(rec["x"][v][c].get<double>(), f.x(v, c));
  }
}

TEST(Featurize, DimensionsPerScheme) {
  const auto ds = random_dataset(6, 3);
  int max_deg = 0;
  for (const auto& g : ds.graphs())
    for (NodeId v = 0; v < g.n(); ++v) max_deg = std::max(max_deg, g.degree(v));
  const std::pair<Scheme, int> cases[] = {{Scheme::deg_onehot, max_deg + 1},
                                          {Scheme::nct_efa, 4},
                                          {Scheme::ac_rank, 20},
                                          {Scheme::concat_rank, 100}};
  for (auto [scheme, dim] : cases) {
    FeaturizeConfig cfg;
    cfg.scheme = scheme;
    cfg.k = 20;
    FeaturizeReport report;
    const auto lines = parse_lines(run(ds, cfg, &report));
    EXPECT_EQ(report.dim, dim);
    EXPECT_EQ(lines[0]["meta"]["dim"], dim);
    for (std::size_t i = 1; i < lines.size(); ++i)
      for (const auto& row : lines[i]["x"]) EXPECT_EQ(static_cast<int>(row.size()), dim);
  }
}

TEST(Featurize, IdenticalBytesForAnyThreadCount) {
  const auto ds = random_dataset(40, 4);
  for (auto scheme : {Scheme::nct_efa, Scheme::concat_rank}) {
    FeaturizeConfig cfg;
    cfg.scheme = scheme;
    cfg.threads = 1;
    const auto one = run(ds, cfg);
    cfg.threads = 3;
    EXPECT_EQ(run(ds, cfg), one);
    cfg.threads = 8;
    EXPECT_EQ(run(ds, cfg), one);
  }
}

TEST(Featurize, StandardizeCentersColumns) {
  const auto ds = random_dataset(12, 5);
  FeaturizeConfig cfg;
  cfg.standardize = true;
  cfg.threads = 2;
  const auto lines = parse_lines(run(ds, cfg));
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(4), sq = Eigen::VectorXd::Zero(4);
  double count = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    for (const auto& row : lines[i]["x"]) {
      for (int c = 0; c < 4; ++c) {
        sum[c] += row[c].get<double>();
        sq[c] += row[c].get<double>() * row[c].get<double>();
      }
      count += 1;
    }
  }
  for (int c = 0; c < 4; ++c) {
    EXPECT_NEAR(sum[c] / count, 0.0, 1e-10);
    EXPECT_NEAR(sq[c] / count, 1.0, 1e-10);
  }
  cfg.scheme = Scheme::ac_rank;
  EXPECT_THROW(run(ds, cfg), ContractError);
}

GraphDataset overflow_dataset() {
  std::vector<Graph> gs{Graph::from_edges(0, 2, std::vector<Edge>{}),
                        Graph::from_edges(1, std::vector<Edge>{{0, 1}}),
                        Graph::from_edges(2, 3, std::vector<Edge>{})};
  return GraphDataset("ovf", gs, {{0, 0}, {1, 1}, {2, 0}});
}

TEST(Featurize, NumericErrorAbortsByDefault) {
  FeaturizeConfig cfg;
  cfg.scheme = Scheme::ac_rank;
  cfg.horizon = {400.0, 0.1};
  EXPECT_THROW(run(overflow_dataset(), cfg), NumericOverflowError);
}

TEST(Featurize, SkipErrorsOmitsAndRecords) {
  FeaturizeConfig cfg;
  cfg.scheme = Scheme::ac_rank;
  cfg.horizon = {400.0, 0.1};
  cfg.skip_errors = true;
  cfg.threads = 2;
  FeaturizeReport report;
  const auto lines = parse_lines(run(overflow_dataset(), cfg, &report));
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[1]["id"], 0);
  EXPECT_EQ(lines[2]["id"], 2);
  ASSERT_EQ(report.skipped.size(), 1u);
  EXPECT_EQ(report.skipped[0].id, 1);
  EXPECT_EQ(report.records, 2u);
  const auto manifest = manifest_json(cfg, report, {});
  EXPECT_EQ(manifest["skipped"][0]["id"], 1);
  EXPECT_EQ(manifest["dim"], 10);
}

TEST(Featurize, ConfigValidation) {
  const auto ds = random_dataset(2, 6);
  FeaturizeConfig cfg;
  cfg.threads = 0;
  EXPECT_THROW(run(ds, cfg), ContractError);
  cfg = {};
  cfg.k = 0;
  cfg.scheme = Scheme::ac_rank;
  EXPECT_THROW(run(ds, cfg), ContractError);
  cfg = {};
  cfg.method = GramianMethod::lyapunov;
  EXPECT_THROW(run(ds, cfg), ContractError);
  cfg = {};
  cfg.scheme = Scheme::ac_rank;
  cfg.metrics = {MetricKind::degree};
  EXPECT_THROW(run(ds, cfg), ContractError);
}

TEST(Featurize, EdgelessEigenvectorFallbackIsCounted) {
  FeaturizeConfig cfg;
  FeaturizeReport report;
  run(overflow_dataset(), cfg, &report);
  EXPECT_EQ(report.diagnostics.eigenvector_zero_fallback, 2);
}

TEST(RunFeaturize, WritesFileAndManifest) {
  const auto dir = std::filesystem::temp_directory_path() / "nctefa_pipeline_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream ds(dir / "ds.jsonl");
    write_canonical(random_dataset(4, 7), ds);
  }
  FeaturizeConfig cfg;
  cfg.dataset = dir / "ds.jsonl";
  cfg.out = dir / "features.jsonl";
  cfg.scheme = Scheme::deg_onehot;
  const auto report = run_featurize(cfg);
  EXPECT_EQ(report.records, 4u);
  std::ifstream manifest(manifest_path(cfg.out));
  const auto m = nlohmann::json::parse(manifest);
  EXPECT_EQ(m["records"], 4);
  EXPECT_EQ(m["config"]["scheme"], "deg-onehot");
  EXPECT_EQ(m["code_version"], std::string(kVersion));
  std::filesystem::remove_all(dir);
}

TEST(Stats, FixtureDirectory) {
  std::ostringstream out;
  const auto dir = std::filesystem::temp_directory_path() / "nctefa_stats_fixture";
  std::filesystem::create_directories(dir);
  std::filesystem::copy_file(NCTEFA_FIXTURES "/three_graphs_edges.json", dir / "three_graphs_edges.json",
                             std::filesystem::copy_options::overwrite_existing);
  std::filesystem::copy_file(NCTEFA_FIXTURES "/three_graphs_target.csv", dir / "three_graphs_target.csv",
                             std::filesystem::copy_options::overwrite_existing);
  const auto s = run_stats(dir, out);
  EXPECT_EQ(s.graph_count, 3u);
  EXPECT_NE(out.str().find("| nctefa_stats_fixture | 3 | 3 | 5 | 4.00 | 4 | 0.400 | 1.000 | 1 | 2 | 2 |"),
            std::string::npos)
      << out.str();
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace nctefa
