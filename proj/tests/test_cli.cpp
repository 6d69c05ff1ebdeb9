// Drives the nctefa executable end to end.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nctefa_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) {
    const std::string cmd = std::string(NCTEFA_CLI) + " " + args + " >" + (dir_ / "stdout").string() +
                            " 2>" + (dir_ / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::string path(const std::string& name) { return (dir_ / name).string(); }

  std::string ingest_fixture() {
    const std::string out = path("fixture.jsonl");
    EXPECT_EQ(run("ingest --edges " NCTEFA_FIXTURES "/three_graphs_edges.json --labels " NCTEFA_FIXTURES
                  "/three_graphs_target.csv --name fixture --out " +
                  out),
              0);
    return out;
  }

  fs::path dir_;
};

TEST_F(Cli, IngestWritesCanonicalFile) {
  const auto file = ingest_fixture();
  EXPECT_EQ(slurp(file),
            "{\"meta\":{\"format_version\":1,\"name\":\"fixture\"}}\n"
            "{\"id\":0,\"n\":3,\"edges\":[[0,1],[1,2]],\"label\":0}\n"
            "{\"id\":1,\"n\":4,\"edges\":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]],\"label\":1}\n"
            "{\"id\":2,\"n\":5,\"edges\":[[0,1],[0,2],[0,3],[0,4]],\"label\":1}\n");
  const auto err = slurp(dir_ / "stderr");
  EXPECT_NE(err.find("self_loops_stripped=1"), std::string::npos);
  EXPECT_NE(err.find("duplicate_edges_stripped=1"), std::string::npos);
}

TEST_F(Cli, StatsPrintsTable) {
  const auto file = ingest_fixture();
  ASSERT_EQ(run("stats --dataset " + file), 0);
  EXPECT_NE(slurp(dir_ / "stdout").find("| fixture | 3 | 3 | 5 | 4.00 | 4 | 0.400 | 1.000 | 1 | 2 | 2 |"),
            std::string::npos);
}

TEST_F(Cli, FeaturizeDeterministicAcrossThreads) {
  const auto file = ingest_fixture();
  ASSERT_EQ(run("featurize --dataset " + file + " --scheme concat-rank --threads 1 --out " + path("a.jsonl")), 0);
  ASSERT_EQ(run("featurize --dataset " + file + " --scheme concat-rank --threads 8 --out " + path("b.jsonl")), 0);
  EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
  const auto manifest = nlohmann::json::parse(slurp(path("a.jsonl.manifest.json")));
  EXPECT_EQ(manifest["dim"], 50);
  EXPECT_EQ(manifest["records"], 3);
  EXPECT_EQ(manifest["diagnostics"]["self_loops_stripped"], 0);
}

TEST_F(Cli, FeaturizeOptions) {
  const auto file = ingest_fixture();
  ASSERT_EQ(run("featurize --dataset " + file +
                " --scheme nct-efa --metrics ac,deg --method trapezoid --horizon 0.5 --step 0.01 --out " +
                path("f.jsonl")),
            0);
  const auto text = slurp(path("f.jsonl"));
  const auto meta = nlohmann::json::parse(text.substr(0, text.find('\n')));
  EXPECT_EQ(meta["meta"]["dim"], 2);
  EXPECT_EQ(meta["meta"]["horizon"], 0.5);
  EXPECT_EQ(meta["meta"]["metrics"], nlohmann::json::parse(R"(["ac","deg"])"));
}

TEST_F(Cli, ExitCodes) {
  const auto file = ingest_fixture();
  EXPECT_EQ(run("featurize --dataset " + file + " --scheme nonsense --out " + path("x")), 2);
  EXPECT_EQ(run("featurize --dataset " + file + " --scheme nct-efa --threads 0 --out " + path("x")), 2);
  EXPECT_EQ(run("featurize --scheme nct-efa --out " + path("x")), 2);
  EXPECT_EQ(run("stats --dataset " + path("missing.jsonl")), 3);
  {
    std::ofstream bad(path("bad_edges.json"));
    bad << R"({"0": [[0,1]], "1": [[0,1]]})";
  }
  EXPECT_EQ(run("ingest --edges " + path("bad_edges.json") + " --labels " NCTEFA_FIXTURES
                "/three_graphs_target.csv --name x --out " + path("o")),
            0);
  {
    std::ofstream labels(path("labels.csv"));
    labels << "id,target\n0,1\n";
  }
  EXPECT_EQ(run("ingest --edges " + path("bad_edges.json") + " --labels " + path("labels.csv") +
                " --name x --out " + path("o")),
            3);
  EXPECT_EQ(run("featurize --dataset " + file + " --scheme ac-rank --horizon 400 --step 0.1 --out " +
                path("x")),
            4);
  EXPECT_EQ(run("featurize --dataset " + file +
                " --scheme ac-rank --horizon 400 --step 0.1 --skip-errors --out " + path("x")),
            0);
  const auto manifest = nlohmann::json::parse(slurp(path("x.manifest.json")));
  EXPECT_EQ(manifest["skipped"].size(), 3u);
}

}  // namespace
