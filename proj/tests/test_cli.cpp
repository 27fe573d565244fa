#include "crowdest/cli.hpp"
#include "crowdest/series.hpp"
#include "crowdest/stream.hpp"

#include <gtest/gtest.h>

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using crowdest::cli::run;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("crowdest_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Uniform N=50, 400 answers from 8 without-replacement workers.
  void simulate_uniform(const std::string& out, const std::string& seed = "7") {
    const auto r = cli({"simulate", "--output", path(out), "--seed", seed, "--dist", "uniform", "--n-items", "50",
                        "--hits", "400", "--workers", "8"});
    ASSERT_EQ(r.code, 0) << r.err;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SimulateThenEstimate) {
  simulate_uniform("sim");
  const auto truth = nlohmann::json::parse(slurp(path("sim/truth.json")));
  EXPECT_EQ(truth.at("N"), 50);
  const auto r = cli({"estimate", "--input", path("sim/stream.csv"), "--output", path("est"), "--step", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(slurp(path("est/series.csv")));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "hits,unique,f1_ratio,uniform,chao84,chao92,coverage,cv_squared");
  const auto doc = nlohmann::json::parse(slurp(path("est/series.json")));
  const double chao92 = doc.at("rows").back().at("estimates").at("chao92").get<double>();
  EXPECT_NEAR(chao92, 50.0, 5.0);
  EXPECT_TRUE(doc.at("rows").back().at("completeness").contains("chao92"));
}

TEST_F(CliTest, ReplayStreamsRows) {
  simulate_uniform("sim");
  // Cut the stream to its first 200 records.
  auto text = lines(slurp(path("sim/stream.csv")));
  std::ofstream(path("short.csv")) << [&] {
    std::string s;
    for (std::size_t i = 0; i <= 200; ++i) s += text[i] + "\n";
    return s;
  }();
  const auto r = cli({"replay", "--input", path("short.csv"), "--step", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = lines(r.out);
  ASSERT_EQ(out.size(), 5u);  // header + 4 rows
  EXPECT_EQ(out[1].substr(0, 3), "50,");
  EXPECT_EQ(out[4].substr(0, 4), "200,");
}

TEST_F(CliTest, InfinityIsWrittenAsInf) {
  std::ofstream(path("s.csv")) << "hit_index,worker_id,answer\n0,a,x\n1,a,y\n2,b,z\n";
  const auto r = cli({"estimate", "--input", path("s.csv"), "--output", path("e"), "--step", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(slurp(path("e/series.csv")));
  EXPECT_NE(rows[1].find(",inf,"), std::string::npos) << rows[1];
  const auto doc = nlohmann::json::parse(slurp(path("e/series.json")));
  EXPECT_EQ(doc.at("rows")[0].at("estimates").at("uniform"), "inf");
}

TEST_F(CliTest, DeterministicOutputs) {
  simulate_uniform("a", "11");
  simulate_uniform("b", "11");
  EXPECT_EQ(slurp(path("a/stream.csv")), slurp(path("b/stream.csv")));
  EXPECT_EQ(slurp(path("a/truth.json")), slurp(path("b/truth.json")));
  for (const char* run_dir : {"p1", "p2"}) {
    const auto r = cli({"paygo", "--input", path("a/stream.csv"), "--output", path(run_dir), "--seed", "5",
                        "--permutations", "20"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(slurp(path("p1/paygo.csv")), slurp(path("p2/paygo.csv")));
  EXPECT_EQ(lines(slurp(path("p1/paygo.csv"))).size(), 11u);
}

TEST_F(CliTest, DetectListsOutputs) {
  const auto s = cli({"simulate", "--output", path("sim"), "--seed", "3", "--dist", "zipf", "--n-items", "200",
                      "--hits", "200", "--workers", "20", "--list-walkers", "3", "--list-length", "10"});
  ASSERT_EQ(s.code, 0) << s.err;
  const auto r = cli({"detect-lists", "--input", path("sim/stream.csv"), "--output", path("d"), "--step", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(slurp(path("d/listwalk.json")));
  EXPECT_GE(doc.at("affected_hits").get<int>(), 30);
  const auto series = lines(slurp(path("d/affected_series.csv")));
  EXPECT_EQ(series[0], "hits,affected");
  EXPECT_EQ(series.back().substr(0, 4), "230,");
}

TEST_F(CliTest, StreakerStudyTable) {
  const auto r = cli({"streaker-study", "--output", path("st"), "--seed", "2", "--dist", "zipf", "--n-items", "200",
                      "--hits", "200", "--worker-counts", "1,10", "--repetitions", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(slurp(path("st/streaker_study.csv")));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "num_workers,mean_chao92_error,flagged_runs,runs");
  EXPECT_EQ(rows[1], "1,inf,3,3");
}

TEST_F(CliTest, ErrorsGiveNonzeroExit) {
  EXPECT_EQ(cli({"estimate", "--input", path("missing.csv"), "--output", path("x")}).code, 1);
  std::ofstream(path("bad.csv")) << "hit_index,worker_id,answer\n0,a\n";
  const auto bad = cli({"estimate", "--input", path("bad.csv"), "--output", path("x")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_FALSE(bad.err.empty());
  EXPECT_EQ(cli({"paygo", "--input", path("bad.csv"), "--output", path("x")}).code, 1);
  EXPECT_EQ(cli({"simulate", "--output", path("x")}).code, 1);  // no seed
  EXPECT_EQ(cli({"estimate", "--bogus"}).code, 2);
  EXPECT_EQ(cli({}).code, 2);
  simulate_uniform("sim");
  EXPECT_EQ(cli({"estimate", "--input", path("sim/stream.csv"), "--output", path("x"), "--heuristic", "f1"}).code,
            1);  // heuristic needs a seed
  EXPECT_EQ(cli({"estimate", "--input", path("sim/stream.csv"), "--output", path("x"), "--estimators", "foo"}).code,
            1);
}

TEST_F(CliTest, BinaryRuns) {
  const std::string cmd = std::string(CROWDEST_CLI_PATH) + " simulate --output " + path("bin") +
                          " --seed 7 --dist uniform --n-items 50 --hits 400 --workers 8 > /dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  simulate_uniform("lib");
  EXPECT_EQ(slurp(path("bin/stream.csv")), slurp(path("lib/stream.csv")));
  const std::string bad = std::string(CROWDEST_CLI_PATH) + " estimate --input " + path("nope.csv") + " --output " +
                          path("x") + " > /dev/null 2>&1";
  EXPECT_NE(std::system(bad.c_str()), 0);
}
