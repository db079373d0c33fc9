#include "secmacc/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace secmacc;
using namespace secmacc::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("secmacc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  RunConfig config(const std::string& command, std::vector<std::pair<std::string, std::string>> settings,
                   const std::string& sub = "") {
    RunConfig cfg;
    cfg.command = command;
    cfg.out = (dir_ / sub).string();
    for (const auto& [k, v] : settings) apply_setting(cfg, k, v);
    return cfg;
  }

  static Result exec(const RunConfig& cfg) {
    std::ostringstream out, err;
    const int code = run(cfg, out, err);
    return {code, out.str(), err.str()};
  }

  std::string slurp(const std::string& name, const std::string& sub = "") const {
    std::ifstream in(dir_ / sub / name, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SimulateGroupedExample) {
  const auto r = exec(config("simulate", {{"k", "6"}, {"l", "2"}, {"n", "6"}, {"i", "2"}, {"f", "18"}, {"seed", "7"}, {"demand", "random"}}));
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("rate=2/3"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("formula=2/3"), std::string::npos);
  EXPECT_NE(r.out.find("decode OK"), std::string::npos);
  EXPECT_NE(r.out.find("M=20/9"), std::string::npos);
  EXPECT_EQ(lines(slurp("delivery_trace.csv")).size(), 3u);
  EXPECT_EQ(lines(slurp("placement_manifest.csv")).front(), "cache_id,item_kind,item_id,bit_length,offset");
}

TEST_F(CliTest, SimulateExplicitDemand) {
  const auto r = exec(config("simulate", {{"k", "3"}, {"l", "2"}, {"n", "3"}, {"i", "1"}, {"f", "6"}, {"demand", "1,2,3"}}));
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("transmissions=1 "), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("decode OK"), std::string::npos);
}

TEST_F(CliTest, SimulateOtherPoints) {
  EXPECT_EQ(exec(config("simulate", {{"k", "4"}, {"l", "2"}, {"scheme", "full-key"}})).code, kExitOk);
  const auto r = exec(config("simulate", {{"k", "5"}, {"l", "3"}, {"scheme", "coded"}, {"demand", "all-distinct"}}));
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("transmissions=0 "), std::string::npos);
}

TEST_F(CliTest, SimulateRejectsInvalidParameters) {
  auto r = exec(config("simulate", {{"i", "3"}, {"k", "4"}, {"l", "2"}}));
  EXPECT_NE(r.code, kExitOk);
  EXPECT_NE(r.err.find("iL > K"), std::string::npos) << r.err;
  r = exec(config("simulate", {{"k", "4"}, {"l", "2"}}));
  EXPECT_EQ(r.code, kExitUsage);
  r = exec(config("simulate", {{"k", "3"}, {"l", "2"}, {"i", "1"}, {"demand", "1,2"}}));
  EXPECT_EQ(r.code, kExitUsage);
}

TEST_F(CliTest, SweepExhaustiveDemands) {
  const auto r = exec(config("sweep", {{"k", "3"}, {"n", "3"}, {"demand", "exhaustive"}}));
  EXPECT_EQ(r.code, kExitOk) << r.err;
  const auto rows = lines(slurp("sweep.csv"));
  ASSERT_GT(rows.size(), 1u);
  EXPECT_EQ(rows[0], "K,L,N,scheme,i,F,demands,passed,failed,rate_measured,rate_formula,memory_ok,audit_ok,verdict");
  std::size_t k3 = 0;
  for (std::size_t n = 1; n < rows.size(); ++n)
    if (rows[n].rfind("3,", 0) == 0) {
      ++k3;
      EXPECT_NE(rows[n].find(",27,27,0,"), std::string::npos) << rows[n];
      EXPECT_EQ(rows[n].substr(rows[n].size() - 4), "pass");
    }
  EXPECT_GT(k3, 0u);
}

TEST_F(CliTest, SweepEmptyGrid) {
  const auto r = exec(config("sweep", {{"k", "1"}}));
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(lines(slurp("sweep.csv")).size(), 1u);
}

TEST_F(CliTest, SweepIsDeterministicAcrossWorkers) {
  auto a = config("sweep", {{"k", "5"}, {"samples", "5"}, {"workers", "1"}}, "a");
  auto b = config("sweep", {{"k", "5"}, {"samples", "5"}, {"workers", "3"}}, "b");
  EXPECT_EQ(exec(a).code, kExitOk);
  EXPECT_EQ(exec(b).code, kExitOk);
  EXPECT_EQ(slurp("sweep.csv", "a"), slurp("sweep.csv", "b"));
}

TEST_F(CliTest, SweepRefusesHugeExhaustiveGrid) {
  EXPECT_EQ(exec(config("sweep", {{"k", "8"}, {"demand", "exhaustive"}})).code, kExitTooLarge);
}

TEST_F(CliTest, SecurityTinyInstance) {
  const auto r = exec(config("security", {{"k", "3"}, {"l", "2"}, {"i", "1"}, {"n", "3"}, {"f", "6"}, {"demand", "1,2,3"}}));
  EXPECT_EQ(r.code, kExitOk) << r.err;
  const auto rows = lines(slurp("security_report.csv"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1], "secure:1-2-3,18,2,0,1,pass");
  EXPECT_EQ(rows[2], "unkeyed:1-2-3,18,0,2,1,pass");
}

TEST_F(CliTest, SecurityErrors) {
  auto r = exec(config("security", {{"k", "3"}, {"l", "2"}, {"i", "1"}, {"f", "7"}}));
  EXPECT_EQ(r.code, kExitUsage);
  r = exec(config("security", {{"k", "3"}, {"l", "2"}, {"i", "1"}, {"f", "42"}}));
  EXPECT_EQ(r.code, kExitTooLarge);
  EXPECT_NE(r.err.find("--f 6"), std::string::npos) << r.err;
}

TEST_F(CliTest, TradeoffCurve) {
  const auto r = exec(config("tradeoff", {{"k", "24"}, {"l", "3"}, {"n", "96"}}));
  EXPECT_EQ(r.code, kExitOk);
  const auto csv = slurp("curve.csv");
  EXPECT_NE(csv.find("\n24,3,96,secure,81,8,147,8,1,"), std::string::npos);
  EXPECT_NE(csv.find("\n24,3,96,secure,32,1,0,1,1,"), std::string::npos);
  EXPECT_NE(r.out.find("M=81/8 (10.125000) R=147/8 (18.375000)"), std::string::npos) << r.out;
}

TEST_F(CliTest, TradeoffGap) {
  auto r = exec(config("tradeoff", {{"k", "4"}, {"l", "2"}, {"n", "8"}, {"gap", "true"}}));
  EXPECT_EQ(r.code, kExitOk) << r.err;
  const auto rows = lines(slurp("gap.csv"));
  EXPECT_EQ(rows.size(), 51u);
  for (std::size_t n = 1; n < rows.size(); ++n) EXPECT_NE(rows[n].find(",3,pass,"), std::string::npos) << rows[n];
  r = exec(config("tradeoff", {{"k", "4"}, {"l", "1"}, {"n", "8"}, {"gap", "true"}}));
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("L >= K/2"), std::string::npos);
}

TEST_F(CliTest, OutputsAreByteIdentical) {
  for (const char* sub : {"x", "y"}) {
    EXPECT_EQ(exec(config("simulate", {{"k", "7"}, {"l", "2"}, {"i", "2"}, {"seed", "42"}}, sub)).code, kExitOk);
    EXPECT_EQ(exec(config("tradeoff", {{"k", "8"}, {"l", "5"}, {"n", "24"}, {"gap", "1"}}, sub)).code, kExitOk);
  }
  for (const char* f : {"delivery_trace.csv", "placement_manifest.csv", "curve.csv", "gap.csv"})
    EXPECT_EQ(slurp(f, "x"), slurp(f, "y")) << f;
}

TEST(CliConfig, FileSettingsAndPrecedence) {
  RunConfig cfg;
  std::istringstream in("# comment\nk = 6\nl=2\n\ni=2   # trailing\nf=auto\nseed=99\n");
  apply_config(cfg, in);
  EXPECT_EQ(cfg.K, 6u);
  EXPECT_EQ(cfg.i, 2u);
  EXPECT_FALSE(cfg.F.has_value());
  EXPECT_EQ(cfg.seed, 99u);
  apply_setting(cfg, "seed", "3");  // a flag applied afterwards wins
  EXPECT_EQ(cfg.seed, 3u);
}

TEST(CliConfig, RejectsUnknownAndMalformed) {
  RunConfig cfg;
  std::istringstream unknown("k=3\ncolour=blue\n");
  try {
    apply_config(cfg, unknown, "cfg.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("cfg.txt:2"), std::string::npos);
  }
  std::istringstream noeq("k\n");
  EXPECT_THROW(apply_config(cfg, noeq), Error);
  EXPECT_THROW(apply_setting(cfg, "k", "-1"), Error);
  EXPECT_THROW(apply_setting(cfg, "demand", "1,x"), Error);
  EXPECT_THROW(apply_setting(cfg, "scheme", "fast"), Error);
  EXPECT_THROW(apply_config_file(cfg, "/nonexistent/secmacc.cfg"), Error);
}

TEST(CliConfig, UnknownCommand) {
  RunConfig cfg;
  cfg.command = "plot";
  std::ostringstream out, err;
  EXPECT_EQ(run(cfg, out, err), kExitUsage);
}
