#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qicert_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(QICERT_CLI_PATH) + " " + args + " > " + (dir_ / "stdout.txt").string() +
                            " 2> " + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string slurp(const std::string& name) const {
    std::ifstream in(dir_ / name);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

TEST_F(CliTest, BoundsPrintsBothBounds) {
  EXPECT_EQ(run("bounds -N 3"), 0);
  const std::string out = slurp("stdout.txt");
  EXPECT_NE(out.find("2.828427"), std::string::npos) << out;
  EXPECT_NE(out.find("4"), std::string::npos);
}

TEST_F(CliTest, OutOfRangePartiesIsAUsageError) {
  EXPECT_EQ(run("bounds -N 11"), 2);
  EXPECT_EQ(run("bounds -N 1"), 2);
  EXPECT_EQ(run("no-such-command"), 2);
}

TEST_F(CliTest, GenerateThenCertifyScrambledStrategy) {
  ASSERT_EQ(run("generate -N 2 --aux-dims 2,3 --seed 4 -o " + path("s.json")), 0);
  EXPECT_EQ(run("certify " + path("s.json") + " -o " + path("r.json")), 0);
  const auto report = nlohmann::json::parse(slurp("r.json"));
  EXPECT_EQ(report["report"]["verdict"], "certified");
  EXPECT_EQ(report["provenance"]["input_digest"].get<std::string>().rfind("fnv1a64:", 0), 0u);
}

TEST_F(CliTest, ExitCodesFollowTheVerdict) {
  ASSERT_EQ(run("generate -N 2 --deviation swap -o " + path("swap.json")), 0);
  EXPECT_EQ(run("certify " + path("swap.json") + " -o " + path("r1.json")), 1);
  ASSERT_EQ(run("generate -N 2 --visibility 0.99 -o " + path("noisy.json")), 0);
  EXPECT_EQ(run("certify " + path("noisy.json") + " -o " + path("r2.json")), 3);
}

TEST_F(CliTest, MalformedInputIsAParseError) {
  ASSERT_EQ(run("generate -N 2 -o " + path("s.json")), 0);
  const std::string text = slurp("s.json");
  std::ofstream(path("broken.json")) << text.substr(0, text.size() / 3);
  EXPECT_EQ(run("certify " + path("broken.json") + " -o " + path("r.json")), 2);
  EXPECT_EQ(run("certify " + path("missing.json") + " -o " + path("r.json")), 2);
}

TEST_F(CliTest, MachineFormatAndOutputDirectory) {
  const std::string env = "QICERT_OUTPUT_DIR=" + path("out") + " ";
  const std::string cmd = env + QICERT_CLI_PATH + " simulate --reference 2 --format machine > " +
                          path("stdout.txt");
  ASSERT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "record.json"));
  const auto record = nlohmann::json::parse(std::ifstream(dir_ / "out" / "record.json"));
  EXPECT_NEAR(record["bell_values"]["t1"].get<double>(), 2.0, 1e-10);
}

TEST_F(CliTest, SeesawWritesAStrategy) {
  EXPECT_EQ(run("seesaw -N 2 --seeds 3 -o " + path("best.json")), 0);
  const auto j = nlohmann::json::parse(std::ifstream(dir_ / "best.json"));
  EXPECT_EQ(j["schema_version"], "qicert.strategy/1");
}

TEST_F(CliTest, NoiseSweep) {
  EXPECT_EQ(run("noise-sweep --reference 2 --visibilities 1,0.9 -o " + path("sweep.json")), 0);
  const auto j = nlohmann::json::parse(std::ifstream(dir_ / "sweep.json"));
  ASSERT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["rows"][0]["verdict"], "certified");
  EXPECT_EQ(j["rows"][1]["verdict"], "inconclusive");
  EXPECT_NEAR(j["rows"][1]["bell_t1"].get<double>(), 1.8, 1e-10);
  EXPECT_EQ(run("noise-sweep --reference 2 --visibilities 1.5"), 2);
}

}  // namespace
