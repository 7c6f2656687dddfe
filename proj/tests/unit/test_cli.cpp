#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct CliResult {
  int status = -1;
  std::string output;
};

CliResult run(const std::string& args) {
  const std::string cmd = std::string(ARDQ_CLI) + " " + args + " 2>&1";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 512> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string source(const std::string& rel) { return std::string(ARDQ_SOURCE_DIR) + "/" + rel; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("ardq_cli_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Cli, SelfcheckSuitePasses) {
  const CliResult r = run("selfcheck --suite ddqn");
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("PASS"), std::string::npos) << r.output;
}

TEST(Cli, UnknownSubcommandFails) { EXPECT_NE(run("fly").status, 0); }

TEST(Cli, GenMapIsDeterministic) {
  const auto dir = scratch("genmap");
  std::filesystem::create_directories(dir);
  ASSERT_EQ(run("gen-map " + source("configs/mapgen32.json") + " --out " + (dir / "a.map").string()).status, 0);
  ASSERT_EQ(run("gen-map " + source("configs/mapgen32.json") + " --out " + (dir / "b.map").string()).status, 0);
  const std::string a = slurp(dir / "a.map");
  EXPECT_EQ(a, slurp(dir / "b.map"));
  EXPECT_EQ(a.rfind("GRID 32", 0), 0u);
}

TEST(Cli, TrainEvalRenderAndMismatch) {
  const auto dir = scratch("pipeline");
  const std::string cfg = source("configs/smoke.json");
  const std::string common = " --steps 100 --episodes 3";
  CliResult r = run("train " + cfg + " --out " + dir.string() + common);
  ASSERT_EQ(r.status, 0) << r.output;
  ASSERT_TRUE(std::filesystem::exists(dir / "checkpoint.ardq"));
  EXPECT_EQ(slurp(dir / "train_log.csv").rfind("step,episode,loss,epsilon_or_temp,eval_landing_ratio,eval_primary_ratio\n", 0), 0u);

  const std::string ckpt = (dir / "checkpoint.ardq").string();
  r = run("eval " + cfg + " " + ckpt + " --out " + dir.string() + common);
  ASSERT_EQ(r.status, 0) << r.output;
  const std::string csv = slurp(dir / "eval_report.csv");
  EXPECT_EQ(csv.rfind("episode,seed,mission,steps_used,landed,coverage_ratio,collection_ratio\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_TRUE(std::filesystem::exists(dir / "eval_report.json"));

  const std::string img = (dir / "ep.ppm").string();
  r = run("render " + cfg + " " + ckpt + " " + img + " --scale 4" + common);
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_EQ(slurp(img).rfind("P6\n24 24\n255\n", 0), 0u);

  r = run("eval " + cfg + " " + ckpt + " --out " + dir.string() + " --core gru" + common);
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("core"), std::string::npos) << r.output;
}

TEST(Cli, BadConfigKeyIsReported) {
  const auto dir = scratch("badcfg");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "bad.json") << R"({"trainer": {"gama": 0.9}})";
  const CliResult r = run("train " + (dir / "bad.json").string() + " --out " + dir.string());
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("trainer.gama"), std::string::npos) << r.output;
}
