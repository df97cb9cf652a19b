#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "json.hpp"

namespace boreal::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

class Cli : public ::testing::Test {
 protected:
  fs::path dir;
  fs::path config;
  std::ostringstream out, err;

  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("boreal_cli_" + std::to_string(::getpid()) + "_" +
           ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
    config = dir / "run.cfg";
    std::ofstream(config) << "train.algorithm = eupg_fixed\n"
                             "train.timesteps = 6\n"
                             "train.seed = 3\n"
                             "env.horizon = 3\n"
                             "sim.dt_minutes = 180\n"
                             "eupg.hidden = 8\n"
                             "eval.episodes = 1\n"
                             "eval.lambdas = 0,1\n";
  }
  void TearDown() override { fs::remove_all(dir); }

  int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "boreal");
    out.str("");
    err.str("");
    return run(args, out, err);
  }
};

TEST_F(Cli, MissingConfigIsConfigErrorAndCreatesNothing) {
  EXPECT_EQ(run_cli({"train", (dir / "absent.cfg").string(), "-o", (dir / "run").string()}), kExitConfig);
  EXPECT_FALSE(fs::exists(dir / "run"));
}

TEST_F(Cli, UnknownKeyIsConfigError) {
  std::ofstream(config, std::ios::app) << "ppo.learning_rat = 1\n";
  EXPECT_EQ(run_cli({"train", config.string(), "-o", (dir / "run").string()}), kExitConfig);
  EXPECT_NE(err.str().find("ppo.learning_rat"), std::string::npos);
}

TEST_F(Cli, BadArgumentsAreUsageErrors) {
  EXPECT_EQ(run_cli({"frobnicate"}), kExitUsage);
  EXPECT_EQ(run_cli({"train"}), kExitUsage);
}

TEST_F(Cli, TrainingIsByteReproducible) {
  ASSERT_EQ(run_cli({"train", config.string(), "-o", (dir / "a").string()}), kExitOk) << err.str();
  ASSERT_EQ(run_cli({"train", config.string(), "-o", (dir / "b").string()}), kExitOk) << err.str();
  EXPECT_EQ(slurp(dir / "a" / "metrics.csv"), slurp(dir / "b" / "metrics.csv"));
  EXPECT_EQ(slurp(dir / "a" / "episodes.csv"), slurp(dir / "b" / "episodes.csv"));
  EXPECT_EQ(slurp(dir / "a" / "manifest.json"), slurp(dir / "b" / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "a" / "checkpoints" / "agent0_final.ckpt"));
}

TEST_F(Cli, TimestepOverrideIsRecordedAndExistingRunIsRefused) {
  const std::string run_dir = (dir / "run").string();
  ASSERT_EQ(run_cli({"train", config.string(), "-o", run_dir, "--timesteps", "9"}), kExitOk) << err.str();
  const auto manifest = nlohmann::json::parse(slurp(dir / "run" / "manifest.json"));
  EXPECT_EQ(manifest["config"]["train.timesteps"], "9");
  EXPECT_GE(manifest["agents"][0]["total_steps"].get<int>(), 9);
  EXPECT_EQ(run_cli({"train", config.string(), "-o", run_dir}), kExitUsage);
}

TEST_F(Cli, ReplayMatchesAndDetectsTampering) {
  const std::string run_dir = (dir / "run").string();
  ASSERT_EQ(run_cli({"train", config.string(), "-o", run_dir}), kExitOk) << err.str();
  EXPECT_EQ(run_cli({"replay", run_dir, "--episode", "1"}), kExitOk) << err.str();

  const fs::path metrics = dir / "run" / "metrics.csv";
  std::string text = slurp(metrics);
  std::istringstream lines(text);
  std::string header, row, rest;
  std::getline(lines, header);
  std::getline(lines, row);
  std::getline(lines, rest, '\0');
  // Replace the carbon_return cell (7th column) of the first row.
  std::vector<std::string> cells;
  std::stringstream rs(row);
  for (std::string c; std::getline(rs, c, ',');) cells.push_back(c);
  cells[6] = "123.5";
  std::string tampered;
  for (std::size_t i = 0; i < cells.size(); ++i) tampered += (i ? "," : "") + cells[i];
  std::ofstream(metrics, std::ios::trunc) << header << "\n" << tampered << "\n" << rest;
  EXPECT_EQ(run_cli({"replay", run_dir, "--episode", cells[2]}), kExitReplayMismatch);
  EXPECT_NE(err.str().find("metrics.csv row 2"), std::string::npos) << err.str();
}

TEST_F(Cli, EvaluateWritesArtifactsAndRefusesShortGrid) {
  const std::string run_dir = (dir / "run").string();
  ASSERT_EQ(run_cli({"train", config.string(), "-o", run_dir}), kExitOk) << err.str();
  EXPECT_EQ(run_cli({"evaluate", run_dir, "--lambdas", "0.5"}), kExitUsage);
  ASSERT_EQ(run_cli({"evaluate", run_dir}), kExitOk) << err.str();
  const fs::path eval = dir / "run" / "eval";
  // 3 policies (agent + 2 baselines) x 2 lambdas x 1 episode x 3 steps.
  EXPECT_EQ(line_count(slurp(eval / "strategy.csv")), 1u + 3u * 2u * 3u);
  EXPECT_EQ(line_count(slurp(eval / "tradeoff.csv")), 1u + 3u * 2u);
  const auto pareto = nlohmann::json::parse(slurp(eval / "pareto.json"));
  EXPECT_EQ(pareto["points"].size(), 6u);
  const auto mono = nlohmann::json::parse(slurp(eval / "monotonicity.json"));
  EXPECT_EQ(mono["policies"].size(), 3u);
}

TEST_F(Cli, SimulateWritesOneRowPerYear) {
  EXPECT_EQ(run_cli({"simulate", "--years", "2", "--set", "sim.dt_minutes=180"}), kExitOk) << err.str();
  EXPECT_EQ(line_count(out.str()), 3u);
  EXPECT_EQ(run_cli({"simulate", "--years", "3", "--actions", "12,22"}), kExitConfig);
}

TEST_F(Cli, RolloutWritesHeaderResetAndSteps) {
  ASSERT_EQ(run_cli({"rollout", "--steps", "2", "--actions", "22,7", "--set", "sim.dt_minutes=180"}), kExitOk)
      << err.str();
  std::istringstream lines(out.str());
  std::vector<nlohmann::json> recs;
  for (std::string l; std::getline(lines, l);) recs.push_back(nlohmann::json::parse(l));
  ASSERT_EQ(recs.size(), 4u);
  EXPECT_EQ(recs[0]["observation_size"], 43);
  EXPECT_EQ(recs[2]["action"], 22);
  EXPECT_EQ(recs[3]["action"], 7);
  EXPECT_EQ(recs[3]["reward"].size(), 2u);
}

TEST_F(Cli, KeysListsEveryKey) {
  ASSERT_EQ(run_cli({"keys"}), kExitOk);
  EXPECT_NE(out.str().find("train.algorithm = ppo_gated"), std::string::npos);
  EXPECT_NE(out.str().find("param.latitude"), std::string::npos);
}

}  // namespace
}  // namespace boreal::cli
