#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "boreal/errors.hpp"
#include "boreal/nnet.hpp"
#include "oracles.hpp"

namespace boreal {
namespace {

MlpSpec toy_spec() {
  MlpSpec s;
  s.input_dim = 2;
  s.hidden = {2};
  s.heads = {{"out", 1, 1.0}};
  return s;
}

TEST(Nnet, ZeroNetworkGivesUniformPolicy) {
  MlpSpec s;
  s.input_dim = 5;
  s.hidden = {8, 8};
  s.heads = {{"logits", 25, 0.01}};
  const Mlp net(s);
  ForwardCache cache;
  net.forward(std::vector<double>{1, 2, 3, 4, 5}, cache);
  for (double p : masked_softmax(cache.heads[0])) EXPECT_DOUBLE_EQ(p, 1.0 / 25.0);
}

TEST(Nnet, HandComputedTwoTwoOneNet) {
  Mlp net(toy_spec());
  // W1 row-major [out][in], b1, W2, b2.
  net.parameters() = {0.5, -1.0, 2.0, 0.25, 0.1, -0.2, 1.5, -0.5, 0.3};
  ForwardCache cache;
  net.forward(std::vector<double>{1.0, 2.0}, cache);
  const double h1 = std::tanh(0.5 * 1.0 - 1.0 * 2.0 + 0.1);
  const double h2 = std::tanh(2.0 * 1.0 + 0.25 * 2.0 - 0.2);
  EXPECT_DOUBLE_EQ(cache.heads[0][0], 1.5 * h1 - 0.5 * h2 + 0.3);
}

TEST(Nnet, ForwardIsDeterministicAndChecksLength) {
  Mlp net(toy_spec());
  RngStream rng(1);
  net.initialize(rng);
  ForwardCache a, b;
  net.forward(std::vector<double>{0.3, -0.7}, a);
  net.forward(std::vector<double>{0.3, -0.7}, b);
  EXPECT_EQ(a.heads, b.heads);
  EXPECT_THROW(net.forward(std::vector<double>{1.0}, a), ContractViolation);
}

TEST(Nnet, ConstantLossHasZeroGradient) {
  Mlp net(toy_spec());
  RngStream rng(2);
  net.initialize(rng);
  ForwardCache cache;
  net.forward(std::vector<double>{0.3, -0.7}, cache);
  std::vector<double> g(net.parameter_count(), 0.0);
  net.backward(cache, {{0.0}}, g);
  for (double x : g) EXPECT_EQ(x, 0.0);
}

TEST(Nnet, GradientMatchesFiniteDifferences) {
  RngStream rng(3);
  for (int i = 0; i < 20; ++i) {
    auto c = testing::random_net_case(rng);
    EXPECT_LT(testing::check_gradient(c.net, c.input, c.loss).worst_relative_error, 1e-5);
  }
}

TEST(Nnet, GradientIsLinearInHeadGradients) {
  RngStream rng(4);
  auto c = testing::random_net_case(rng);
  ForwardCache cache;
  c.net.forward(c.input, cache);
  auto g1 = c.loss.c, g2 = c.loss.c, mix = c.loss.c;
  for (std::size_t h = 0; h < g1.size(); ++h)
    for (std::size_t i = 0; i < g1[h].size(); ++i) {
      g2[h][i] = rng.uniform(-1.0, 1.0);
      mix[h][i] = 2.0 * g1[h][i] - 3.0 * g2[h][i];
    }
  const std::size_t n = c.net.parameter_count();
  std::vector<double> a(n, 0.0), b(n, 0.0), m(n, 0.0);
  c.net.backward(cache, g1, a);
  c.net.backward(cache, g2, b);
  c.net.backward(cache, mix, m);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(m[i], 2.0 * a[i] - 3.0 * b[i], 1e-12);
}

TEST(Nnet, AdamWithZeroGradientKeepsParameters) {
  Mlp net(toy_spec());
  RngStream rng(5);
  net.initialize(rng);
  const auto before = net.parameters();
  GradientTape tape = net.make_tape();
  adam_step(net, tape, 1e-2);
  EXPECT_EQ(net.parameters(), before);
  EXPECT_EQ(tape.step, 1);
}

TEST(Nnet, AdamMinimizesQuadraticBowl) {
  MlpSpec s;
  s.input_dim = 1;
  s.heads = {{"x", 3, 1.0}};
  Mlp net(s);
  const std::vector<double> target{1.5, -2.0, 0.25};
  GradientTape tape = net.make_tape();
  for (int step = 0; step < 1000; ++step) {
    tape.zero_gradient();
    // Bias entries are the last three parameters; the weights see input 0.
    for (std::size_t i = 0; i < 3; ++i) tape.gradient[3 + i] = 2.0 * (net.parameters()[3 + i] - target[i]);
    adam_step(net, tape, 0.05);
  }
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(net.parameters()[3 + i], target[i], 1e-6);
}

TEST(Nnet, TwoRunsGiveIdenticalTrajectories) {
  auto run = [] {
    RngStream rng(6);
    auto c = testing::random_net_case(rng);
    GradientTape tape = c.net.make_tape();
    ForwardCache cache;
    for (int i = 0; i < 50; ++i) {
      tape.zero_gradient();
      c.net.forward(c.input, cache);
      c.net.backward(cache, c.loss.gradient(cache), tape.gradient);
      adam_step(c.net, tape, 1e-2);
    }
    return c.net.parameters();
  };
  EXPECT_EQ(run(), run());
}

TEST(Nnet, MaskedSoftmaxZeroesMaskedEntries) {
  const std::vector<double> logits{1.0, 2.0, 3.0, 1000.0};
  const bool mask[] = {true, true, true, false};
  const auto p = masked_softmax(logits, mask);
  EXPECT_EQ(p[3], 0.0);
  EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-15);
  EXPECT_GT(p[2], p[1]);
}

TEST(Nnet, GradientClipRescalesToMaxNorm) {
  GradientTape tape(2);
  tape.gradient = {3.0, 4.0};
  EXPECT_EQ(tape.clip_gradient_norm(0.5), 5.0);
  EXPECT_NEAR(tape.gradient_norm(), 0.5, 1e-15);
}

class CheckpointFile : public ::testing::Test {
 protected:
  std::filesystem::path path =
      std::filesystem::temp_directory_path() / ("boreal_ckpt_" + std::to_string(::getpid()) + ".bin");
  void TearDown() override { std::filesystem::remove(path); }
};

TEST_F(CheckpointFile, RoundTripsExactly) {
  Checkpoint c;
  c.algorithm = "ppo_gated";
  Mlp net(toy_spec());
  RngStream rng(7);
  net.initialize(rng);
  c.networks.emplace_back("policy", net);
  c.seeds["train"] = 42;
  c.metadata["horizon"] = "50";
  save_checkpoint(path.string(), c);
  const Checkpoint back = load_checkpoint(path.string());
  EXPECT_EQ(back.algorithm, c.algorithm);
  EXPECT_EQ(back.network("policy"), net);
  EXPECT_EQ(back.seeds, c.seeds);
  EXPECT_EQ(back.metadata, c.metadata);
}

TEST_F(CheckpointFile, CorruptionIsFormatError) {
  Checkpoint c;
  c.algorithm = "eupg";
  c.networks.emplace_back("policy", Mlp(toy_spec()));
  save_checkpoint(path.string(), c);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-3, std::ios::end);
    f.put('\x7f');
  }
  EXPECT_THROW(load_checkpoint(path.string()), FormatError);
  std::ofstream(path, std::ios::trunc) << "not a checkpoint";
  EXPECT_THROW(load_checkpoint(path.string()), FormatError);
}

}  // namespace
}  // namespace boreal
