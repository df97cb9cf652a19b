#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "boreal/rng.hpp"

namespace boreal {

struct HeadSpec {
  std::string name;
  std::size_t size = 1;
  double init_gain = 0.01;

  friend bool operator==(const HeadSpec&, const HeadSpec&) = default;
};

/// Fully connected tanh trunk with linear output heads.
struct MlpSpec {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden;
  std::vector<HeadSpec> heads;
  std::string activation = "tanh";
  std::string init = "orthogonal";
  double hidden_gain = 1.4142135623730951;

  std::size_t parameter_count() const;
  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

/// Activations kept from a forward pass for the backward pass.
struct ForwardCache {
  std::vector<std::vector<double>> layers;  // [0] = input, then each hidden post-activation
  std::vector<std::vector<double>> heads;
};

/// Gradient accumulator with the Adam moment state.
struct GradientTape {
  std::vector<double> gradient;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::int64_t step = 0;

  explicit GradientTape(std::size_t n = 0) : gradient(n), first_moment(n), second_moment(n) {}
  void zero_gradient();
  double gradient_norm() const;
  /// Rescales the gradient to at most `max_norm`; returns the norm before clipping.
  double clip_gradient_norm(double max_norm);
};

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Mlp {
 public:
  Mlp() = default;
  /// All parameters zero.
  explicit Mlp(MlpSpec spec);

  /// Orthogonal hidden weights scaled by `hidden_gain`, heads by their own gain, zero biases.
  void initialize(RngStream& rng);

  const MlpSpec& spec() const { return spec_; }
  std::size_t parameter_count() const { return params_.size(); }
  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }
  std::size_t head_index(std::string_view name) const;

  /// Fills `cache`; throws ContractViolation on an input of the wrong length.
  void forward(std::span<const double> input, ForwardCache& cache) const;

  /// Accumulates dLoss/dParameters into `gradient` given dLoss/dHead for every
  /// head (empty vectors mean zero).
  void backward(const ForwardCache& cache, const std::vector<std::vector<double>>& head_gradients,
                std::vector<double>& gradient) const;

  GradientTape make_tape() const { return GradientTape(params_.size()); }

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  struct Layer {
    std::size_t in, out, weight_offset, bias_offset;
    friend bool operator==(const Layer&, const Layer&) = default;
  };
  MlpSpec spec_;
  std::vector<Layer> trunk_;
  std::vector<Layer> head_layers_;
  std::vector<double> params_;
};

/// One Adam update of `net` from the tape's gradient; advances the tape's step.
void adam_step(Mlp& net, GradientTape& tape, double lr, const AdamHyper& hyper = {});

/// Numerically stable softmax over the entries with `mask[i]` true; masked
/// entries get probability exactly 0. An empty mask means all valid.
std::vector<double> masked_softmax(std::span<const double> logits, std::span<const bool> mask = {});

/// Versioned binary checkpoint: networks + seed record + free-form metadata.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;
  std::string algorithm;
  std::vector<std::pair<std::string, Mlp>> networks;
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, std::string> metadata;

  const Mlp& network(std::string_view name) const;
};

void save_checkpoint(const std::string& path, const Checkpoint& c);
/// Throws FormatError on bad magic, unknown version, truncation or checksum mismatch.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace boreal
