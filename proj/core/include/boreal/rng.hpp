#pragma once

#include <cstdint>
#include <random>

namespace boreal {

/// Independent substreams derived from one episode seed.
enum class StreamId : std::uint64_t {
  kParameters = 1,
  kWeather = 2,
  kDisturbance = 3,
  kPreference = 4,
  kPolicy = 5,
  kEpisode = 6,
};

/// SplitMix64 finalizer. Used for seed derivation only.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  return mix64(mix64(seed) ^ mix64(salt + 0x632be59bd9b4e019ULL));
}

/// Single-owner random stream.
///
/// The engine is mt19937_64, whose output sequence is fixed by the standard.
/// Conversions to doubles are done here rather than through <random>
/// distributions, which are implementation-defined, so a seed reproduces the
/// same values on every platform. `draws()` counts engine outputs consumed.
class RngStream {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/u53/box-muller";

  explicit RngStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  /// Stream for one purpose, independent of the other purposes of the same seed.
  static RngStream split(std::uint64_t seed, StreamId id) {
    return RngStream(derive_seed(seed, static_cast<std::uint64_t>(id)));
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t draws() const noexcept { return draws_; }

  std::uint64_t next_u64() {
    ++draws_;
    return engine_();
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via Box-Muller; always consumes exactly two draws.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  friend bool operator==(const RngStream& a, const RngStream& b) {
    return a.seed_ == b.seed_ && a.draws_ == b.draws_ && a.engine_ == b.engine_;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
};

}  // namespace boreal
