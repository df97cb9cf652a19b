#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "boreal/params.hpp"
#include "boreal/sim.hpp"

namespace boreal {

inline constexpr int kActionCount = 25;
inline constexpr int kNoOpAction = 12;
inline constexpr std::size_t kBaseObservationSize = 43;
inline constexpr std::size_t kGeneralistObservationSize = kBaseObservationSize + kSiteParameterCount;
inline constexpr std::array<double, 5> kDensityChanges{-100.0, -50.0, 0.0, 50.0, 100.0};
inline constexpr std::array<double, 5> kConiferTargets{0.0, 0.25, 0.5, 0.75, 1.0};
/// Preference grid {0.0, 0.1, ..., 1.0}.
inline constexpr std::size_t kPreferenceGridSize = 11;

enum class EnvMode { kSiteSpecific, kGeneralist };
enum class PreferenceMode { kFixed, kSampled };

ActionPair decode_action(int index);
int encode_action(const ActionPair& a);
double preference_grid_value(std::size_t slot);
std::vector<double> preference_grid();

/// Reward shaping constants and normalizers.
struct EnvConstants {
  int horizon = 50;
  double year_normalizer = 50.0;
  double max_total_carbon = 50.0;
  double max_carbon_change = 2.0;
  double max_thaw_degree_days = 40.0;
  double biomass_limit = 15.0;
  double soil_limit = 20.0;
  double carbon_limit_penalty = 0.5;
  double warming_penalty_factor = 5.0;
  double safe_min_density = 150.0;
  double max_density = 2000.0;
  double max_density_penalty = 1.0;
  double ineffective_thinning_penalty = 0.5;
  double ineffective_planting_penalty = 1.0;
  double max_hwp_sales = 1.0;
  double hwp_sale_reward_multiplier = 0.0;
  double stock_bonus_multiplier = 0.0;
};

struct RewardVector {
  double r_carbon = 0.0;
  double r_thaw = 0.0;

  double scalarize(double w_carbon) const { return w_carbon * r_carbon + (1.0 - w_carbon) * r_thaw; }
  friend bool operator==(const RewardVector&, const RewardVector&) = default;
};

/// Components of the carbon reward, exposed for inspection.
struct RewardBreakdown {
  double carbon_change = 0.0;  // c_n
  double stock_bonus = 0.0;
  double hwp_bonus = 0.0;
  double biomass_penalty = 0.0;
  double soil_penalty = 0.0;
  double density_penalty = 0.0;
  double ineffective_penalty = 0.0;
  double thaw_signal = 0.0;    // f_n - k * f_p before normalization
};

struct PenaltyState {
  double biomass = 0.0;
  double soil = 0.0;
  double density = 0.0;
};
PenaltyState stock_penalties(const StandState& s, const EnvConstants& c);

RewardVector compute_reward(const AnnualMetrics& m, const StandState& s,
                            const ManagementOutcome& outcome, const EnvConstants& c = {},
                            RewardBreakdown* breakdown = nullptr);

/// Rolling history shown to the agent; everything starts at zero.
struct ObservationHistory {
  std::array<double, 2> fire_fraction{};     // [last year, the year before]
  std::array<double, 2> insect_fraction{};
  std::array<double, 2> drought_index{};     // annual peak
  double biomass_change = 0.0;
  double soil_change = 0.0;
  double total_change = 0.0;
  double natural_mortality = 0.0;  // kgC m-2
  double litterfall = 0.0;
  double thinning_loss = 0.0;      // carbon removed by thinning
  double hwp_stored = 0.0;
  int density_slot = 0;
  int mix_slot = 0;
  double density_change = 0.0;     // requested stems/ha
  double mix_change = 0.0;         // conifer fraction after - before management

  void record(const AnnualMetrics& m, const ActionPair& action);
};

std::vector<double> build_observation(const StandState& s, const SiteParameters& p,
                                      const ObservationHistory& h, double w_carbon, EnvMode mode,
                                      const EnvConstants& c = {});

/// Seeds for the four independent streams of one episode.
struct EpisodeSeeds {
  std::uint64_t site = 0;
  std::uint64_t weather = 0;
  std::uint64_t disturbance = 0;
  std::uint64_t preference = 0;

  friend bool operator==(const EpisodeSeeds&, const EpisodeSeeds&) = default;
};

/// Site-specific episodes share site, weather and disturbance seeds; generalist
/// episodes draw fresh ones per index. Pre-drawn, so skipping an index never
/// shifts another episode's streams.
EpisodeSeeds episode_seeds(EnvMode mode, std::uint64_t base_seed, std::uint64_t site_seed,
                           std::uint64_t episode_index);

struct EpisodeConfig {
  EnvMode mode = EnvMode::kSiteSpecific;
  PreferenceMode preference_mode = PreferenceMode::kFixed;
  double preference = 0.5;
  EpisodeSeeds seeds;
  EnvConstants constants;
  SimConfig sim;
  ParameterPins pins;
  bool spin_up = false;
  double initial_pool_jitter = 0.25;  // generalist only
};

struct ActionMask {
  bool plant_allowed = true;  // indices 15..24
  bool thin_allowed = true;   // indices 0..9

  bool allows(int action) const;
  std::array<bool, kActionCount> as_array() const;
};

struct StepResult {
  std::vector<double> observation;
  RewardVector reward;
  bool terminated = false;
  bool truncated = false;
  AnnualMetrics info;
};

/// The two-objective environment.
class ForestEnv {
 public:
  std::vector<double> reset(const EpisodeConfig& cfg);
  StepResult step(int action);

  std::size_t observation_size() const;
  bool done() const { return done_; }
  int year() const;
  double preference() const { return preference_; }
  ActionMask action_mask() const;
  const SiteParameters& site() const;
  const StandState& stand() const;
  const EpisodeConfig& config() const { return cfg_; }
  std::vector<double> observation() const;

 private:
  EpisodeConfig cfg_;
  std::optional<ForestSimulator> sim_;
  ObservationHistory history_;
  double preference_ = 0.5;
  bool done_ = true;
};

/// Site parameters and initial stand for an episode (what reset would build).
std::pair<SiteParameters, StandState> episode_site(const EpisodeConfig& cfg);

}  // namespace boreal
