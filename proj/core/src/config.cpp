#include "boreal/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "boreal/errors.hpp"

namespace boreal {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError(fmt::format("config key '{}': cannot parse '{}' as {}", key, value, expected));
}

template <class T>
T parse_number(std::string_view key, std::string_view v, std::string_view expected) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) bad_value(key, v, expected);
  return out;
}

double parse_value(std::string_view key, std::string_view v, double*) {
  return parse_number<double>(key, v, "a number");
}
int parse_value(std::string_view key, std::string_view v, int*) {
  return parse_number<int>(key, v, "an integer");
}
std::uint64_t parse_value(std::string_view key, std::string_view v, std::uint64_t*) {
  return parse_number<std::uint64_t>(key, v, "a non-negative integer");
}
bool parse_value(std::string_view key, std::string_view v, bool*) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v, "a boolean");
}
template <class T>
std::vector<T> parse_value(std::string_view key, std::string_view v, std::vector<T>*) {
  std::vector<T> out;
  if (trim(v).empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = v.find(',', start);
    const std::string_view item =
        trim(v.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    out.push_back(parse_value(key, item, static_cast<T*>(nullptr)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string render_value(double v) { return fmt::format("{}", v); }
std::string render_value(int v) { return std::to_string(v); }
std::string render_value(std::uint64_t v) { return std::to_string(v); }
std::string render_value(bool v) { return v ? "true" : "false"; }
template <class T>
std::string render_value(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += render_value(v[i]);
  }
  return out;
}

struct Entry {
  ConfigKey doc;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T, class F>
Entry bind(std::string key, std::string description, F ref) {
  Entry e;
  e.doc = {key, std::move(description)};
  e.set = [key, ref](RunConfig& c, std::string_view v) {
    ref(c) = parse_value(key, v, static_cast<T*>(nullptr));
  };
  e.get = [ref](const RunConfig& c) { return render_value(ref(const_cast<RunConfig&>(c))); };
  return e;
}

/// std::size_t fields go through the uint64 parser.
template <class F>
Entry bind_size(std::string key, std::string description, F ref) {
  Entry e;
  e.doc = {key, std::move(description)};
  e.set = [key, ref](RunConfig& c, std::string_view v) {
    ref(c) = static_cast<std::size_t>(parse_value(key, v, static_cast<std::uint64_t*>(nullptr)));
  };
  e.get = [ref](const RunConfig& c) {
    return render_value(static_cast<std::uint64_t>(ref(const_cast<RunConfig&>(c))));
  };
  return e;
}

template <class F>
Entry bind_sizes(std::string key, std::string description, F ref) {
  Entry e;
  e.doc = {key, std::move(description)};
  e.set = [key, ref](RunConfig& c, std::string_view v) {
    const auto raw = parse_value(key, v, static_cast<std::vector<std::uint64_t>*>(nullptr));
    ref(c).assign(raw.begin(), raw.end());
  };
  e.get = [ref](const RunConfig& c) {
    const auto& v = ref(const_cast<RunConfig&>(c));
    return render_value(std::vector<std::uint64_t>(v.begin(), v.end()));
  };
  return e;
}

std::vector<Entry> build_registry() {
  std::vector<Entry> r;
  auto add = [&](Entry e) { r.push_back(std::move(e)); };

  // Run
  {
    Entry e;
    e.doc = {"train.algorithm", "eupg_fixed | eupg_variable | ppo_gated | curriculum_ppo"};
    e.set = [](RunConfig& c, std::string_view v) {
      if (v != "eupg_fixed" && v != "eupg_variable" && v != "ppo_gated" && v != "curriculum_ppo")
        bad_value("train.algorithm", v, "an algorithm name");
      c.algorithm = std::string(v);
    };
    e.get = [](const RunConfig& c) { return c.algorithm; };
    add(e);
  }
  add(bind<std::uint64_t>("train.seed", "training seed (policy init, sampling, preferences)",
                          [](RunConfig& c) -> auto& { return c.seed; }));
  add(bind<std::vector<std::uint64_t>>("train.site_seeds",
                                       "site seeds; site-specific mode trains one agent per seed",
                                       [](RunConfig& c) -> auto& { return c.site_seeds; }));
  add(bind<std::uint64_t>("train.timesteps", "agent steps per agent",
                          [](RunConfig& c) -> auto& { return c.timesteps; }));
  add(bind<std::uint64_t>("train.checkpoint_every", "episodes between checkpoints (0 = final only)",
                          [](RunConfig& c) -> auto& { return c.checkpoint_every; }));
  add(bind_size("train.workers", "evaluation worker threads",
                [](RunConfig& c) -> auto& { return c.workers; }));

  // Environment
  {
    Entry e;
    e.doc = {"env.mode", "site_specific | generalist"};
    e.set = [](RunConfig& c, std::string_view v) {
      if (v == "site_specific")
        c.env.mode = EnvMode::kSiteSpecific;
      else if (v == "generalist")
        c.env.mode = EnvMode::kGeneralist;
      else
        bad_value("env.mode", v, "site_specific or generalist");
    };
    e.get = [](const RunConfig& c) {
      return std::string(c.env.mode == EnvMode::kGeneralist ? "generalist" : "site_specific");
    };
    add(e);
  }
  add(bind<bool>("env.spin_up", "run the stand spin-up before each episode",
                 [](RunConfig& c) -> auto& { return c.env.spin_up; }));
  add(bind<double>("env.initial_pool_jitter", "generalist initial carbon pool jitter (fraction)",
                   [](RunConfig& c) -> auto& { return c.env.initial_pool_jitter; }));
#define BOREAL_ENV_KEY(name, desc) \
  add(bind<decltype(EnvConstants::name)>("env." #name, desc, \
                                         [](RunConfig& c) -> auto& { return c.env.constants.name; }))
  BOREAL_ENV_KEY(horizon, "years per episode");
  BOREAL_ENV_KEY(year_normalizer, "year observation divisor");
  BOREAL_ENV_KEY(max_total_carbon, "carbon stock normalizer (kgC m-2)");
  BOREAL_ENV_KEY(max_carbon_change, "carbon reward clip (kgC m-2 yr-1)");
  BOREAL_ENV_KEY(max_thaw_degree_days, "thaw reward normalizer (degree days)");
  BOREAL_ENV_KEY(biomass_limit, "biomass stock limit (kgC m-2)");
  BOREAL_ENV_KEY(soil_limit, "soil stock limit (kgC m-2)");
  BOREAL_ENV_KEY(carbon_limit_penalty, "penalty per exceeded stock limit");
  BOREAL_ENV_KEY(warming_penalty_factor, "weight of warming degree days in the thaw reward");
  BOREAL_ENV_KEY(safe_min_density, "thinning floor (stems/ha)");
  BOREAL_ENV_KEY(max_density, "planting cap (stems/ha)");
  BOREAL_ENV_KEY(max_density_penalty, "penalty at the planting cap");
  BOREAL_ENV_KEY(ineffective_thinning_penalty, "penalty for thinning without old trees");
  BOREAL_ENV_KEY(ineffective_planting_penalty, "penalty for planting at the cap");
  BOREAL_ENV_KEY(max_hwp_sales, "HWP sale normalizer (kgC m-2)");
  BOREAL_ENV_KEY(hwp_sale_reward_multiplier, "HWP sale reward weight");
  BOREAL_ENV_KEY(stock_bonus_multiplier, "carbon stock bonus weight");
#undef BOREAL_ENV_KEY

  // Simulator
  add(bind<int>("sim.dt_minutes", "physics timestep (minutes, divides a day)",
                [](RunConfig& c) -> auto& { return c.env.sim.dt_minutes; }));
  add(bind<bool>("sim.temperature_noise", "daily temperature noise (generalist only)",
                 [](RunConfig& c) -> auto& { return c.env.sim.temperature_noise; }));
  add(bind<double>("sim.joules_per_degree_day", "boundary heat per thaw degree day (J m-2)",
                   [](RunConfig& c) -> auto& { return c.env.sim.joules_per_degree_day; }));
  add(bind<double>("sim.drought_winter_carryover", "drought index kept into the next year",
                   [](RunConfig& c) -> auto& { return c.env.sim.drought_winter_carryover; }));
  add(bind<bool>("sim.fire", "enable fire", [](RunConfig& c) -> auto& { return c.env.sim.fire; }));
  add(bind<bool>("sim.insects", "enable insect outbreaks",
                 [](RunConfig& c) -> auto& { return c.env.sim.insects; }));
  add(bind<double>("sim.hwp_fraction", "share of thinned carbon stored as products",
                   [](RunConfig& c) -> auto& { return c.env.sim.management.hwp_fraction; }));
  add(bind<bool>("sim.rain_on_snow_refreezes", "rain on snow joins the pack",
                 [](RunConfig& c) -> auto& { return c.env.sim.hydro.rain_on_snow_refreezes; }));
  add(bind<bool>("sim.stochastic_mortality", "random mortality factor",
                 [](RunConfig& c) -> auto& { return c.env.sim.demography.stochastic_mortality; }));
  add(bind<bool>("sim.mortality", "natural mortality",
                 [](RunConfig& c) -> auto& { return c.env.sim.demography.mortality; }));
  add(bind<bool>("sim.recruitment", "natural recruitment",
                 [](RunConfig& c) -> auto& { return c.env.sim.demography.recruitment; }));
#define BOREAL_SUB_KEY(prefix, member, name, desc) \
  add(bind<double>(prefix #name, desc, [](RunConfig& c) -> auto& { return c.env.sim.member.name; }))
  BOREAL_SUB_KEY("weather.", weather, solar_constant, "W m-2");
  BOREAL_SUB_KEY("weather.", weather, wet_day_cloud_factor, "shortwave kept on wet days");
  BOREAL_SUB_KEY("weather.", weather, clear_sky_emissivity, "clear-sky atmospheric emissivity");
  BOREAL_SUB_KEY("weather.", weather, overcast_emissivity, "wet-day atmospheric emissivity");
  BOREAL_SUB_KEY("weather.", weather, wet_day_diurnal_suppression, "diurnal amplitude kept on wet days");
  BOREAL_SUB_KEY("weather.", weather, coldest_day, "day of year of the temperature minimum");
  BOREAL_SUB_KEY("weather.", weather, summer_precip_temp_coupling, "per deg C anomaly");
  BOREAL_SUB_KEY("weather.", weather, winter_precip_temp_coupling, "per deg C anomaly");
  BOREAL_SUB_KEY("weather.", weather, drought_heat_rate, "index per deg C day");
  BOREAL_SUB_KEY("weather.", weather, drought_dry_day_increment, "index per warm dry day");
  BOREAL_SUB_KEY("weather.", weather, drought_precip_relief, "index per mm");
  BOREAL_SUB_KEY("disturbance.", disturbance, hot_day_threshold, "deg C daily mean for ignition");
  BOREAL_SUB_KEY("disturbance.", disturbance, conifer_flammability, "fire multiplier weight");
  BOREAL_SUB_KEY("disturbance.", disturbance, fire_mortality_min, "fraction");
  BOREAL_SUB_KEY("disturbance.", disturbance, fire_mortality_max, "fraction");
  BOREAL_SUB_KEY("disturbance.", disturbance, fire_combusted_fraction, "fraction emitted");
  BOREAL_SUB_KEY("disturbance.", disturbance, insect_winter_sensitivity, "per deg C");
  BOREAL_SUB_KEY("disturbance.", disturbance, insect_winter_reference, "deg C");
  BOREAL_SUB_KEY("disturbance.", disturbance, insect_density_reference, "stems/ha");
  BOREAL_SUB_KEY("disturbance.", disturbance, insect_conifer_bias, "conifer : deciduous mortality");
#undef BOREAL_SUB_KEY

  // EUPG
  add(bind<double>("eupg.fixed_lambda", "carbon weight for eupg_fixed",
                   [](RunConfig& c) -> auto& { return c.eupg.fixed_preference; }));
  add(bind<double>("eupg.learning_rate", "Adam step size",
                   [](RunConfig& c) -> auto& { return c.eupg.learning_rate; }));
  add(bind<double>("eupg.gamma", "discount", [](RunConfig& c) -> auto& { return c.eupg.gamma; }));
  add(bind_sizes("eupg.hidden", "hidden layer widths",
                 [](RunConfig& c) -> auto& { return c.eupg.hidden; }));

  // PPO
  {
    Entry e;
    e.doc = {"ppo.preference_mode", "sampled | fixed"};
    e.set = [](RunConfig& c, std::string_view v) {
      if (v == "sampled")
        c.ppo.preference_mode = PreferenceMode::kSampled;
      else if (v == "fixed")
        c.ppo.preference_mode = PreferenceMode::kFixed;
      else
        bad_value("ppo.preference_mode", v, "sampled or fixed");
    };
    e.get = [](const RunConfig& c) {
      return std::string(c.ppo.preference_mode == PreferenceMode::kSampled ? "sampled" : "fixed");
    };
    add(e);
  }
  add(bind<double>("ppo.fixed_lambda", "carbon weight when ppo.preference_mode = fixed",
                   [](RunConfig& c) -> auto& { return c.ppo.fixed_preference; }));
  add(bind<double>("ppo.learning_rate", "Adam step size",
                   [](RunConfig& c) -> auto& { return c.ppo.learning_rate; }));
  add(bind<double>("ppo.gamma", "discount", [](RunConfig& c) -> auto& { return c.ppo.gamma; }));
  add(bind<double>("ppo.gae_lambda", "GAE lambda",
                   [](RunConfig& c) -> auto& { return c.ppo.gae_lambda; }));
  add(bind<double>("ppo.clip", "surrogate clip range", [](RunConfig& c) -> auto& { return c.ppo.clip; }));
  add(bind_size("ppo.rollout_steps", "steps per update",
                [](RunConfig& c) -> auto& { return c.ppo.rollout_steps; }));
  add(bind_size("ppo.minibatch", "minibatch size",
                [](RunConfig& c) -> auto& { return c.ppo.minibatch; }));
  add(bind_size("ppo.epochs", "epochs per update", [](RunConfig& c) -> auto& { return c.ppo.epochs; }));
  add(bind<double>("ppo.entropy_coef", "entropy bonus",
                   [](RunConfig& c) -> auto& { return c.ppo.entropy_coef; }));
  add(bind<double>("ppo.value_coef", "value loss weight",
                   [](RunConfig& c) -> auto& { return c.ppo.value_coef; }));
  add(bind<double>("ppo.max_grad_norm", "gradient norm clip per network",
                   [](RunConfig& c) -> auto& { return c.ppo.max_grad_norm; }));
  add(bind<double>("ppo.adam_epsilon", "Adam epsilon",
                   [](RunConfig& c) -> auto& { return c.ppo.adam_epsilon; }));
  add(bind_sizes("ppo.hidden", "hidden layer widths",
                 [](RunConfig& c) -> auto& { return c.ppo.hidden; }));
  add(bind<bool>("ppo.gated", "hierarchical planting gate with action masking",
                 [](RunConfig& c) -> auto& { return c.ppo.gated; }));

  // Curriculum
  add(bind<double>("curriculum.threshold", "initial acceptance threshold",
                   [](RunConfig& c) -> auto& { return c.curriculum.initial_threshold; }));
  add(bind<double>("curriculum.band_low", "lower target acceptance rate",
                   [](RunConfig& c) -> auto& { return c.curriculum.band_low; }));
  add(bind<double>("curriculum.band_high", "upper target acceptance rate",
                   [](RunConfig& c) -> auto& { return c.curriculum.band_high; }));
  add(bind_size("curriculum.window", "decisions in the acceptance window",
                [](RunConfig& c) -> auto& { return c.curriculum.window; }));
  add(bind<double>("curriculum.threshold_step", "threshold change per decision",
                   [](RunConfig& c) -> auto& { return c.curriculum.threshold_step; }));
  add(bind_size("curriculum.warmup_episodes", "episodes accepted unconditionally",
                [](RunConfig& c) -> auto& { return c.curriculum.warmup_episodes; }));
  add(bind_sizes("curriculum.hidden", "selector hidden widths",
                 [](RunConfig& c) -> auto& { return c.curriculum.hidden; }));
  add(bind<double>("curriculum.learning_rate", "selector Adam step size",
                   [](RunConfig& c) -> auto& { return c.curriculum.learning_rate; }));
  add(bind_size("curriculum.updates_per_episode", "selector updates per accepted episode",
                [](RunConfig& c) -> auto& { return c.curriculum.updates_per_episode; }));
  add(bind_size("curriculum.buffer_size", "selector regression buffer",
                [](RunConfig& c) -> auto& { return c.curriculum.buffer_size; }));
  {
    Entry e;
    e.doc = {"curriculum.frozen_score", "constant selector score (empty = learned)"};
    e.set = [](RunConfig& c, std::string_view v) {
      if (v.empty())
        c.curriculum.frozen_score.reset();
      else
        c.curriculum.frozen_score = parse_value("curriculum.frozen_score", v, static_cast<double*>(nullptr));
    };
    e.get = [](const RunConfig& c) {
      return c.curriculum.frozen_score ? render_value(*c.curriculum.frozen_score) : std::string();
    };
    add(e);
  }

  // Evaluation
  add(bind<std::vector<double>>("eval.lambdas", "carbon weights, ascending",
                                [](RunConfig& c) -> auto& { return c.eval_lambdas; }));
  add(bind_size("eval.episodes", "episodes per lambda",
                [](RunConfig& c) -> auto& { return c.eval_episodes; }));
  add(bind<std::uint64_t>("eval.first_episode", "first evaluation episode index",
                          [](RunConfig& c) -> auto& { return c.eval_first_episode; }));

  // Site parameter pins
  for (const ParamSpec& spec : site_parameter_manifest()) {
    const std::string key = "param." + std::string(spec.key);
    const std::string name(spec.key);
    Entry e;
    e.doc = {key, fmt::format("pin {} [{}, {}] {}", name, spec.min, spec.max, spec.unit)};
    e.set = [key, name](RunConfig& c, std::string_view v) {
      if (v.empty()) {
        c.env.pins.erase(name);
        return;
      }
      const double x = parse_value(key, v, static_cast<double*>(nullptr));
      ParameterPins trial{{name, x}};
      SiteParameters probe = default_site_parameters();
      apply_parameter_pins(probe, trial);
      c.env.pins[name] = x;
    };
    e.get = [name](const RunConfig& c) {
      const auto it = c.env.pins.find(name);
      return it == c.env.pins.end() ? std::string() : render_value(it->second);
    };
    add(e);
  }
  return r;
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r = build_registry();
  return r;
}

const Entry& find_entry(std::string_view key) {
  static const std::map<std::string, std::size_t, std::less<>> index = [] {
    std::map<std::string, std::size_t, std::less<>> m;
    for (std::size_t i = 0; i < registry().size(); ++i) m.emplace(registry()[i].doc.key, i);
    return m;
  }();
  const auto it = index.find(key);
  if (it == index.end()) throw ConfigError(fmt::format("unknown config key '{}'", key));
  return registry()[it->second];
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const auto& e : registry()) k.push_back(e.doc);
    return k;
  }();
  return keys;
}

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  find_entry(key).set(cfg, trim(value));
}

std::string get_config_value(const RunConfig& cfg, std::string_view key) {
  return find_entry(key).get(cfg);
}

void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(fmt::format("config line {}: expected 'key = value'", line_no));
    const std::string_view key = trim(line.substr(0, eq));
    if (!seen.insert(std::string(key)).second)
      throw ConfigError(fmt::format("config line {}: duplicate key '{}'", line_no, key));
    set_config_value(cfg, key, line.substr(eq + 1));
  }
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig cfg;
  apply_config_text(cfg, text);
  validate_run_config(cfg);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string render_run_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& e : registry()) {
    const std::string v = e.get(cfg);
    if (v.empty() && e.doc.key.rfind("param.", 0) == 0) continue;
    out += e.doc.key;
    out += v.empty() ? " =" : " = ";
    out += v;
    out += '\n';
  }
  return out;
}

void validate_run_config(const RunConfig& cfg) {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  check(cfg.algorithm == "eupg_fixed" || cfg.algorithm == "eupg_variable" ||
            cfg.algorithm == "ppo_gated" || cfg.algorithm == "curriculum_ppo",
        "train.algorithm must be one of eupg_fixed, eupg_variable, ppo_gated, curriculum_ppo");
  check(cfg.env.constants.horizon > 0, "env.horizon must be positive");
  check(cfg.env.sim.dt_minutes > 0 && 1440 % cfg.env.sim.dt_minutes == 0,
        "sim.dt_minutes must divide 1440");
  check(!cfg.site_seeds.empty(), "train.site_seeds must list at least one seed");
  check(cfg.timesteps > 0, "train.timesteps must be positive");
  check(cfg.workers > 0, "train.workers must be positive");
  for (double l : cfg.eval_lambdas) check(l >= 0.0 && l <= 1.0, "eval.lambdas must lie in [0, 1]");
  for (std::size_t i = 1; i < cfg.eval_lambdas.size(); ++i)
    check(cfg.eval_lambdas[i] > cfg.eval_lambdas[i - 1], "eval.lambdas must ascend");
  check(cfg.eval_episodes > 0, "eval.episodes must be positive");
  check(cfg.eupg.fixed_preference >= 0.0 && cfg.eupg.fixed_preference <= 1.0,
        "eupg.fixed_lambda must lie in [0, 1]");
  check(cfg.ppo.fixed_preference >= 0.0 && cfg.ppo.fixed_preference <= 1.0,
        "ppo.fixed_lambda must lie in [0, 1]");
  check(cfg.ppo.rollout_steps > 0 && cfg.ppo.minibatch > 0 && cfg.ppo.epochs > 0,
        "ppo.rollout_steps, ppo.minibatch and ppo.epochs must be positive");
  check(cfg.curriculum.band_low <= cfg.curriculum.band_high,
        "curriculum.band_low must not exceed curriculum.band_high");
  check(cfg.curriculum.window > 0, "curriculum.window must be positive");
  SiteParameters probe = default_site_parameters();
  apply_parameter_pins(probe, cfg.env.pins);
}

}  // namespace boreal
