#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "boreal/config.hpp"
#include "boreal/errors.hpp"
#include "boreal/eval.hpp"
#include "boreal/rollout.hpp"
#include "boreal/sim.hpp"
#include "json.hpp"

namespace boreal::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kManifestFormat = 1;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string g17(double v) { return fmt::format("{:.17g}", v); }

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open '{}'", p.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", p.string()));
  out << text;
}

void apply_sets(RunConfig& cfg, const std::vector<std::string>& sets) {
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError(fmt::format("--set expects key=value, got '{}'", s));
    set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
}

std::vector<int> parse_actions(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) continue;
    item = item.substr(b, item.find_last_not_of(" \t\r\n") - b + 1);
    int a = 0;
    try {
      std::size_t used = 0;
      a = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("action script: '{}' is not an action index", item));
    }
    if (a < 0 || a >= kActionCount)
      throw ConfigError(fmt::format("action script: index {} outside [0, {}]", a, kActionCount - 1));
    out.push_back(a);
  }
  if (out.empty()) throw ConfigError("action script is empty");
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// ---- Run records ----

const char* kMetricsHeader =
    "agent,site_seed,episode,total_steps,lambda,scalarized_return,carbon_return,thaw_return,"
    "final_density,final_conifer,acceptance_rate,threshold,selection_score,site_digest";
const char* kEpisodesHeader = "agent,episode,step,action,r_carbon,r_thaw,density,conifer_fraction";

std::string metrics_row(std::size_t agent, std::uint64_t site_seed, const EpisodeLog& log,
                        std::uint64_t digest) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", agent, site_seed, log.episode,
                     log.total_steps, g17(log.preference), g17(log.scalarized_return),
                     g17(log.carbon_return), g17(log.thaw_return), g17(log.final_density),
                     g17(log.final_conifer), g17(log.acceptance_rate), g17(log.threshold),
                     g17(log.selection_score), hex64(digest));
}

std::string episode_rows(std::size_t agent, std::uint64_t episode, const std::vector<StepRecord>& steps) {
  std::string out;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const StepRecord& s = steps[t];
    out += fmt::format("{},{},{},{},{},{},{},{}\n", agent, episode, t, s.action, g17(s.reward.r_carbon),
                       g17(s.reward.r_thaw), g17(s.density), g17(s.conifer_fraction));
  }
  return out;
}

json config_json(const RunConfig& cfg) {
  json j = json::object();
  for (const ConfigKey& k : config_keys()) {
    const std::string v = get_config_value(cfg, k.key);
    if (v.empty() && k.key.rfind("param.", 0) == 0) continue;
    j[k.key] = v;
  }
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  for (const auto& [key, value] : j.items()) set_config_value(cfg, key, value.get<std::string>());
  validate_run_config(cfg);
  return cfg;
}

json load_manifest(const fs::path& run_dir) {
  const fs::path p = run_dir / "manifest.json";
  if (!fs::exists(p)) throw ConfigError(fmt::format("'{}' has no manifest.json", run_dir.string()));
  try {
    json m = json::parse(read_file(p));
    if (m.value("format", 0) != kManifestFormat)
      throw FormatError(fmt::format("manifest format {} is not supported", m.value("format", 0)));
    return m;
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("manifest.json: {}", e.what()));
  }
}

std::vector<std::uint64_t> agent_site_seeds(const RunConfig& cfg) {
  if (cfg.env.mode == EnvMode::kGeneralist) return {cfg.site_seeds.front()};
  return cfg.site_seeds;
}

// ---- train ----

struct AgentOutput {
  std::string metrics;
  std::string episodes;
  json record;
};

TrainResult train_agent(const RunConfig& cfg, MoTask& task, const TrainCallbacks& cb) {
  if (cfg.algorithm == "eupg_fixed" || cfg.algorithm == "eupg_variable") {
    EupgConfig e = cfg.eupg;
    e.preference_mode = cfg.algorithm == "eupg_fixed" ? PreferenceMode::kFixed : PreferenceMode::kSampled;
    e.total_steps = cfg.timesteps;
    e.seed = cfg.seed;
    e.keep_step_records = true;
    return train_eupg(task, e, cb);
  }
  PpoConfig p = cfg.ppo;
  p.total_steps = cfg.timesteps;
  p.seed = cfg.seed;
  p.keep_step_records = true;
  if (cfg.algorithm == "curriculum_ppo") return train_curriculum_ppo(task, p, cfg.curriculum, cb);
  return train_ppo_gated(task, p, cb);
}

AgentOutput run_agent(const RunConfig& cfg, std::size_t agent, std::uint64_t site_seed,
                      const fs::path& run_dir) {
  AgentOutput out;
  ForestTask task(cfg.env, cfg.seed, site_seed);
  json episodes = json::array();
  TrainCallbacks cb;
  cb.on_episode = [&](const EpisodeLog& log) {
    out.metrics += metrics_row(agent, site_seed, log, site_parameter_digest(task.env().site()));
    out.episodes += episode_rows(agent, log.episode, log.steps);
    const EpisodeSeeds s = task.env().config().seeds;
    episodes.push_back({{"episode", log.episode},
                        {"lambda", log.preference},
                        {"site", s.site},
                        {"weather", s.weather},
                        {"disturbance", s.disturbance},
                        {"preference", s.preference}});
  };
  cb.checkpoint_every = cfg.checkpoint_every;
  cb.on_checkpoint = [&](const Checkpoint& c, std::uint64_t episode) {
    save_checkpoint((run_dir / "checkpoints" / fmt::format("agent{}_ep{}.ckpt", agent, episode)).string(), c);
  };
  const TrainResult r = train_agent(cfg, task, cb);
  const std::string final_name = fmt::format("checkpoints/agent{}_final.ckpt", agent);
  save_checkpoint((run_dir / final_name).string(), r.checkpoint);
  out.record = {{"agent", agent},
                {"site_seed", site_seed},
                {"seed", cfg.seed},
                {"checkpoint", final_name},
                {"total_steps", r.total_steps},
                {"episodes_seen", r.episodes_seen},
                {"episodes", std::move(episodes)}};
  return out;
}

int cmd_train(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> timesteps, std::optional<std::uint64_t> seed,
              std::optional<std::size_t> workers, const std::vector<std::string>& sets,
              std::ostream& out) {
  if (!fs::exists(config_path))
    throw ConfigError(fmt::format("config file '{}' does not exist", config_path));
  RunConfig cfg;
  apply_config_text(cfg, read_file(config_path));
  apply_sets(cfg, sets);
  if (timesteps) cfg.timesteps = *timesteps;
  if (seed) cfg.seed = *seed;
  if (workers) cfg.workers = *workers;
  validate_run_config(cfg);

  const fs::path run_dir(out_dir);
  if (fs::exists(run_dir / "manifest.json"))
    throw UsageError(fmt::format("'{}' already holds a run", out_dir));
  fs::create_directories(run_dir / "checkpoints");
  fs::create_directories(run_dir / "eval");

  const std::vector<std::uint64_t> sites = agent_site_seeds(cfg);
  std::vector<AgentOutput> outputs(sites.size());
  std::vector<std::exception_ptr> errors(sites.size());
  const std::size_t workers_used = std::min(cfg.workers, sites.size());
  auto work = [&](std::size_t w) {
    for (std::size_t k = w; k < sites.size(); k += workers_used) {
      try {
        outputs[k] = run_agent(cfg, k, sites[k], run_dir);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (workers_used <= 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers_used; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::string metrics = std::string(kMetricsHeader) + "\n";
  std::string episodes = std::string(kEpisodesHeader) + "\n";
  json agents = json::array();
  for (auto& o : outputs) {
    metrics += o.metrics;
    episodes += o.episodes;
    agents.push_back(std::move(o.record));
  }
  write_file(run_dir / "metrics.csv", metrics);
  write_file(run_dir / "episodes.csv", episodes);
  write_file(run_dir / "config.txt", render_run_config(cfg));
  json manifest{{"format", kManifestFormat},
                {"version", BOREAL_VERSION},
                {"config", config_json(cfg)},
                {"agents", std::move(agents)}};
  write_file(run_dir / "manifest.json", manifest.dump(1) + "\n");
  out << fmt::format("trained {} agent(s) with {} into {}\n", sites.size(), cfg.algorithm,
                     run_dir.string());
  return kExitOk;
}

// ---- evaluate ----

int cmd_evaluate(const std::string& run, const std::string& lambdas_text,
                 std::optional<std::size_t> episodes, std::optional<std::size_t> workers,
                 std::ostream& out) {
  const fs::path run_dir(run);
  const json manifest = load_manifest(run_dir);
  RunConfig cfg = config_from_json(manifest.at("config"));
  if (!lambdas_text.empty()) set_config_value(cfg, "eval.lambdas", lambdas_text);
  if (episodes) cfg.eval_episodes = *episodes;
  if (workers) cfg.workers = *workers;
  validate_run_config(cfg);
  if (cfg.eval_lambdas.size() < 2)
    throw UsageError(
        "the lambda monotonicity metric needs a grid of at least 2 preferences; pass --lambdas with 2 or "
        "more values");

  std::vector<EvaluationRecord> records;
  for (const json& agent : manifest.at("agents")) {
    const std::size_t k = agent.at("agent").get<std::size_t>();
    const Checkpoint ckpt = load_checkpoint((run_dir / agent.at("checkpoint").get<std::string>()).string());
    ForestTask task(cfg.env, cfg.seed, agent.at("site_seed").get<std::uint64_t>());
    auto policy = make_greedy_policy(ckpt);
    EvaluationRecord rec = evaluate_policy(*policy, task, cfg.eval_lambdas, cfg.eval_episodes,
                                           cfg.eval_first_episode, cfg.workers);
    rec.policy_id = fmt::format("agent{}/{}", k, rec.policy_id);
    records.push_back(std::move(rec));
    for (EvaluationRecord& b :
         run_baselines(task, cfg.eval_lambdas, cfg.eval_episodes, cfg.eval_first_episode, cfg.workers)) {
      b.policy_id = fmt::format("agent{}/{}", k, b.policy_id);
      records.push_back(std::move(b));
    }
  }
  const fs::path eval_dir = run_dir / "eval";
  fs::create_directories(eval_dir);
  std::ostringstream tradeoff, strategy, pareto, mono;
  write_tradeoff_csv(tradeoff, records);
  write_strategy_csv(strategy, records);
  write_pareto_json(pareto, records);
  write_monotonicity_json(mono, records);
  write_file(eval_dir / "tradeoff.csv", tradeoff.str());
  write_file(eval_dir / "strategy.csv", strategy.str());
  write_file(eval_dir / "pareto.json", pareto.str());
  write_file(eval_dir / "monotonicity.json", mono.str());
  for (const auto& rec : records)
    out << fmt::format("{}: lambda violations {:.3f}\n", rec.policy_id, lambda_monotonicity_violations(rec));
  return kExitOk;
}

// ---- simulate ----

int cmd_simulate(std::uint64_t seed, const std::string& params_path, int years,
                 const std::string& actions_text, const std::string& actions_file,
                 const std::vector<std::string>& sets, const std::string& out_path, std::ostream& out) {
  if (years <= 0) throw UsageError("--years must be positive");
  RunConfig cfg;
  apply_sets(cfg, sets);
  if (!params_path.empty()) {
    std::string text = read_file(params_path);
    std::string prefixed;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
      const auto b = line.find_first_not_of(" \t");
      if (b != std::string::npos && line[b] != '#' && line.compare(b, 6, "param.") != 0)
        line.insert(b, "param.");
      prefixed += line + "\n";
    }
    apply_config_text(cfg, prefixed);
  }
  validate_run_config(cfg);
  std::vector<int> script = parse_actions(actions_file.empty() ? actions_text : read_file(actions_file));
  if (script.size() != 1 && script.size() != static_cast<std::size_t>(years))
    throw ConfigError(fmt::format("action script has {} entries but {} years were requested",
                                  script.size(), years));

  EpisodeConfig ep = cfg.env;
  ep.seeds = episode_seeds(EnvMode::kSiteSpecific, seed, seed, 0);
  auto [p, stand] = episode_site(ep);
  ForestSimulator sim(p, stand, ep.seeds.weather, ep.seeds.disturbance, cfg.env.sim);
  if (cfg.env.spin_up) sim.spin_up();

  std::ostringstream csv;
  csv << annual_metrics_csv_header() << "\n";
  for (int y = 0; y < years; ++y) {
    const int a = script.size() == 1 ? script.front() : script[static_cast<std::size_t>(y)];
    write_annual_metrics_csv_row(csv, sim.simulate_year(decode_action(a)));
  }
  if (out_path.empty() || out_path == "-")
    out << csv.str();
  else
    write_file(out_path, csv.str());
  return kExitOk;
}

// ---- replay ----

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line number, cells)
};

CsvTable read_csv(const fs::path& p) {
  CsvTable t;
  std::stringstream ss(read_file(p));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (line_no == 1) {
      t.header = split_csv(line);
      continue;
    }
    if (!line.empty()) t.rows.emplace_back(line_no, split_csv(line));
  }
  return t;
}

std::size_t column(const CsvTable& t, const std::string& name, const std::string& file) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == name) return i;
  throw FormatError(fmt::format("{} has no column '{}'", file, name));
}

int cmd_replay(const std::string& run, std::uint64_t episode, std::size_t agent, std::ostream& out,
               std::ostream& err) {
  const fs::path run_dir(run);
  const json manifest = load_manifest(run_dir);
  const RunConfig cfg = config_from_json(manifest.at("config"));
  const json* agent_rec = nullptr;
  for (const json& a : manifest.at("agents"))
    if (a.at("agent").get<std::size_t>() == agent) agent_rec = &a;
  if (!agent_rec) throw UsageError(fmt::format("agent {} is not in the manifest", agent));
  const json* ep_rec = nullptr;
  for (const json& e : agent_rec->at("episodes"))
    if (e.at("episode").get<std::uint64_t>() == episode) ep_rec = &e;
  if (!ep_rec) throw UsageError(fmt::format("episode {} of agent {} is not in the manifest", episode, agent));

  std::vector<std::string> diffs;
  EpisodeConfig ep = cfg.env;
  ep.seeds = {ep_rec->at("site").get<std::uint64_t>(), ep_rec->at("weather").get<std::uint64_t>(),
              ep_rec->at("disturbance").get<std::uint64_t>(),
              ep_rec->at("preference").get<std::uint64_t>()};
  const EpisodeSeeds derived =
      episode_seeds(cfg.env.mode, cfg.seed, agent_rec->at("site_seed").get<std::uint64_t>(), episode);
  if (!(derived.site == ep.seeds.site && derived.weather == ep.seeds.weather &&
        derived.disturbance == ep.seeds.disturbance && derived.preference == ep.seeds.preference))
    diffs.push_back("manifest seeds differ from the seeds derived from train.seed and the episode index");
  ep.preference_mode = PreferenceMode::kFixed;
  ep.preference = ep_rec->at("lambda").get<double>();

  const CsvTable steps = read_csv(run_dir / "episodes.csv");
  const CsvTable metrics = read_csv(run_dir / "metrics.csv");
  const std::string agent_s = std::to_string(agent), episode_s = std::to_string(episode);
  const std::size_t s_agent = column(steps, "agent", "episodes.csv");
  const std::size_t s_episode = column(steps, "episode", "episodes.csv");
  const std::size_t s_action = column(steps, "action", "episodes.csv");

  ForestEnv env;
  env.reset(ep);
  double carbon = 0.0, thaw = 0.0, density = 0.0, conifer = 0.0;
  std::size_t n = 0;
  for (const auto& [line_no, cells] : steps.rows) {
    if (cells.size() != steps.header.size()) {
      diffs.push_back(fmt::format("episodes.csv row {}: expected {} columns", line_no, steps.header.size()));
      continue;
    }
    if (cells[s_agent] != agent_s || cells[s_episode] != episode_s) continue;
    if (env.done()) {
      diffs.push_back(fmt::format("episodes.csv row {}: step after the episode ended", line_no));
      break;
    }
    int action = 0;
    try {
      action = parse_actions(cells[s_action]).front();
    } catch (const ConfigError&) {
      diffs.push_back(fmt::format("episodes.csv row {}: bad action '{}'", line_no, cells[s_action]));
      break;
    }
    const StepResult r = env.step(action);
    carbon += r.reward.r_carbon;
    thaw += r.reward.r_thaw;
    density = r.info.density;
    conifer = r.info.conifer_fraction;
    const std::map<std::string, std::string> replayed{{"step", std::to_string(n)},
                                                      {"r_carbon", g17(r.reward.r_carbon)},
                                                      {"r_thaw", g17(r.reward.r_thaw)},
                                                      {"density", g17(r.info.density)},
                                                      {"conifer_fraction", g17(r.info.conifer_fraction)}};
    for (const auto& [name, value] : replayed) {
      const std::string& recorded = cells[column(steps, name, "episodes.csv")];
      if (recorded != value)
        diffs.push_back(fmt::format("episodes.csv row {} column {}: recorded {}, replayed {}", line_no,
                                    name, recorded, value));
    }
    ++n;
  }
  if (n == 0) diffs.push_back("episodes.csv holds no steps for this episode");
  if (n > 0 && !env.done()) diffs.push_back(fmt::format("episode ended early after {} recorded steps", n));

  const std::size_t m_agent = column(metrics, "agent", "metrics.csv");
  const std::size_t m_episode = column(metrics, "episode", "metrics.csv");
  bool found = false;
  const double lambda = ep.preference;
  for (const auto& [line_no, cells] : metrics.rows) {
    if (cells.size() != metrics.header.size() || cells[m_agent] != agent_s || cells[m_episode] != episode_s)
      continue;
    found = true;
    const std::map<std::string, std::string> replayed{
        {"lambda", g17(lambda)},
        {"carbon_return", g17(carbon)},
        {"thaw_return", g17(thaw)},
        {"scalarized_return", g17(lambda * carbon + (1.0 - lambda) * thaw)},
        {"final_density", g17(density)},
        {"final_conifer", g17(conifer)},
        {"site_digest", hex64(site_parameter_digest(env.site()))}};
    for (const auto& [name, value] : replayed) {
      const std::string& recorded = cells[column(metrics, name, "metrics.csv")];
      if (recorded != value)
        diffs.push_back(fmt::format("metrics.csv row {} column {}: recorded {}, replayed {}", line_no,
                                    name, recorded, value));
    }
  }
  if (!found) diffs.push_back("metrics.csv holds no row for this episode");

  if (!diffs.empty()) {
    for (const auto& d : diffs) err << "replay mismatch: " << d << "\n";
    return kExitReplayMismatch;
  }
  out << fmt::format("replay ok: agent {} episode {} ({} steps)\n", agent, episode, n);
  return kExitOk;
}

// ---- rollout ----

int cmd_rollout(const std::string& mode, std::uint64_t seed, std::uint64_t episode, double preference,
                const std::string& actions_text, int steps, const std::vector<std::string>& sets,
                const std::string& out_path, std::ostream& out) {
  RunConfig cfg;
  set_config_value(cfg, "env.mode", mode);
  apply_sets(cfg, sets);
  validate_run_config(cfg);
  RolloutSpec spec;
  spec.seed = seed;
  spec.episode = episode;
  spec.preference = preference;
  spec.actions = parse_actions(actions_text);
  spec.steps = steps;
  std::ostringstream text;
  write_rollout_golden(text, cfg.env, spec);
  if (out_path.empty() || out_path == "-")
    out << text.str();
  else
    write_file(out_path, text.str());
  return kExitOk;
}

int cmd_keys(std::ostream& out) {
  const RunConfig defaults;
  for (const ConfigKey& k : config_keys())
    out << fmt::format("{} = {}  # {}\n", k.key, get_config_value(defaults, k.key), k.description);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Boreal forest multi-objective RL environment", "boreal"};
  app.require_subcommand(1);
  app.set_version_flag("--version", BOREAL_VERSION);

  std::string config_path, out_dir, run_dir, lambdas, params_path, actions = "12", actions_file,
                                                                  out_path, mode = "site_specific";
  std::optional<std::uint64_t> timesteps, seed_opt;
  std::optional<std::size_t> workers, episodes_opt;
  std::vector<std::string> sets;
  std::uint64_t seed = 0, episode = 0;
  std::size_t agent = 0;
  int years = 1, steps = 0;
  double preference = 0.5;

  auto* train = app.add_subcommand("train", "train an agent and write a run directory");
  train->add_option("config", config_path, "config file (key = value)")->required();
  train->add_option("--out,-o", out_dir, "run directory")->required();
  train->add_option("--timesteps", timesteps, "override train.timesteps");
  train->add_option("--seed", seed_opt, "override train.seed");
  train->add_option("--workers", workers, "agents trained in parallel");
  train->add_option("--set", sets, "override any key: key=value");

  auto* evaluate = app.add_subcommand("evaluate", "greedy evaluation of a run's final checkpoints");
  evaluate->add_option("run", run_dir, "run directory")->required();
  evaluate->add_option("--lambdas", lambdas, "comma-separated carbon weights");
  evaluate->add_option("--episodes", episodes_opt, "episodes per lambda");
  evaluate->add_option("--workers", workers, "rollout threads");

  auto* simulate = app.add_subcommand("simulate", "run the simulator under an action script");
  simulate->add_option("--seed", seed, "site seed");
  simulate->add_option("--params", params_path, "site parameter pins (name = value)");
  simulate->add_option("--years", years, "years to simulate");
  simulate->add_option("--actions", actions, "one action index, or one per year (comma-separated)");
  simulate->add_option("--actions-file", actions_file, "action script file");
  simulate->add_option("--set", sets, "override any key: key=value");
  simulate->add_option("--out,-o", out_path, "CSV output (default stdout)");

  auto* replay = app.add_subcommand("replay", "re-execute a recorded episode and diff it");
  replay->add_option("run", run_dir, "run directory")->required();
  replay->add_option("--episode", episode, "episode index")->required();
  replay->add_option("--agent", agent, "agent index");

  auto* rollout = app.add_subcommand("rollout", "write a scripted-episode golden file (JSON lines)");
  rollout->add_option("--mode", mode, "site_specific or generalist");
  rollout->add_option("--seed", seed, "seed");
  rollout->add_option("--episode", episode, "episode index");
  rollout->add_option("--preference", preference, "carbon weight");
  rollout->add_option("--actions", actions, "action indices, cycled");
  rollout->add_option("--steps", steps, "steps (0 = whole episode)");
  rollout->add_option("--set", sets, "override any key: key=value");
  rollout->add_option("--out,-o", out_path, "output file (default stdout)");

  auto* keys = app.add_subcommand("keys", "list configuration keys with defaults");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train->parsed()) return cmd_train(config_path, out_dir, timesteps, seed_opt, workers, sets, out);
    if (evaluate->parsed()) return cmd_evaluate(run_dir, lambdas, episodes_opt, workers, out);
    if (simulate->parsed())
      return cmd_simulate(seed, params_path, years, actions, actions_file, sets, out_path, out);
    if (replay->parsed()) return cmd_replay(run_dir, episode, agent, out, err);
    if (rollout->parsed())
      return cmd_rollout(mode, seed, episode, preference, actions, steps, sets, out_path, out);
    if (keys->parsed()) return cmd_keys(out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const PhysicsFault& e) {
    err << "physics fault: " << e.what() << "\n";
    return kExitPhysics;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace boreal::cli
