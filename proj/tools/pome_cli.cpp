// Command-line front end: train / eval / compare / dump-targets / dump-config.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pome/algorithm.hpp"
#include "pome/checkpoint.hpp"
#include "pome/error.hpp"
#include "pome/metrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pome;

namespace {

constexpr const char* kArtifactVersion = "0.1.0";

constexpr int kExitUsage = 2;
constexpr int kExitDiverged = 3;

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

// ---------------------------------------------------------------------------
// Config plumbing: defaults < file < flags, everything materialized.

struct CliOverrides {
  std::optional<std::string> env, mode, alpha_schedule, median_scope, adv_norm;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> total_steps;
  std::optional<int> k, workers, epochs, minibatches, episode_cap, chain_length;
  std::optional<double> gamma, lambda, alpha0, clip_ratio, beta, cv, ct, cr, entropy_coef, lr0;
};

// Attach every train-config flag to `app`, filling `ov` when given.
void add_train_flags(CLI::App& app, CliOverrides& ov) {
  app.add_option("--env", ov.env, "environment id (chain20|detgrid5|noisycorridor)");
  app.add_option("--mode", ov.mode, "ppo|pome|pome_nondecay|ppo_model_based");
  app.add_option("--seed", ov.seed, "master seed");
  app.add_option("--total-steps", ov.total_steps, "total environment steps");
  app.add_option("--k", ov.k, "segment length per worker");
  app.add_option("--workers", ov.workers, "parallel rollout workers");
  app.add_option("--gamma", ov.gamma, "discount factor");
  app.add_option("--lambda", ov.lambda, "GAE coefficient");
  app.add_option("--alpha0", ov.alpha0, "initial exploration coefficient");
  app.add_option("--alpha-schedule", ov.alpha_schedule, "linear_to_zero|constant");
  app.add_option("--clip-ratio", ov.clip_ratio, "PPO ratio clip");
  app.add_option("--beta", ov.beta, "KL penalty weight");
  app.add_option("--cv", ov.cv, "value loss weight");
  app.add_option("--ct", ov.ct, "transition model loss weight");
  app.add_option("--cr", ov.cr, "reward model loss weight");
  app.add_option("--entropy-coef", ov.entropy_coef, "entropy bonus weight");
  app.add_option("--lr0", ov.lr0, "initial learning rate");
  app.add_option("--epochs", ov.epochs, "optimization epochs per iteration");
  app.add_option("--minibatches", ov.minibatches, "minibatches per epoch");
  app.add_option("--adv-norm", ov.adv_norm, "on|off")->check(CLI::IsMember({"on", "off"}));
  app.add_option("--median-scope", ov.median_scope, "worker|batch")
      ->check(CLI::IsMember({"worker", "batch"}));
  app.add_option("--episode-cap", ov.episode_cap, "episode step cap (0 = env default)");
  app.add_option("--chain-length", ov.chain_length, "chain environment length");
}

// "pome_nondecay" is sugar for mode=pome with a constant alpha schedule.
void apply_mode_string(TrainConfig& cfg, const std::string& mode, bool schedule_explicit) {
  if (mode == "pome_nondecay") {
    if (schedule_explicit)
      throw ConfigError("mode pome_nondecay fixes alpha-schedule=constant; do not set both");
    cfg.mode = Mode::kPome;
    cfg.alpha_schedule = ScheduleKind::kConstant;
  } else {
    cfg.mode = mode_from_string(mode);
  }
}

json config_to_json(const TrainConfig& cfg) {
  json j;
  j["env"] = cfg.env_id;
  j["mode"] = mode_to_string(cfg.mode);
  j["seed"] = cfg.seed;
  j["total_timesteps"] = cfg.total_timesteps;
  j["gamma"] = cfg.gamma;
  j["lambda"] = cfg.lambda;
  j["k"] = cfg.k;
  j["n_workers"] = cfg.n_workers;
  j["clip_ratio"] = cfg.clip_ratio;
  j["alpha0"] = cfg.alpha0;
  j["alpha_schedule"] = schedule_to_string(cfg.alpha_schedule);
  j["beta"] = cfg.beta;
  j["c_v"] = cfg.c_v;
  j["c_t"] = cfg.c_t;
  j["c_r"] = cfg.c_r;
  j["entropy_coef"] = cfg.entropy_coef;
  j["lr0"] = cfg.lr0;
  j["lr_schedule"] = schedule_to_string(cfg.lr_schedule);
  j["epochs"] = cfg.epochs;
  j["minibatch_count"] = cfg.minibatch_count;
  j["adv_norm"] = cfg.adv_norm;
  j["median_scope"] = cfg.median_scope == MedianScope::kWorker ? "worker" : "batch";
  j["clipped_bonus"] = cfg.clipped_bonus;
  j["episode_cap"] = cfg.env_params.episode_cap;
  j["chain_length"] = cfg.env_params.chain_length;
  j["chain_trap_reward"] = cfg.env_params.chain_trap_reward;
  return j;
}

// Tracks whether alpha0 was set explicitly (file or flag) for the
// mode-compatibility check; alpha is meaningless under ppo-family modes.
struct ResolvedConfig {
  TrainConfig cfg;
  bool alpha0_explicit = false;
};

void apply_config_json(TrainConfig& cfg, const json& j, bool& alpha0_explicit) {
  static const std::vector<std::string> known = {
      "env",         "mode",         "seed",          "total_timesteps", "gamma",
      "lambda",      "k",            "n_workers",     "clip_ratio",      "alpha0",
      "alpha_schedule", "beta",      "c_v",           "c_t",             "c_r",
      "entropy_coef", "lr0",         "lr_schedule",   "epochs",          "minibatch_count",
      "adv_norm",    "median_scope", "clipped_bonus", "episode_cap",     "chain_length",
      "chain_trap_reward"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown config key: " + key);
  }
  const bool schedule_in_file = j.contains("alpha_schedule");
  if (schedule_in_file) cfg.alpha_schedule = schedule_from_string(j["alpha_schedule"]);
  if (j.contains("mode")) apply_mode_string(cfg, j["mode"], schedule_in_file && j["mode"] == "pome_nondecay");
  if (j.contains("env")) cfg.env_id = j["env"];
  if (j.contains("seed")) cfg.seed = j["seed"];
  if (j.contains("total_timesteps")) cfg.total_timesteps = j["total_timesteps"];
  if (j.contains("gamma")) cfg.gamma = j["gamma"];
  if (j.contains("lambda")) cfg.lambda = j["lambda"];
  if (j.contains("k")) cfg.k = j["k"];
  if (j.contains("n_workers")) cfg.n_workers = j["n_workers"];
  if (j.contains("clip_ratio")) cfg.clip_ratio = j["clip_ratio"];
  if (j.contains("alpha0")) {
    cfg.alpha0 = j["alpha0"];
    alpha0_explicit = true;
  }
  if (j.contains("beta")) cfg.beta = j["beta"];
  if (j.contains("c_v")) cfg.c_v = j["c_v"];
  if (j.contains("c_t")) cfg.c_t = j["c_t"];
  if (j.contains("c_r")) cfg.c_r = j["c_r"];
  if (j.contains("entropy_coef")) cfg.entropy_coef = j["entropy_coef"];
  if (j.contains("lr0")) cfg.lr0 = j["lr0"];
  if (j.contains("lr_schedule")) cfg.lr_schedule = schedule_from_string(j["lr_schedule"]);
  if (j.contains("epochs")) cfg.epochs = j["epochs"];
  if (j.contains("minibatch_count")) cfg.minibatch_count = j["minibatch_count"];
  if (j.contains("adv_norm")) cfg.adv_norm = j["adv_norm"];
  if (j.contains("median_scope")) {
    const std::string s = j["median_scope"];
    if (s != "worker" && s != "batch") throw ConfigError("median_scope must be worker|batch");
    cfg.median_scope = s == "worker" ? MedianScope::kWorker : MedianScope::kBatch;
  }
  if (j.contains("clipped_bonus")) cfg.clipped_bonus = j["clipped_bonus"];
  if (j.contains("episode_cap")) cfg.env_params.episode_cap = j["episode_cap"];
  if (j.contains("chain_length")) cfg.env_params.chain_length = j["chain_length"];
  if (j.contains("chain_trap_reward")) cfg.env_params.chain_trap_reward = j["chain_trap_reward"];
}

ResolvedConfig resolve_config(const std::optional<std::string>& config_path,
                              const CliOverrides& ov) {
  ResolvedConfig rc;
  TrainConfig& cfg = rc.cfg;

  if (config_path) {
    std::ifstream is(*config_path);
    if (!is) throw ConfigError("cannot open config file: " + *config_path);
    json j;
    try {
      is >> j;
    } catch (const json::exception& e) {
      throw ConfigError("config parse error: " + std::string(e.what()));
    }
    // A manifest works as a config file too; its snapshot lives under "config".
    if (j.contains("config")) j = j["config"];
    apply_config_json(cfg, j, rc.alpha0_explicit);
  }

  if (ov.alpha_schedule) cfg.alpha_schedule = schedule_from_string(*ov.alpha_schedule);
  if (ov.mode) apply_mode_string(cfg, *ov.mode, ov.alpha_schedule.has_value());
  if (ov.env) cfg.env_id = *ov.env;
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.total_steps) cfg.total_timesteps = *ov.total_steps;
  if (ov.k) cfg.k = *ov.k;
  if (ov.workers) cfg.n_workers = *ov.workers;
  if (ov.gamma) cfg.gamma = *ov.gamma;
  if (ov.lambda) cfg.lambda = *ov.lambda;
  if (ov.alpha0) {
    cfg.alpha0 = *ov.alpha0;
    rc.alpha0_explicit = true;
  }
  if (ov.clip_ratio) cfg.clip_ratio = *ov.clip_ratio;
  if (ov.beta) cfg.beta = *ov.beta;
  if (ov.cv) cfg.c_v = *ov.cv;
  if (ov.ct) cfg.c_t = *ov.ct;
  if (ov.cr) cfg.c_r = *ov.cr;
  if (ov.entropy_coef) cfg.entropy_coef = *ov.entropy_coef;
  if (ov.lr0) cfg.lr0 = *ov.lr0;
  if (ov.epochs) cfg.epochs = *ov.epochs;
  if (ov.minibatches) cfg.minibatch_count = *ov.minibatches;
  if (ov.adv_norm) cfg.adv_norm = (*ov.adv_norm == "on");
  if (ov.median_scope)
    cfg.median_scope = *ov.median_scope == "worker" ? MedianScope::kWorker : MedianScope::kBatch;
  if (ov.episode_cap) cfg.env_params.episode_cap = *ov.episode_cap;
  if (ov.chain_length) cfg.env_params.chain_length = *ov.chain_length;

  // The exploration coefficient only exists in pome mode. Pure-ppo modes run
  // with alpha pinned at zero and reject an explicit nonzero request.
  if (cfg.mode != Mode::kPome) {
    if (rc.alpha0_explicit && cfg.alpha0 != 0.0)
      throw ConfigError("alpha0 is meaningless for mode " + mode_to_string(cfg.mode));
    cfg.alpha0 = 0.0;
  }

  cfg.validate();
  return rc;
}

// ---------------------------------------------------------------------------
// Shared helpers for checkpoint-driven commands.

void require_compatible(const ParamSet& params, const PolicyValueNet& net, const EnvSpec& spec) {
  const std::string w0 = std::string(PolicyValueNet::kTrunkPrefix) + "/W0";
  const std::string pi = std::string(PolicyValueNet::kPolicyPrefix) + "/W" +
                         std::to_string(net.policy_head.layer_count() - 1);
  if (!params.has(w0) || !params.has(pi))
    throw ShapeError("checkpoint is missing policy/value parameters");
  if (params.get(w0).rows() != spec.observation_dim)
    throw ShapeError("checkpoint observation dim " + std::to_string(params.get(w0).rows()) +
                     " does not match environment " + std::to_string(spec.observation_dim));
  if (params.get(pi).cols() != spec.action_count)
    throw ShapeError("checkpoint action count " + std::to_string(params.get(pi).cols()) +
                     " does not match environment " + std::to_string(spec.action_count));
}

// ---------------------------------------------------------------------------
// Subcommands.

struct TrainOutcome {
  IterationReport final_report;
  fs::path metrics_path;
};

TrainOutcome run_train(const TrainConfig& cfg, const fs::path& out_dir, bool quiet) {
  fs::create_directories(out_dir);
  const std::string started = iso_timestamp();
  const auto t0 = std::chrono::steady_clock::now();

  Trainer trainer(cfg);
  MetricsWriter metrics((out_dir / "metrics.csv").string());

  IterationReport rep;
  while (!trainer.finished()) {
    rep = trainer.iterate();
    metrics.append(rep);
    if (!quiet) {
      std::printf("iter %4d steps %8lld return %7.3f surr %9.5f vloss %9.5f L_r %9.6f L_T %9.6f "
                  "eps %8.5f kl %8.6f alpha %6.4f lr %.2e (%.2fs)\n",
                  rep.iteration, static_cast<long long>(rep.total_steps), rep.mean_return,
                  rep.surrogate, rep.value_loss, rep.reward_model_loss,
                  rep.transition_model_loss, rep.mean_epsilon, rep.approx_kl, rep.alpha, rep.lr,
                  rep.wall_seconds);
      std::fflush(stdout);
    }
  }

  save_checkpoint((out_dir / "final.ckpt").string(), trainer.params());

  json manifest;
  manifest["artifact_version"] = kArtifactVersion;
  manifest["env_id"] = cfg.env_id;
  manifest["seeds"] = {cfg.seed};
  manifest["started_at"] = started;
  manifest["finished_at"] = iso_timestamp();
  manifest["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  manifest["config"] = config_to_json(cfg);
  manifest["files"] = {{"metrics", "metrics.csv"}, {"checkpoint", "final.ckpt"}};
  std::ofstream mf(out_dir / "manifest.json");
  mf << manifest.dump(2) << "\n";

  return {rep, out_dir / "metrics.csv"};
}

int cmd_train(const std::optional<std::string>& config_path, const CliOverrides& ov,
              const std::string& out_dir, bool quiet) {
  const ResolvedConfig rc = resolve_config(config_path, ov);
  fs::path dir = out_dir.empty()
                     ? fs::path("runs") / (mode_to_string(rc.cfg.mode) + "-" + rc.cfg.env_id +
                                           "-seed" + std::to_string(rc.cfg.seed))
                     : fs::path(out_dir);
  const TrainOutcome out = run_train(rc.cfg, dir, quiet);
  std::printf("done: %d iterations, %lld steps, final mean return %.4f\n",
              out.final_report.iteration, static_cast<long long>(out.final_report.total_steps),
              out.final_report.mean_return);
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& env_id, int episodes,
             std::uint64_t seed, bool stochastic, const CliOverrides& ov) {
  if (episodes < 1) throw ConfigError("eval: episodes must be >= 1");
  EnvParams ep;
  if (ov.episode_cap) ep.episode_cap = *ov.episode_cap;
  if (ov.chain_length) ep.chain_length = *ov.chain_length;
  auto env = make_env(env_id, ep);
  PolicyValueNet net = PolicyValueNet::make(env->spec());
  ParamSet params = load_checkpoint(ckpt_path);
  require_compatible(params, net, env->spec());

  const EvalSummary s = evaluate(params, net, *env, episodes, seed, !stochastic);
  std::printf("episodes %d mean %.6f median %.6f stddev %.6f\n", s.episodes, s.mean, s.median,
              s.stddev);
  return 0;
}

int cmd_compare(const std::optional<std::string>& config_path, const CliOverrides& ov,
                const std::string& modes_csv, const std::string& seeds_csv,
                const std::string& out_dir) {
  std::vector<std::string> modes;
  {
    std::stringstream ss(modes_csv);
    std::string item;
    while (std::getline(ss, item, ',')) modes.push_back(item);
  }
  std::vector<std::uint64_t> seeds;
  {
    std::stringstream ss(seeds_csv);
    std::string item;
    while (std::getline(ss, item, ',')) seeds.push_back(std::stoull(item));
  }
  if (modes.empty() || seeds.empty()) throw ConfigError("compare needs >=1 mode and >=1 seed");

  const fs::path dir = out_dir.empty() ? fs::path("runs") / "compare" : fs::path(out_dir);
  fs::create_directories(dir);

  struct Cell {
    std::string mode;
    std::uint64_t seed;
    double final_return = 0.0;
    bool ok = false;
    std::string error;
  };
  std::vector<Cell> cells;

  for (const std::string& mode : modes) {
    for (std::uint64_t seed : seeds) {
      CliOverrides cell_ov = ov;
      cell_ov.mode = mode;
      cell_ov.seed = seed;
      Cell cell{mode, seed, 0.0, false, ""};
      try {
        const ResolvedConfig rc = resolve_config(config_path, cell_ov);
        const fs::path cell_dir = dir / (mode + "-seed" + std::to_string(seed));
        std::printf("-- cell mode=%s seed=%llu\n", mode.c_str(),
                    static_cast<unsigned long long>(seed));
        std::fflush(stdout);
        const TrainOutcome out = run_train(rc.cfg, cell_dir, /*quiet=*/true);
        cell.final_return = out.final_report.mean_return;
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
        std::fprintf(stderr, "cell mode=%s seed=%llu failed: %s\n", mode.c_str(),
                     static_cast<unsigned long long>(seed), e.what());
      }
      cells.push_back(cell);
    }
  }

  // Aggregate per mode; best row gets the marker, like the paper's bold.
  std::ofstream summary(dir / "compare.csv");
  summary << "mode,mean_final_return,seeds_ok\n";
  double best = -1e300;
  std::string best_mode;
  struct Agg { double mean; int ok; };
  std::vector<std::pair<std::string, Agg>> aggs;
  for (const std::string& mode : modes) {
    double sum = 0.0;
    int ok = 0;
    for (const Cell& c : cells)
      if (c.mode == mode && c.ok) {
        sum += c.final_return;
        ok += 1;
      }
    const double mean = ok > 0 ? sum / ok : std::nan("");
    aggs.push_back({mode, {mean, ok}});
    if (ok > 0 && mean > best) {
      best = mean;
      best_mode = mode;
    }
  }
  std::printf("\n%-18s %18s %8s\n", "mode", "mean_final_return", "best");
  for (const auto& [mode, agg] : aggs) {
    summary << mode << "," << agg.mean << "," << agg.ok << "\n";
    std::printf("%-18s %18.6f %8s\n", mode.c_str(), agg.mean, mode == best_mode ? "*" : "");
  }
  std::printf("wrote %s\n", (dir / "compare.csv").string().c_str());

  for (const Cell& c : cells)
    if (!c.ok) return 1;
  return 0;
}

int cmd_dump_targets(const std::string& ckpt_path, const std::string& env_id, int steps,
                     std::uint64_t seed, int workers, double alpha0, const std::string& scope,
                     double gamma, double lambda, const std::string& out_path,
                     const CliOverrides& ov) {
  if (steps < 1) throw ConfigError("dump-targets: steps must be >= 1");
  if (workers < 1) throw ConfigError("dump-targets: workers must be >= 1");

  EnvParams ep;
  if (ov.episode_cap) ep.episode_cap = *ov.episode_cap;
  if (ov.chain_length) ep.chain_length = *ov.chain_length;
  VecEnv venv(env_id, ep, workers, derive_stream_seed(seed, 1));
  PolicyValueNet net = PolicyValueNet::make(venv.spec());
  DynamicsModel dyn = DynamicsModel::make(venv.spec());
  ParamSet params = load_checkpoint(ckpt_path);
  require_compatible(params, net, venv.spec());

  std::vector<std::vector<double>> obs = venv.reset(derive_stream_seed(seed, 1));
  Rng action_rng(derive_stream_seed(seed, 3));
  RolloutBlock block = collect_rollout(venv, obs, params, net, steps, action_rng);

  TargetConfig tc;
  tc.mode = Mode::kPome;
  tc.alpha = alpha0;
  tc.median_scope = scope == "batch" ? MedianScope::kBatch : MedianScope::kWorker;
  tc.gamma = gamma;
  tc.lambda = lambda;
  const TargetTable table =
      compute_targets(segments_to_target_inputs(block.segments, params, net, dyn, venv.spec()), tc);

  std::ofstream os(out_path);
  if (!os) throw ContractError("cannot open output file: " + out_path);
  write_target_table(os, table);
  std::printf("wrote %s (%zu rows)\n", out_path.c_str(), table.rows());
  return 0;
}

int cmd_dump_config(const std::optional<std::string>& config_path, const CliOverrides& ov) {
  const ResolvedConfig rc = resolve_config(config_path, ov);
  std::cout << config_to_json(rc.cfg).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"POME/PPO policy optimization on small discrete MDPs"};
  app.require_subcommand(1);

  CliOverrides ov;
  std::optional<std::string> config_path;
  std::string out_dir;
  bool quiet = false;

  CLI::App* train = app.add_subcommand("train", "run training, write metrics + checkpoint");
  train->add_option("--config", config_path, "JSON config or manifest to start from");
  add_train_flags(*train, ov);
  train->add_option("--out-dir", out_dir, "output directory");
  train->add_flag("--quiet", quiet, "suppress per-iteration output");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string ckpt, eval_env = "chain20";
  int episodes = 100;
  std::uint64_t eval_seed = 0;
  bool stochastic = false;
  eval->add_option("checkpoint", ckpt, "checkpoint file")->required();
  eval->add_option("--env", eval_env, "environment id");
  eval->add_option("--episodes", episodes, "episode count");
  eval->add_option("--seed", eval_seed, "evaluation seed");
  eval->add_flag("--stochastic", stochastic, "sample actions instead of argmax");
  eval->add_option("--episode-cap", ov.episode_cap, "episode step cap");
  eval->add_option("--chain-length", ov.chain_length, "chain environment length");

  CLI::App* compare = app.add_subcommand("compare", "train a modes x seeds grid and aggregate");
  std::string modes_csv = "ppo,pome", seeds_csv = "0";
  compare->add_option("--config", config_path, "JSON config to start from");
  compare->add_option("--modes", modes_csv, "comma-separated mode list");
  compare->add_option("--seeds", seeds_csv, "comma-separated seed list");
  add_train_flags(*compare, ov);
  compare->add_option("--out-dir", out_dir, "output directory");

  CLI::App* dump = app.add_subcommand("dump-targets", "write a per-timestep target table");
  std::string dump_env = "detgrid5", dump_out = "targets.csv", dump_scope = "worker";
  int dump_steps = 128, dump_workers = 1;
  std::uint64_t dump_seed = 0;
  double dump_alpha = 0.1, dump_gamma = 0.99, dump_lambda = 0.95;
  dump->add_option("checkpoint", ckpt, "checkpoint file")->required();
  dump->add_option("--env", dump_env, "environment id");
  dump->add_option("--steps", dump_steps, "segment length to roll out");
  dump->add_option("--workers", dump_workers, "parallel workers");
  dump->add_option("--seed", dump_seed, "rollout seed");
  dump->add_option("--alpha0", dump_alpha, "exploration coefficient for the table");
  dump->add_option("--median-scope", dump_scope, "worker|batch")
      ->check(CLI::IsMember({"worker", "batch"}));
  dump->add_option("--gamma", dump_gamma, "discount factor");
  dump->add_option("--lambda", dump_lambda, "GAE coefficient");
  dump->add_option("--out", dump_out, "output csv path");
  dump->add_option("--episode-cap", ov.episode_cap, "episode step cap");
  dump->add_option("--chain-length", ov.chain_length, "chain environment length");

  CLI::App* dump_cfg = app.add_subcommand("dump-config", "print the fully resolved config");
  dump_cfg->add_option("--config", config_path, "JSON config to start from");
  add_train_flags(*dump_cfg, ov);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(config_path, ov, out_dir, quiet);
    if (eval->parsed()) return cmd_eval(ckpt, eval_env, episodes, eval_seed, stochastic, ov);
    if (compare->parsed()) return cmd_compare(config_path, ov, modes_csv, seeds_csv, out_dir);
    if (dump->parsed())
      return cmd_dump_targets(ckpt, dump_env, dump_steps, dump_seed, dump_workers, dump_alpha,
                              dump_scope, dump_gamma, dump_lambda, dump_out, ov);
    if (dump_cfg->parsed()) return cmd_dump_config(config_path, ov);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "diverged: %s\n", e.what());
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
