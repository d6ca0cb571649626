// End-to-end tests of the command-line binary. The binary path comes from
// the POME_CLI environment variable (set by CTest).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <string>

#include "pome/metrics.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using pome::testing::parse_csv;
using pome::testing::read_file;
using pome::testing::scratch_dir;

namespace {

std::string cli_path() {
  const char* p = std::getenv("POME_CLI");
  REQUIRE_MESSAGE(p != nullptr, "POME_CLI must point at the pome binary");
  return p;
}

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / "pome_cli_out.txt";
  const std::string cmd = cli_path() + " " + args + " > " + out.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return {WEXITSTATUS(rc), read_file(out)};
}

}  // namespace

TEST_CASE("train writes metrics, manifest and checkpoint; metrics header is fixed") {
  const fs::path dir = scratch_dir("cli_train");
  RunResult r = run("train --env chain20 --mode pome --seed 0 --total-steps 2048 --quiet --out-dir " +
                    (dir / "run").string());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "run" / "metrics.csv"));
  CHECK(fs::exists(dir / "run" / "manifest.json"));
  CHECK(fs::exists(dir / "run" / "final.ckpt"));

  const auto csv = parse_csv(read_file(dir / "run" / "metrics.csv"));
  REQUIRE(!csv.header.empty());
  std::string joined;
  for (std::size_t i = 0; i < csv.header.size(); ++i) joined += (i ? "," : "") + csv.header[i];
  CHECK(joined == pome::kMetricsHeader);
  CHECK(csv.rows.size() == 2);  // 2048 steps / (128*8)
  CHECK(csv.num(1, "total_steps") == 2048.0);
}

TEST_CASE("determinism: same command twice gives byte-identical metrics") {
  const fs::path dir = scratch_dir("cli_det");
  const std::string common =
      "train --env noisycorridor --mode pome --seed 3 --total-steps 3072 --quiet --out-dir ";
  CHECK(run(common + (dir / "a").string()).exit_code == 0);
  CHECK(run(common + (dir / "b").string()).exit_code == 0);
  const std::string ma = read_file(dir / "a" / "metrics.csv");
  CHECK(!ma.empty());
  CHECK(ma == read_file(dir / "b" / "metrics.csv"));
}

TEST_CASE("re-running from the manifest reproduces the metrics byte-for-byte") {
  const fs::path dir = scratch_dir("cli_manifest");
  CHECK(run("train --env detgrid5 --mode ppo_model_based --seed 9 --total-steps 3072 --quiet "
            "--out-dir " + (dir / "orig").string()).exit_code == 0);
  CHECK(run("train --config " + (dir / "orig" / "manifest.json").string() + " --quiet --out-dir " +
            (dir / "replay").string()).exit_code == 0);
  const std::string ma = read_file(dir / "orig" / "metrics.csv");
  CHECK(!ma.empty());
  CHECK(ma == read_file(dir / "replay" / "metrics.csv"));
}

TEST_CASE("config validation failures exit with the usage code") {
  const fs::path dir = scratch_dir("cli_validate");
  // alpha is meaningless for ppo mode
  RunResult r1 = run("train --env chain20 --mode ppo --alpha0 0.3 --total-steps 1024 --quiet "
                     "--out-dir " + (dir / "x").string());
  CHECK(r1.exit_code == 2);
  CHECK(r1.output.find("alpha0") != std::string::npos);

  // pome_nondecay pins the alpha schedule
  RunResult r2 = run("train --env chain20 --mode pome_nondecay --alpha-schedule linear_to_zero "
                     "--total-steps 1024 --quiet --out-dir " + (dir / "y").string());
  CHECK(r2.exit_code == 2);

  // unknown config key
  std::ofstream(dir / "bad.json") << "{\"gamma\": 0.9, \"totally_unknown\": 1}\n";
  RunResult r3 = run("train --config " + (dir / "bad.json").string());
  CHECK(r3.exit_code == 2);
  CHECK(r3.output.find("totally_unknown") != std::string::npos);

  // invalid field value
  std::ofstream(dir / "bad2.json") << "{\"gamma\": 1.7}\n";
  CHECK(run("train --config " + (dir / "bad2.json").string()).exit_code == 2);
}

TEST_CASE("dump-config: precedence is flags over file over defaults") {
  const fs::path dir = scratch_dir("cli_dumpcfg");
  std::ofstream(dir / "cfg.json") << "{\"gamma\": 0.9, \"k\": 64}\n";
  RunResult r = run("dump-config --config " + (dir / "cfg.json").string() + " --gamma 0.95");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"gamma\": 0.95") != std::string::npos);   // flag wins
  CHECK(r.output.find("\"k\": 64") != std::string::npos);         // file wins over default
  CHECK(r.output.find("\"lambda\": 0.95") != std::string::npos);  // default

  // pome_nondecay sugar resolves to pome + constant schedule
  RunResult r2 = run("dump-config --mode pome_nondecay");
  CHECK(r2.output.find("\"mode\": \"pome\"") != std::string::npos);
  CHECK(r2.output.find("\"alpha_schedule\": \"constant\"") != std::string::npos);
}

TEST_CASE("eval: fresh checkpoint bounds, episode contract, dimension mismatch") {
  const fs::path dir = scratch_dir("cli_eval");
  REQUIRE(run("train --env detgrid5 --mode ppo --seed 1 --total-steps 1024 --quiet --out-dir " +
              (dir / "run").string()).exit_code == 0);
  const std::string ckpt = (dir / "run" / "final.ckpt").string();

  RunResult r = run("eval " + ckpt + " --env detgrid5 --episodes 100 --seed 4");
  CHECK(r.exit_code == 0);
  // worst case on detgrid5 is the full cap of step penalties
  double mean = 0.0;
  REQUIRE(std::sscanf(r.output.c_str(), "episodes %*d mean %lf", &mean) == 1);
  CHECK(mean >= -1.0 - 1e-9);
  CHECK(std::isfinite(mean));

  CHECK(run("eval " + ckpt + " --env detgrid5 --episodes 0").exit_code == 2);
  // chain checkpoint dimensions do not fit the grid
  RunResult r2 = run("eval " + ckpt + " --env chain20 --episodes 3");
  CHECK(r2.exit_code == 1);
  CHECK(r2.output.find("does not match") != std::string::npos);
}

TEST_CASE("eval of a trained chain checkpoint matches the train-time final window") {
  const fs::path dir = scratch_dir("cli_eval_trained");
  REQUIRE(run("train --env chain20 --mode ppo --seed 0 --total-steps 120000 --quiet --out-dir " +
              (dir / "run").string()).exit_code == 0);
  const auto csv = parse_csv(read_file(dir / "run" / "metrics.csv"));
  const double final_window = csv.num(csv.rows.size() - 1, "mean_return");
  CHECK(final_window >= 0.9);  // converged run

  RunResult r = run("eval " + (dir / "run" / "final.ckpt").string() +
                    " --env chain20 --episodes 200 --seed 11 --stochastic");
  CHECK(r.exit_code == 0);
  double mean = 0.0;
  REQUIRE(std::sscanf(r.output.c_str(), "episodes %*d mean %lf", &mean) == 1);
  CHECK(std::abs(mean - final_window) <= 0.15);

  // greedy evaluation of the converged policy is exactly optimal
  RunResult g = run("eval " + (dir / "run" / "final.ckpt").string() +
                    " --env chain20 --episodes 5 --seed 11");
  double gmean = 0.0;
  REQUIRE(std::sscanf(g.output.c_str(), "episodes %*d mean %lf", &gmean) == 1);
  CHECK(gmean == 1.0);
}

TEST_CASE("dump-targets: fixed header, row count, determinism") {
  const fs::path dir = scratch_dir("cli_dump");
  REQUIRE(run("train --env detgrid5 --mode pome --seed 2 --total-steps 1024 --quiet --out-dir " +
              (dir / "run").string()).exit_code == 0);
  const std::string ckpt = (dir / "run" / "final.ckpt").string();

  const std::string out1 = (dir / "t1.csv").string();
  const std::string out2 = (dir / "t2.csv").string();
  CHECK(run("dump-targets " + ckpt + " --env detgrid5 --steps 96 --workers 2 --seed 5 --out " + out1)
            .exit_code == 0);
  CHECK(run("dump-targets " + ckpt + " --env detgrid5 --steps 96 --workers 2 --seed 5 --out " + out2)
            .exit_code == 0);
  const std::string text = read_file(out1);
  CHECK(text == read_file(out2));

  const auto csv = parse_csv(text);
  REQUIRE(csv.header.size() == 11);
  CHECK(csv.header[0] == "t");
  CHECK(csv.header[6] == "epsilon");
  CHECK(csv.rows.size() == 192);
  // per-row sanity: epsilon = |q_b - q_f|
  for (std::size_t i = 0; i < csv.rows.size(); i += 17) {
    const double qf = csv.num(i, "q_star_f");
    const double qb = csv.num(i, "q_star_b");
    CHECK(pome::testing::close(csv.num(i, "epsilon"), std::abs(qb - qf), 1e-9));
  }
}

TEST_CASE("dump-targets on a converged detgrid model: epsilon column is near zero") {
  // Train the dynamics standalone (fast), pair it with a fresh actor-critic,
  // write a checkpoint, and inspect the dump the CLI produces from it.
  const fs::path dir = scratch_dir("cli_dump_converged");
  auto env = pome::make_env("detgrid5");
  const pome::EnvSpec& spec = env->spec();
  const pome::DynamicsModel dyn = pome::DynamicsModel::make(spec);
  const pome::PolicyValueNet net = pome::PolicyValueNet::make(spec);
  pome::Rng rng(pome::derive_stream_seed(8, 2));
  pome::ParamSet params;
  net.init_params(params, rng);
  dyn.init_params(params, rng);
  pome::AdamState adam = pome::AdamState::init(params);

  // replay of uniform-random transitions
  pome::TransitionBatch replay;
  {
    pome::Rng arng(15);
    const int count = 4096;
    replay.inputs = pome::Array::zeros({count, 29});
    replay.rewards = pome::Array::zeros({count});
    replay.next_obs_scaled = pome::Array::zeros({count, 25});
    replay.done.resize(count);
    std::vector<double> obs = env->reset(15);
    for (int i = 0; i < count; ++i) {
      const int a = arng.below(4);
      const std::vector<double> in = pome::model_input(spec, obs, a);
      std::copy(in.begin(), in.end(), replay.inputs.data.begin() + static_cast<std::ptrdiff_t>(i) * 29);
      pome::StepResult r = env->step(a);
      replay.rewards.data[static_cast<std::size_t>(i)] = r.reward;
      std::copy(r.observation.begin(), r.observation.end(),
                replay.next_obs_scaled.data.begin() + static_cast<std::ptrdiff_t>(i) * 25);
      replay.done[static_cast<std::size_t>(i)] = r.done ? 1 : 0;
      obs = r.done ? env->soft_reset() : r.observation;
    }
  }
  pome::Rng idx(5);
  for (int step = 0; step < 2500; ++step) {
    std::vector<int> rows(512);
    for (int& r : rows) r = idx.below(4096);
    pome::TransitionBatch mb;
    mb.inputs = pome::Array::zeros({512, 29});
    mb.rewards = pome::Array::zeros({512});
    mb.next_obs_scaled = pome::Array::zeros({512, 25});
    mb.done.resize(512);
    for (int i = 0; i < 512; ++i) {
      const int r = rows[static_cast<std::size_t>(i)];
      std::copy(replay.inputs.data.begin() + static_cast<std::ptrdiff_t>(r) * 29,
                replay.inputs.data.begin() + static_cast<std::ptrdiff_t>(r + 1) * 29,
                mb.inputs.data.begin() + static_cast<std::ptrdiff_t>(i) * 29);
      mb.rewards.data[static_cast<std::size_t>(i)] = replay.rewards.data[static_cast<std::size_t>(r)];
      std::copy(replay.next_obs_scaled.data.begin() + static_cast<std::ptrdiff_t>(r) * 25,
                replay.next_obs_scaled.data.begin() + static_cast<std::ptrdiff_t>(r + 1) * 25,
                mb.next_obs_scaled.data.begin() + static_cast<std::ptrdiff_t>(i) * 25);
      mb.done[static_cast<std::size_t>(i)] = replay.done[static_cast<std::size_t>(r)];
    }
    pome::Graph g;
    pome::BoundParams bound(g, params);
    pome::ModelLossNodes n = pome::model_losses(g, bound, dyn, mb);
    g.backward(g.add(n.reward_loss, n.transition_loss));
    pome::adam_step(params, bound.gradients(g), adam, 1e-3);
  }
  pome::save_checkpoint((dir / "model.ckpt").string(), params);

  const std::string out = (dir / "targets.csv").string();
  REQUIRE(run("dump-targets " + (dir / "model.ckpt").string() +
              " --env detgrid5 --steps 256 --seed 3 --out " + out).exit_code == 0);
  const auto csv = parse_csv(read_file(out));
  REQUIRE(csv.rows.size() == 256);
  double mean_eps = 0.0, max_eps = 0.0;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const double e = csv.num(i, "epsilon");
    mean_eps += e;
    max_eps = std::max(max_eps, e);
  }
  mean_eps /= static_cast<double>(csv.rows.size());
  CHECK(mean_eps <= 0.01);
  CHECK(max_eps <= 0.1);
}

TEST_CASE("train accepts the ablation and diagnostics knobs end to end") {
  const fs::path dir = scratch_dir("cli_knobs");
  std::ofstream(dir / "cfg.json")
      << "{\"clipped_bonus\": false, \"adv_norm\": false, \"beta\": 0.1, \"entropy_coef\": 0.01}\n";
  RunResult r = run("train --config " + (dir / "cfg.json").string() +
                    " --env noisycorridor --mode pome --seed 1 --total-steps 2048 "
                    "--median-scope batch --quiet --out-dir " + (dir / "run").string());
  CHECK(r.exit_code == 0);
  const auto csv = parse_csv(read_file(dir / "run" / "metrics.csv"));
  CHECK(csv.rows.size() == 2);
  // the raw (unclipped) bonus run still reports finite losses
  CHECK(std::isfinite(csv.num(1, "surrogate_loss")));
  CHECK(std::isfinite(csv.num(1, "approx_kl")));
}

TEST_CASE("compare: grid of cells, aggregate equals the hand average") {
  const fs::path dir = scratch_dir("cli_compare");
  RunResult r = run("compare --env chain20 --modes ppo,pome --seeds 0,1 --total-steps 2048 "
                    "--out-dir " + dir.string());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "compare.csv"));

  for (const char* cell : {"ppo-seed0", "ppo-seed1", "pome-seed0", "pome-seed1"}) {
    CAPTURE(cell);
    CHECK(fs::exists(dir / cell / "metrics.csv"));
  }

  // aggregate = mean of the per-seed final mean_returns
  auto final_return = [&](const std::string& cell) {
    const auto csv = parse_csv(read_file(dir / cell / "metrics.csv"));
    return csv.num(csv.rows.size() - 1, "mean_return");
  };
  const auto agg = parse_csv(read_file(dir / "compare.csv"));
  REQUIRE(agg.rows.size() == 2);
  const double ppo_mean = (final_return("ppo-seed0") + final_return("ppo-seed1")) / 2.0;
  const double pome_mean = (final_return("pome-seed0") + final_return("pome-seed1")) / 2.0;
  CHECK(pome::testing::close(agg.num(0, "mean_final_return"), ppo_mean, 1e-9));
  CHECK(pome::testing::close(agg.num(1, "mean_final_return"), pome_mean, 1e-9));
}
