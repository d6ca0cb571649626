#ifndef POME_ALGORITHM_HPP_
#define POME_ALGORITHM_HPP_

#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "pome/adam.hpp"
#include "pome/dynamics.hpp"
#include "pome/env.hpp"
#include "pome/policy.hpp"
#include "pome/rng.hpp"
#include "pome/targets.hpp"
#include "pome/vec_env.hpp"

namespace pome {

enum class ScheduleKind { kLinearToZero, kConstant };

ScheduleKind schedule_from_string(const std::string& s);
std::string schedule_to_string(ScheduleKind s);

// progress runs 1 -> 0 over training. linear_to_zero: value0 * progress.
double schedule(double value0, double progress, ScheduleKind kind);

struct TrainConfig {
  std::string env_id = "chain20";
  EnvParams env_params;
  Mode mode = Mode::kPome;
  std::uint64_t seed = 0;
  std::int64_t total_timesteps = 300000;
  double gamma = 0.99;
  double lambda = 0.95;
  int k = 128;
  int n_workers = 8;
  double clip_ratio = 0.2;
  double alpha0 = 0.1;
  ScheduleKind alpha_schedule = ScheduleKind::kLinearToZero;
  double beta = 0.0;
  double c_v = 1.0;
  double c_t = 2.0;
  double c_r = 2.0;
  double entropy_coef = 0.0;
  double lr0 = 2.5e-4;
  ScheduleKind lr_schedule = ScheduleKind::kLinearToZero;
  int epochs = 4;
  int minibatch_count = 1;
  bool adv_norm = true;
  MedianScope median_scope = MedianScope::kWorker;
  bool clipped_bonus = true;  // false: raw (unclipped) exploration bonus ablation

  int batch_size() const { return k * n_workers; }
  void validate() const;  // throws ConfigError
};

struct IterationReport {
  int iteration = 0;
  std::int64_t total_steps = 0;
  double mean_return = 0.0;    // trailing window of completed episodes
  double median_return = 0.0;
  double surrogate = 0.0;
  double value_loss = 0.0;
  double reward_model_loss = 0.0;
  double transition_model_loss = 0.0;
  double mean_epsilon = 0.0;
  double eps_bar_mean = 0.0;
  double mean_abs_bonus = 0.0;  // mean |delta_pome - delta|
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  double alpha = 0.0;
  double lr = 0.0;
  double wall_seconds = 0.0;
  int episodes_completed = 0;  // cumulative
};

// One (collect k steps per worker) -> (targets) -> (epochs of minibatch
// updates) cycle per iterate() call. All state is owned; two Trainers with
// identical configs produce identical report streams.
class Trainer {
 public:
  explicit Trainer(TrainConfig config);

  bool finished() const { return steps_done_ >= config_.total_timesteps; }
  IterationReport iterate();

  const TrainConfig& config() const { return config_; }
  const EnvSpec& env_spec() const { return venv_.spec(); }
  const ParamSet& params() const { return params_; }
  ParamSet& mutable_params() { return params_; }
  const PolicyValueNet& net() const { return net_; }
  const DynamicsModel& dynamics() const { return dyn_; }
  const TargetTable& last_targets() const { return last_targets_; }
  const std::vector<Segment>& last_segments() const { return last_segments_; }
  std::int64_t steps_done() const { return steps_done_; }
  double progress() const;  // 1 -> 0

 private:
  void collect();
  std::vector<TargetInputs> build_target_inputs();
  LossBatch assemble_batch() const;
  LossBatch slice_batch(const LossBatch& full, const std::vector<int>& rows) const;

  TrainConfig config_;
  VecEnv venv_;
  PolicyValueNet net_;
  DynamicsModel dyn_;
  ParamSet params_;
  AdamState adam_;
  Rng action_rng_;
  Rng shuffle_rng_;
  std::vector<std::vector<double>> obs_;  // per-worker current observations
  std::vector<Segment> last_segments_;
  TargetTable last_targets_;
  std::deque<double> episode_window_;  // returns of recent completed episodes
  std::int64_t steps_done_ = 0;
  int iteration_ = 0;
  int episodes_completed_ = 0;

  static constexpr int kEpisodeWindow = 100;
};

// On-policy rollout of `length` steps per worker with sampled actions.
// `obs` carries the workers' current observations across blocks.
struct RolloutBlock {
  std::vector<Segment> segments;
  std::vector<double> completed_episode_returns;  // in (t, worker) order
};

RolloutBlock collect_rollout(VecEnv& venv, std::vector<std::vector<double>>& obs,
                             const ParamSet& params, const PolicyValueNet& net, int length,
                             Rng& action_rng);

// Evaluates the model-side quantities (reward predictions, value of the
// predicted next observation) and pairs them with each segment's arrays.
std::vector<TargetInputs> segments_to_target_inputs(const std::vector<Segment>& segments,
                                                    const ParamSet& params,
                                                    const PolicyValueNet& net,
                                                    const DynamicsModel& dyn,
                                                    const EnvSpec& spec);

struct EvalSummary {
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;  // sample standard deviation
  int episodes = 0;
};

// Rolls out `episodes` full episodes; greedy picks argmax logits (lowest
// index on ties), otherwise actions are sampled. Deterministic given seed.
EvalSummary evaluate(const ParamSet& params, const PolicyValueNet& net, Env& env, int episodes,
                     std::uint64_t seed, bool greedy = true);

}  // namespace pome

#endif  // POME_ALGORITHM_HPP_
