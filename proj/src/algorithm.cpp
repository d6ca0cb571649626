#include "pome/algorithm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "pome/distributions.hpp"
#include "pome/error.hpp"

namespace pome {

ScheduleKind schedule_from_string(const std::string& s) {
  if (s == "linear_to_zero") return ScheduleKind::kLinearToZero;
  if (s == "constant") return ScheduleKind::kConstant;
  throw ConfigError("unknown schedule: " + s);
}

std::string schedule_to_string(ScheduleKind s) {
  return s == ScheduleKind::kLinearToZero ? "linear_to_zero" : "constant";
}

double schedule(double value0, double progress, ScheduleKind kind) {
  if (progress < 0.0 || progress > 1.0) throw ContractError("schedule: progress outside [0,1]");
  return kind == ScheduleKind::kLinearToZero ? value0 * progress : value0;
}

void TrainConfig::validate() const {
  if (gamma <= 0.0 || gamma > 1.0) throw ConfigError("gamma must be in (0,1]");
  if (lambda <= 0.0 || lambda > 1.0) throw ConfigError("lambda must be in (0,1]");
  if (alpha0 < 0.0) throw ConfigError("alpha0 must be >= 0");
  if (clip_ratio <= 0.0) throw ConfigError("clip_ratio must be > 0");
  if (k < 1) throw ConfigError("k must be >= 1");
  if (n_workers < 1) throw ConfigError("n_workers must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (minibatch_count < 1) throw ConfigError("minibatch_count must be >= 1");
  if (batch_size() % minibatch_count != 0)
    throw ConfigError("k*n_workers must be divisible by minibatch_count");
  if (total_timesteps < 1) throw ConfigError("total_timesteps must be >= 1");
  if (c_v < 0.0 || c_t < 0.0 || c_r < 0.0) throw ConfigError("loss weights must be >= 0");
  if (beta < 0.0 || entropy_coef < 0.0) throw ConfigError("beta/entropy_coef must be >= 0");
  if (lr0 <= 0.0) throw ConfigError("lr0 must be > 0");
}

namespace {

// Seed-stream tags; spreading sub-streams this way keeps every consumer
// independent of the others' draw counts.
constexpr std::uint64_t kEnvStreamTag = 1;
constexpr std::uint64_t kInitStreamTag = 2;
constexpr std::uint64_t kActionStreamTag = 3;
constexpr std::uint64_t kShuffleStreamTag = 4;

Array stack_rows(const std::vector<std::vector<double>>& rows) {
  const int m = static_cast<int>(rows.size());
  const int n = m > 0 ? static_cast<int>(rows.front().size()) : 0;
  Array out = Array::zeros({m, n});
  for (int i = 0; i < m; ++i)
    std::copy(rows[static_cast<std::size_t>(i)].begin(), rows[static_cast<std::size_t>(i)].end(),
              out.data.begin() + static_cast<std::ptrdiff_t>(i) * n);
  return out;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

namespace {
TrainConfig validated(TrainConfig c) {
  c.validate();
  return c;
}
}  // namespace

Trainer::Trainer(TrainConfig config)
    : config_(validated(std::move(config))),
      venv_(config_.env_id, config_.env_params, config_.n_workers,
            derive_stream_seed(config_.seed, kEnvStreamTag)),
      net_(PolicyValueNet::make(venv_.spec())),
      dyn_(DynamicsModel::make(venv_.spec())),
      action_rng_(derive_stream_seed(config_.seed, kActionStreamTag)),
      shuffle_rng_(derive_stream_seed(config_.seed, kShuffleStreamTag)) {
  Rng init_rng(derive_stream_seed(config_.seed, kInitStreamTag));
  net_.init_params(params_, init_rng);
  dyn_.init_params(params_, init_rng);
  adam_ = AdamState::init(params_);
  obs_ = venv_.reset(derive_stream_seed(config_.seed, kEnvStreamTag));
}

double Trainer::progress() const {
  const double f = 1.0 - static_cast<double>(steps_done_) / static_cast<double>(config_.total_timesteps);
  return std::clamp(f, 0.0, 1.0);
}

RolloutBlock collect_rollout(VecEnv& venv, std::vector<std::vector<double>>& obs,
                             const ParamSet& params, const PolicyValueNet& net, int length,
                             Rng& action_rng) {
  const int w = venv.n_workers();
  const EnvSpec& spec = venv.spec();

  RolloutBlock block;
  block.segments.assign(static_cast<std::size_t>(w), Segment{});
  for (Segment& s : block.segments) {
    s.observations.reserve(static_cast<std::size_t>(length));
    s.old_logits = Array::zeros({length, spec.action_count});
  }

  for (int t = 0; t < length; ++t) {
    const std::vector<int> states = venv.state_indices();
    PolicyValueOut out = policy_value_eval(params, net, stack_rows(obs));
    check_finite(out.logits, "policy logits");

    std::vector<int> actions(static_cast<std::size_t>(w));
    for (int i = 0; i < w; ++i) {
      Array row({spec.action_count},
                std::vector<double>(out.logits.data.begin() + static_cast<std::ptrdiff_t>(i) * spec.action_count,
                                    out.logits.data.begin() + static_cast<std::ptrdiff_t>(i + 1) * spec.action_count));
      const int a = sample_categorical(row, action_rng);
      actions[static_cast<std::size_t>(i)] = a;

      Segment& seg = block.segments[static_cast<std::size_t>(i)];
      seg.observations.push_back(obs[static_cast<std::size_t>(i)]);
      seg.actions.push_back(a);
      seg.values.push_back(out.values[static_cast<std::size_t>(i)]);
      seg.logprobs.push_back(categorical_logprob(row, a));
      seg.state_indices.push_back(states[static_cast<std::size_t>(i)]);
      for (int j = 0; j < spec.action_count; ++j) seg.old_logits.at(t, j) = row.data[static_cast<std::size_t>(j)];
    }

    const std::vector<StepResult> results = venv.vec_step(actions);
    for (int i = 0; i < w; ++i) {
      const StepResult& r = results[static_cast<std::size_t>(i)];
      Segment& seg = block.segments[static_cast<std::size_t>(i)];
      seg.rewards.push_back(r.reward);
      seg.dones.push_back(r.done ? 1 : 0);
      seg.next_observations.push_back(r.observation);
      if (r.episode_return) block.completed_episode_returns.push_back(*r.episode_return);
      obs[static_cast<std::size_t>(i)] = r.observation;
    }
  }

  // V_old(s_{t+1}): observations shift by one step, the last one bootstraps
  // on the post-segment state.
  const std::vector<double> boot = value_eval(params, net, stack_rows(obs));
  for (int i = 0; i < w; ++i) {
    Segment& seg = block.segments[static_cast<std::size_t>(i)];
    seg.next_values.resize(static_cast<std::size_t>(length));
    for (int t = 0; t + 1 < length; ++t)
      seg.next_values[static_cast<std::size_t>(t)] = seg.values[static_cast<std::size_t>(t) + 1];
    seg.next_values[static_cast<std::size_t>(length) - 1] = boot[static_cast<std::size_t>(i)];
  }
  return block;
}

std::vector<TargetInputs> segments_to_target_inputs(const std::vector<Segment>& segments,
                                                    const ParamSet& params,
                                                    const PolicyValueNet& net,
                                                    const DynamicsModel& dyn,
                                                    const EnvSpec& spec) {
  const int w = static_cast<int>(segments.size());
  const int k = segments.front().length();

  // Batched model predictions over the whole segment block.
  std::vector<std::vector<double>> all_obs;
  std::vector<int> all_actions;
  all_obs.reserve(static_cast<std::size_t>(w * k));
  for (const Segment& seg : segments) {
    all_obs.insert(all_obs.end(), seg.observations.begin(), seg.observations.end());
    all_actions.insert(all_actions.end(), seg.actions.begin(), seg.actions.end());
  }
  const Array model_in = model_input_batch(spec, all_obs, all_actions);
  const Array pred_r = mlp_eval(params, DynamicsModel::kRewardPrefix, dyn.reward_net, model_in);
  const Array pred_next =
      mlp_eval(params, DynamicsModel::kTransitionPrefix, dyn.transition_net, model_in);
  check_finite(pred_r, "reward model output");
  check_finite(pred_next, "transition model output");
  // The predicted observation feeds the value net directly (observation
  // bounds are [0,1] for every built-in, so scaled == raw).
  const std::vector<double> pred_values = value_eval(params, net, pred_next);

  std::vector<TargetInputs> inputs(static_cast<std::size_t>(w));
  for (int i = 0; i < w; ++i) {
    const Segment& seg = segments[static_cast<std::size_t>(i)];
    TargetInputs& in = inputs[static_cast<std::size_t>(i)];
    in.rewards = seg.rewards;
    in.dones = seg.dones;
    in.values = seg.values;
    in.next_values = seg.next_values;
    in.pred_rewards.assign(pred_r.data.begin() + static_cast<std::ptrdiff_t>(i) * k,
                           pred_r.data.begin() + static_cast<std::ptrdiff_t>(i + 1) * k);
    in.pred_next_values.assign(pred_values.begin() + static_cast<std::ptrdiff_t>(i) * k,
                               pred_values.begin() + static_cast<std::ptrdiff_t>(i + 1) * k);
  }
  return inputs;
}

void Trainer::collect() {
  RolloutBlock block = collect_rollout(venv_, obs_, params_, net_, config_.k, action_rng_);
  last_segments_ = std::move(block.segments);
  for (double ret : block.completed_episode_returns) {
    episode_window_.push_back(ret);
    if (episode_window_.size() > kEpisodeWindow) episode_window_.pop_front();
    episodes_completed_ += 1;
  }
}

std::vector<TargetInputs> Trainer::build_target_inputs() {
  return segments_to_target_inputs(last_segments_, params_, net_, dyn_, venv_.spec());
}

LossBatch Trainer::assemble_batch() const {
  const int w = config_.n_workers;
  const int k = config_.k;
  const int b = config_.batch_size();
  const EnvSpec& spec = venv_.spec();

  LossBatch batch;
  batch.obs = Array::zeros({b, spec.observation_dim});
  batch.old_logits = Array::zeros({b, spec.action_count});
  batch.actions.reserve(static_cast<std::size_t>(b));
  batch.old_logprobs.reserve(static_cast<std::size_t>(b));
  batch.advantages.resize(static_cast<std::size_t>(b));
  batch.value_targets.resize(static_cast<std::size_t>(b));

  batch.transitions.rewards = Array::zeros({b});
  batch.transitions.next_obs_scaled = Array::zeros({b, spec.observation_dim});
  batch.transitions.done.resize(static_cast<std::size_t>(b));

  std::vector<std::vector<double>> all_obs;
  std::vector<int> all_actions;
  all_obs.reserve(static_cast<std::size_t>(b));

  for (int i = 0; i < w; ++i) {
    const Segment& seg = last_segments_[static_cast<std::size_t>(i)];
    for (int t = 0; t < k; ++t) {
      const int row = i * k + t;
      const std::size_t s = static_cast<std::size_t>(t);
      std::copy(seg.observations[s].begin(), seg.observations[s].end(),
                batch.obs.data.begin() + static_cast<std::ptrdiff_t>(row) * spec.observation_dim);
      for (int j = 0; j < spec.action_count; ++j)
        batch.old_logits.at(row, j) = seg.old_logits.at(t, j);
      batch.actions.push_back(seg.actions[s]);
      batch.old_logprobs.push_back(seg.logprobs[s]);

      const std::size_t idx = last_targets_.index(i, t);
      batch.advantages[static_cast<std::size_t>(row)] = last_targets_.advantage[idx];
      batch.value_targets[static_cast<std::size_t>(row)] = last_targets_.value_target[idx];

      batch.transitions.rewards.data[static_cast<std::size_t>(row)] = seg.rewards[s];
      const std::vector<double> scaled = scale_observation(spec, seg.next_observations[s]);
      std::copy(scaled.begin(), scaled.end(),
                batch.transitions.next_obs_scaled.data.begin() +
                    static_cast<std::ptrdiff_t>(row) * spec.observation_dim);
      batch.transitions.done[static_cast<std::size_t>(row)] = seg.dones[s];

      all_obs.push_back(seg.observations[s]);
      all_actions.push_back(seg.actions[s]);
    }
  }
  batch.transitions.inputs = model_input_batch(spec, all_obs, all_actions);

  if (config_.adv_norm) {
    double mean = 0.0;
    for (double a : batch.advantages) mean += a;
    mean /= static_cast<double>(b);
    double var = 0.0;
    for (double a : batch.advantages) var += (a - mean) * (a - mean);
    var /= static_cast<double>(b);
    const double denom = std::sqrt(var) + 1e-8;
    for (double& a : batch.advantages) a = (a - mean) / denom;
  }
  return batch;
}

LossBatch Trainer::slice_batch(const LossBatch& full, const std::vector<int>& rows) const {
  const EnvSpec& spec = venv_.spec();
  const int m = static_cast<int>(rows.size());
  LossBatch out;
  out.obs = Array::zeros({m, spec.observation_dim});
  out.old_logits = Array::zeros({m, spec.action_count});
  out.transitions.inputs = Array::zeros({m, full.transitions.inputs.cols()});
  out.transitions.rewards = Array::zeros({m});
  out.transitions.next_obs_scaled = Array::zeros({m, spec.observation_dim});
  out.transitions.done.resize(static_cast<std::size_t>(m));
  out.actions.resize(static_cast<std::size_t>(m));
  out.old_logprobs.resize(static_cast<std::size_t>(m));
  out.advantages.resize(static_cast<std::size_t>(m));
  out.value_targets.resize(static_cast<std::size_t>(m));

  for (int i = 0; i < m; ++i) {
    const int r = rows[static_cast<std::size_t>(i)];
    const std::size_t si = static_cast<std::size_t>(i);
    const std::size_t sr = static_cast<std::size_t>(r);
    auto copy_row = [&](const Array& src, Array& dst) {
      const int n = src.cols();
      std::copy(src.data.begin() + static_cast<std::ptrdiff_t>(r) * n,
                src.data.begin() + static_cast<std::ptrdiff_t>(r + 1) * n,
                dst.data.begin() + static_cast<std::ptrdiff_t>(i) * n);
    };
    copy_row(full.obs, out.obs);
    copy_row(full.old_logits, out.old_logits);
    copy_row(full.transitions.inputs, out.transitions.inputs);
    copy_row(full.transitions.next_obs_scaled, out.transitions.next_obs_scaled);
    out.transitions.rewards.data[si] = full.transitions.rewards.data[sr];
    out.transitions.done[si] = full.transitions.done[sr];
    out.actions[si] = full.actions[sr];
    out.old_logprobs[si] = full.old_logprobs[sr];
    out.advantages[si] = full.advantages[sr];
    out.value_targets[si] = full.value_targets[sr];
  }
  return out;
}

IterationReport Trainer::iterate() {
  const auto t0 = std::chrono::steady_clock::now();
  const double f = progress();
  const double alpha = schedule(config_.alpha0, f, config_.alpha_schedule);
  const double lr = schedule(config_.lr0, f, config_.lr_schedule);

  collect();

  TargetConfig tc;
  tc.mode = config_.mode;
  tc.alpha = alpha;
  tc.clipped_bonus = config_.clipped_bonus;
  tc.median_scope = config_.median_scope;
  tc.gamma = config_.gamma;
  tc.lambda = config_.lambda;
  last_targets_ = compute_targets(build_target_inputs(), tc);

  const LossBatch full = assemble_batch();

  LossCoefficients coef;
  coef.clip_ratio = config_.clip_ratio;
  coef.beta = config_.beta;
  coef.entropy_coef = config_.entropy_coef;
  coef.c_v = config_.c_v;
  coef.c_t = config_.c_t;
  coef.c_r = config_.c_r;

  double sum_surr = 0.0, sum_vloss = 0.0, sum_lr_ = 0.0, sum_lt = 0.0;
  double sum_kl = 0.0, sum_clipfrac = 0.0;
  int updates = 0;

  std::vector<int> order(static_cast<std::size_t>(config_.batch_size()));
  std::iota(order.begin(), order.end(), 0);
  const int mb_rows = config_.batch_size() / config_.minibatch_count;

  for (int epoch = 0; epoch < config_.epochs; ++epoch) {
    if (config_.minibatch_count > 1) {
      // Fisher-Yates off the shuffle stream.
      for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
        std::swap(order[static_cast<std::size_t>(i)],
                  order[static_cast<std::size_t>(shuffle_rng_.below(i + 1))]);
    }
    for (int mb = 0; mb < config_.minibatch_count; ++mb) {
      LossBatch view;
      const LossBatch* use = &full;
      if (config_.minibatch_count > 1) {
        std::vector<int> rows(order.begin() + static_cast<std::ptrdiff_t>(mb) * mb_rows,
                              order.begin() + static_cast<std::ptrdiff_t>(mb + 1) * mb_rows);
        view = slice_batch(full, rows);
        use = &view;
      }

      Graph g;
      BoundParams bound(g, params_);
      LossNodes nodes;
      try {
        nodes = unified_loss(g, bound, net_, dyn_, *use, coef);
        g.backward(nodes.total);
        adam_step(params_, bound.gradients(g), adam_, lr);
      } catch (const DivergenceError& e) {
        throw DivergenceError("iteration " + std::to_string(iteration_) + ": " + e.what());
      }

      sum_surr += g.value(nodes.surrogate).data[0];
      sum_vloss += g.value(nodes.value_loss).data[0];
      sum_lr_ += g.value(nodes.reward_loss).data[0];
      sum_lt += g.value(nodes.transition_loss).data[0];

      // Diagnostics off the freshly evaluated nodes.
      const Array& ratio = g.value(nodes.ratio);
      int clipped = 0;
      for (double r : ratio.data)
        if (std::abs(r - 1.0) > config_.clip_ratio) clipped += 1;
      sum_clipfrac += static_cast<double>(clipped) / static_cast<double>(ratio.size());

      const Array& new_logits = g.value(nodes.new_logits);
      const int n_act = new_logits.cols();
      double kl = 0.0;
      for (int i = 0; i < new_logits.rows(); ++i) {
        Array po({n_act}, std::vector<double>(
                              use->old_logits.data.begin() + static_cast<std::ptrdiff_t>(i) * n_act,
                              use->old_logits.data.begin() + static_cast<std::ptrdiff_t>(i + 1) * n_act));
        Array pn({n_act}, std::vector<double>(
                              new_logits.data.begin() + static_cast<std::ptrdiff_t>(i) * n_act,
                              new_logits.data.begin() + static_cast<std::ptrdiff_t>(i + 1) * n_act));
        kl += categorical_kl(po, pn);
      }
      sum_kl += kl / static_cast<double>(new_logits.rows());
      updates += 1;
    }
  }

  steps_done_ += config_.batch_size();
  iteration_ += 1;

  IterationReport rep;
  rep.iteration = iteration_;
  rep.total_steps = steps_done_;
  {
    std::vector<double> window(episode_window_.begin(), episode_window_.end());
    rep.mean_return = mean_of(window);
    if (!window.empty()) rep.median_return = median(window);
  }
  rep.surrogate = sum_surr / updates;
  rep.value_loss = sum_vloss / updates;
  rep.reward_model_loss = sum_lr_ / updates;
  rep.transition_model_loss = sum_lt / updates;
  {
    double se = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < last_targets_.rows(); ++i) {
      se += last_targets_.epsilon[i];
      sb += std::abs(last_targets_.delta_pome[i] - last_targets_.delta[i]);
    }
    rep.mean_epsilon = se / static_cast<double>(last_targets_.rows());
    rep.mean_abs_bonus = sb / static_cast<double>(last_targets_.rows());
    rep.eps_bar_mean = mean_of(last_targets_.eps_bar);
  }
  rep.approx_kl = sum_kl / updates;
  rep.clip_fraction = sum_clipfrac / updates;
  rep.alpha = alpha;
  rep.lr = lr;
  rep.episodes_completed = episodes_completed_;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

EvalSummary evaluate(const ParamSet& params, const PolicyValueNet& net, Env& env, int episodes,
                     std::uint64_t seed, bool greedy) {
  if (episodes < 1) throw ContractError("evaluate: episodes must be >= 1");
  Rng sample_rng(derive_stream_seed(seed, 0xE7A1));

  std::vector<double> returns;
  returns.reserve(static_cast<std::size_t>(episodes));
  for (int ep = 0; ep < episodes; ++ep) {
    std::vector<double> obs = env.reset(derive_stream_seed(seed, static_cast<std::uint64_t>(ep)));
    double ret = 0.0;
    while (true) {
      const Array obs_row({1, env.spec().observation_dim}, obs);
      PolicyValueOut out = policy_value_eval(params, net, obs_row);
      Array logits({env.spec().action_count}, out.logits.data);
      int action = 0;
      if (greedy) {
        for (int j = 1; j < env.spec().action_count; ++j)
          if (logits.data[static_cast<std::size_t>(j)] > logits.data[static_cast<std::size_t>(action)])
            action = j;
      } else {
        action = sample_categorical(logits, sample_rng);
      }
      const StepResult r = env.step(action);
      ret += r.reward;
      obs = r.observation;
      if (r.done) break;
    }
    returns.push_back(ret);
  }

  EvalSummary s;
  s.episodes = episodes;
  s.mean = mean_of(returns);
  s.median = median(returns);
  double var = 0.0;
  for (double r : returns) var += (r - s.mean) * (r - s.mean);
  s.stddev = returns.size() > 1 ? std::sqrt(var / static_cast<double>(returns.size() - 1)) : 0.0;
  return s;
}

}  // namespace pome
