#ifndef POME_DYNAMICS_HPP_
#define POME_DYNAMICS_HPP_

#include <vector>

#include "pome/adam.hpp"
#include "pome/env.hpp"
#include "pome/graph.hpp"
#include "pome/nn.hpp"

namespace pome {

// Learned environment model: a reward head r(s,a) with an identity output and
// a transition head T(s,a) with a sigmoid output (next observations live in
// [0,1] after scaling). Both are single-hidden-layer MLPs over the
// concatenated [scaled observation || one-hot action] input.
struct DynamicsModel {
  MlpSpec reward_net;
  MlpSpec transition_net;

  static constexpr int kHiddenWidth = 64;
  static constexpr const char* kRewardPrefix = "rm";
  static constexpr const char* kTransitionPrefix = "tm";

  static DynamicsModel make(const EnvSpec& env);
  void init_params(ParamSet& params, Rng& rng) const;
};

// [scaled observation || one-hot action]; length obs_dim + action_count.
std::vector<double> model_input(const EnvSpec& env, const std::vector<double>& observation,
                                int action);

// Batched model inputs as a matrix, one row per (observation, action) pair.
Array model_input_batch(const EnvSpec& env, const std::vector<std::vector<double>>& observations,
                        const std::vector<int>& actions);

double predict_reward(const ParamSet& params, const DynamicsModel& model, const EnvSpec& env,
                      const std::vector<double>& observation, int action);
std::vector<double> predict_transition(const ParamSet& params, const DynamicsModel& model,
                                       const EnvSpec& env, const std::vector<double>& observation,
                                       int action);

// One (s, a, r, s') regression batch. `next_obs_scaled` rows are the scaled
// actual next observations. Rewards are regressed on every row; `done` rows
// are excluded from the transition loss only, because the recorded next
// observation there is the auto-reset state, not environment dynamics.
struct TransitionBatch {
  Array inputs;           // [m, obs_dim + action_count]
  Array rewards;          // [m]
  Array next_obs_scaled;  // [m, obs_dim]
  std::vector<std::uint8_t> done;

  int size() const { return inputs.rows(); }
};

struct ModelLossNodes {
  NodeId reward_loss;      // L_r, mean squared reward error over kept rows
  NodeId transition_loss;  // L_T, mean squared next-state L2 error over kept rows
};

// Builds both regression losses on the graph. Throws ContractError on an
// empty batch; if every row is masked the losses are constant zero.
ModelLossNodes model_losses(Graph& g, const BoundParams& bound, const DynamicsModel& model,
                            const TransitionBatch& batch);

// Plain (non-graph) loss evaluation, for monitoring a training run.
std::pair<double, double> model_losses_value(const ParamSet& params, const DynamicsModel& model,
                                             const TransitionBatch& batch);

}  // namespace pome

#endif  // POME_DYNAMICS_HPP_
