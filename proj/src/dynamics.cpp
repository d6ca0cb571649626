#include "pome/dynamics.hpp"

#include <cmath>

#include "pome/error.hpp"

namespace pome {

DynamicsModel DynamicsModel::make(const EnvSpec& env) {
  const int in = env.observation_dim + env.action_count;
  DynamicsModel m;
  m.reward_net = MlpSpec{{in, kHiddenWidth, 1}, {Activation::kRelu, Activation::kIdentity}};
  m.transition_net =
      MlpSpec{{in, kHiddenWidth, env.observation_dim}, {Activation::kRelu, Activation::kSigmoid}};
  return m;
}

namespace {

// Sparse pair-coding init. One-hot (observation, action) inputs give a
// hidden pre-activation of two weight-row entries plus the bias; a large
// gain with a negative bias makes each relu unit fire for only ~10% of the
// input pairs, so patterns barely share units. Without this, the usual
// small-weight init lets the cold-target majority drag some pattern's hot
// sigmoid logit below recovery (the MSE gradient vanishes once saturated on
// the wrong side) and L_T floors instead of converging. Zero output weights
// keep every logit at the output bias until the gradient, not the init,
// moves it.
void init_sparse_regression_net(ParamSet& params, const std::string& prefix, const MlpSpec& spec,
                                double output_bias, Rng& rng) {
  const double hidden_gain = 6.0 * std::sqrt(2.0);
  params.add(prefix + "/W0", orthogonal(spec.widths[0], spec.widths[1], hidden_gain, rng));
  params.add(prefix + "/b0", Array::full({spec.widths[1]}, -2.0));
  params.add(prefix + "/W1", Array::zeros({spec.widths[1], spec.widths[2]}));
  params.add(prefix + "/b1", Array::full({spec.widths[2]}, output_bias));
}

}  // namespace

void DynamicsModel::init_params(ParamSet& params, Rng& rng) const {
  init_sparse_regression_net(params, kRewardPrefix, reward_net, 0.0, rng);
  // Transition targets are mostly zeros; starting the sigmoid logits at -2
  // puts the initial outputs near the cold side.
  init_sparse_regression_net(params, kTransitionPrefix, transition_net, -2.0, rng);
}

std::vector<double> model_input(const EnvSpec& env, const std::vector<double>& observation,
                                int action) {
  if (action < 0 || action >= env.action_count)
    throw ContractError("model_input: action out of range");
  std::vector<double> scaled = scale_observation(env, observation);
  scaled.resize(static_cast<std::size_t>(env.observation_dim + env.action_count), 0.0);
  scaled[static_cast<std::size_t>(env.observation_dim + action)] = 1.0;
  return scaled;
}

Array model_input_batch(const EnvSpec& env, const std::vector<std::vector<double>>& observations,
                        const std::vector<int>& actions) {
  if (observations.size() != actions.size())
    throw ShapeError("model_input_batch: observation/action count mismatch");
  const int m = static_cast<int>(observations.size());
  const int width = env.observation_dim + env.action_count;
  Array out = Array::zeros({m, width});
  for (int i = 0; i < m; ++i) {
    const std::vector<double> row = model_input(env, observations[static_cast<std::size_t>(i)],
                                                actions[static_cast<std::size_t>(i)]);
    std::copy(row.begin(), row.end(), out.data.begin() + static_cast<std::ptrdiff_t>(i) * width);
  }
  return out;
}

double predict_reward(const ParamSet& params, const DynamicsModel& model, const EnvSpec& env,
                      const std::vector<double>& observation, int action) {
  Array in({1, env.observation_dim + env.action_count}, model_input(env, observation, action));
  Array out = mlp_eval(params, DynamicsModel::kRewardPrefix, model.reward_net, in);
  if (!out.all_finite()) throw DivergenceError("reward model produced non-finite output");
  return out.data[0];
}

std::vector<double> predict_transition(const ParamSet& params, const DynamicsModel& model,
                                       const EnvSpec& env, const std::vector<double>& observation,
                                       int action) {
  Array in({1, env.observation_dim + env.action_count}, model_input(env, observation, action));
  Array out = mlp_eval(params, DynamicsModel::kTransitionPrefix, model.transition_net, in);
  if (!out.all_finite()) throw DivergenceError("transition model produced non-finite output");
  return out.data;
}

ModelLossNodes model_losses(Graph& g, const BoundParams& bound, const DynamicsModel& model,
                            const TransitionBatch& batch) {
  const int m = batch.size();
  if (m == 0) throw ContractError("model_losses: empty batch");
  if (static_cast<int>(batch.done.size()) != m || batch.rewards.size() != m ||
      batch.next_obs_scaled.rows() != m)
    throw ShapeError("model_losses: batch arrays disagree on length");

  NodeId input = g.leaf(batch.inputs);

  // The reward is genuine dynamics on every row, terminal or not; the
  // recorded next observation on a done row is the auto-reset state, so only
  // the transition loss masks those rows out.
  NodeId rhat = g.flatten(mlp_forward(g, bound, DynamicsModel::kRewardPrefix, model.reward_net, input));
  NodeId rerr = g.square(g.sub(rhat, g.leaf(batch.rewards)));
  NodeId reward_loss = g.mean(rerr);

  int kept = 0;
  for (std::uint8_t d : batch.done) kept += d ? 0 : 1;
  NodeId transition_loss;
  if (kept == 0) {
    transition_loss = g.leaf(Array::scalar(0.0));
  } else {
    Array grid_mask = Array::zeros({m, batch.next_obs_scaled.cols()});
    for (int i = 0; i < m; ++i) {
      if (batch.done[static_cast<std::size_t>(i)]) continue;
      for (int j = 0; j < grid_mask.cols(); ++j) grid_mask.at(i, j) = 1.0;
    }
    NodeId that =
        mlp_forward(g, bound, DynamicsModel::kTransitionPrefix, model.transition_net, input);
    NodeId terr = g.square(g.sub(that, g.leaf(batch.next_obs_scaled)));
    transition_loss = g.scale(g.sum(g.mul(terr, g.leaf(grid_mask))), 1.0 / static_cast<double>(kept));
  }

  return {reward_loss, transition_loss};
}

std::pair<double, double> model_losses_value(const ParamSet& params, const DynamicsModel& model,
                                             const TransitionBatch& batch) {
  Graph g;
  BoundParams bound(g, params);
  ModelLossNodes nodes = model_losses(g, bound, model, batch);
  return {g.value(nodes.reward_loss).data[0], g.value(nodes.transition_loss).data[0]};
}

}  // namespace pome
