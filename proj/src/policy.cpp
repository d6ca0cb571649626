#include "pome/policy.hpp"

#include <cmath>

#include "pome/error.hpp"

namespace pome {

PolicyValueNet PolicyValueNet::make(const EnvSpec& env) {
  PolicyValueNet n;
  n.trunk = MlpSpec{{env.observation_dim, kTrunkWidth, kTrunkWidth},
                    {Activation::kTanh, Activation::kTanh}};
  n.policy_head = MlpSpec{{kTrunkWidth, env.action_count}, {Activation::kIdentity}};
  n.value_head = MlpSpec{{kTrunkWidth, 1}, {Activation::kIdentity}};
  return n;
}

void PolicyValueNet::init_params(ParamSet& params, Rng& rng) const {
  init_mlp(params, kTrunkPrefix, trunk, std::sqrt(2.0), rng);
  init_mlp(params, kPolicyPrefix, policy_head, 0.01, rng);
  init_mlp(params, kValuePrefix, value_head, 1.0, rng);
}

PolicyValueNodes policy_value_forward(Graph& g, const BoundParams& bound,
                                      const PolicyValueNet& net, NodeId input) {
  NodeId h = mlp_forward(g, bound, PolicyValueNet::kTrunkPrefix, net.trunk, input);
  NodeId logits = mlp_forward(g, bound, PolicyValueNet::kPolicyPrefix, net.policy_head, h);
  NodeId values = g.flatten(mlp_forward(g, bound, PolicyValueNet::kValuePrefix, net.value_head, h));
  return {logits, values};
}

PolicyValueOut policy_value_eval(const ParamSet& params, const PolicyValueNet& net,
                                 const Array& obs_batch) {
  Graph g;
  BoundParams bound(g, params);
  PolicyValueNodes nodes = policy_value_forward(g, bound, net, g.leaf(obs_batch));
  return {g.value(nodes.logits), g.value(nodes.values).data};
}

std::vector<double> value_eval(const ParamSet& params, const PolicyValueNet& net,
                               const Array& obs_batch) {
  return policy_value_eval(params, net, obs_batch).values;
}

namespace {

LossNodes policy_terms(Graph& g, const BoundParams& bound, const PolicyValueNet& net,
                       const LossBatch& batch, double clip_ratio) {
  const int m = batch.size();
  if (m == 0) throw ContractError("loss: empty batch");
  if (static_cast<int>(batch.actions.size()) != m ||
      static_cast<int>(batch.old_logprobs.size()) != m ||
      static_cast<int>(batch.advantages.size()) != m)
    throw ShapeError("loss: batch arrays disagree on length");

  PolicyValueNodes pv = policy_value_forward(g, bound, net, g.leaf(batch.obs));
  NodeId logp_rows = g.log_softmax_rows(pv.logits);
  NodeId logp_taken = g.gather_rows(logp_rows, batch.actions);
  NodeId ratio = g.exp_(g.sub(logp_taken, g.leaf(Array::vec(batch.old_logprobs))));
  if (!g.value(ratio).all_finite())
    throw DivergenceError("surrogate: non-finite probability ratio");

  NodeId adv = g.leaf(Array::vec(batch.advantages));
  NodeId unclipped = g.mul(ratio, adv);
  NodeId clipped = g.mul(g.clip(ratio, 1.0 - clip_ratio, 1.0 + clip_ratio), adv);
  NodeId surrogate = g.mean(g.min_elem(unclipped, clipped));

  LossNodes out{};
  out.surrogate = surrogate;
  out.ratio = ratio;
  out.new_logits = pv.logits;
  out.value_loss = g.mean(g.square(g.sub(g.leaf(Array::vec(batch.value_targets)), pv.values)));
  return out;
}

}  // namespace

LossNodes surrogate_only(Graph& g, const BoundParams& bound, const PolicyValueNet& net,
                         const LossBatch& batch, double clip_ratio) {
  LossNodes nodes = policy_terms(g, bound, net, batch, clip_ratio);
  nodes.total = g.scale(nodes.surrogate, -1.0);
  return nodes;
}

LossNodes unified_loss(Graph& g, const BoundParams& bound, const PolicyValueNet& net,
                       const DynamicsModel& dyn, const LossBatch& batch,
                       const LossCoefficients& coef) {
  LossNodes nodes = policy_terms(g, bound, net, batch, coef.clip_ratio);
  const int m = batch.size();

  // Policy objective (to maximize): surrogate - beta*KL + entropy bonus.
  NodeId objective = nodes.surrogate;
  if (coef.beta != 0.0) {
    // Old distribution enters as constants.
    Array old_p = batch.old_logits;
    Array old_logp = batch.old_logits;
    for (int i = 0; i < m; ++i) {
      const int n = batch.old_logits.cols();
      double mx = old_logp.at(i, 0);
      for (int j = 1; j < n; ++j) mx = std::max(mx, old_logp.at(i, j));
      double lse = 0.0;
      for (int j = 0; j < n; ++j) lse += std::exp(old_logp.at(i, j) - mx);
      lse = std::log(lse) + mx;
      for (int j = 0; j < n; ++j) {
        old_logp.at(i, j) -= lse;
        old_p.at(i, j) = std::exp(old_logp.at(i, j));
      }
    }
    NodeId new_logp_rows = g.log_softmax_rows(nodes.new_logits);
    NodeId kl = g.scale(g.sum(g.mul(g.leaf(old_p), g.sub(g.leaf(old_logp), new_logp_rows))),
                        1.0 / static_cast<double>(m));
    objective = g.sub(objective, g.scale(kl, coef.beta));
  }
  if (coef.entropy_coef != 0.0) {
    NodeId logp_rows = g.log_softmax_rows(nodes.new_logits);
    NodeId entropy = g.scale(g.sum(g.mul(g.exp_(logp_rows), logp_rows)),
                             -1.0 / static_cast<double>(m));
    objective = g.add(objective, g.scale(entropy, coef.entropy_coef));
  }

  ModelLossNodes model = model_losses(g, bound, dyn, batch.transitions);
  nodes.reward_loss = model.reward_loss;
  nodes.transition_loss = model.transition_loss;

  NodeId total = g.scale(objective, -1.0);
  total = g.add(total, g.scale(nodes.value_loss, coef.c_v));
  total = g.add(total, g.scale(nodes.transition_loss, coef.c_t));
  total = g.add(total, g.scale(nodes.reward_loss, coef.c_r));
  nodes.total = total;

  if (!g.value(total).all_finite()) {
    throw DivergenceError(
        "unified loss non-finite (surrogate=" + std::to_string(g.value(nodes.surrogate).data[0]) +
        " value=" + std::to_string(g.value(nodes.value_loss).data[0]) +
        " L_r=" + std::to_string(g.value(nodes.reward_loss).data[0]) +
        " L_T=" + std::to_string(g.value(nodes.transition_loss).data[0]) + ")");
  }
  return nodes;
}

}  // namespace pome
