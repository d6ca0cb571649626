#ifndef POME_POLICY_HPP_
#define POME_POLICY_HPP_

#include <vector>

#include "pome/dynamics.hpp"
#include "pome/env.hpp"
#include "pome/graph.hpp"
#include "pome/nn.hpp"

namespace pome {

// Shared-trunk actor-critic: a tanh trunk feeding a linear policy head
// (logits) and a linear value head. The dynamics nets are separate; nothing
// of the trunk is shared with them.
struct PolicyValueNet {
  MlpSpec trunk;        // obs -> 64 -> 64, tanh
  MlpSpec policy_head;  // 64 -> action_count, identity
  MlpSpec value_head;   // 64 -> 1, identity

  static constexpr int kTrunkWidth = 64;
  static constexpr const char* kTrunkPrefix = "trunk";
  static constexpr const char* kPolicyPrefix = "pi";
  static constexpr const char* kValuePrefix = "vf";

  static PolicyValueNet make(const EnvSpec& env);
  // Policy head gets gain 0.01 so the initial policy is near uniform.
  void init_params(ParamSet& params, Rng& rng) const;
};

struct PolicyValueNodes {
  NodeId logits;  // [m, action_count]
  NodeId values;  // [m]
};

PolicyValueNodes policy_value_forward(Graph& g, const BoundParams& bound,
                                      const PolicyValueNet& net, NodeId input);

struct PolicyValueOut {
  Array logits;                // [m, action_count]
  std::vector<double> values;  // m
};

PolicyValueOut policy_value_eval(const ParamSet& params, const PolicyValueNet& net,
                                 const Array& obs_batch);
std::vector<double> value_eval(const ParamSet& params, const PolicyValueNet& net,
                               const Array& obs_batch);

// Flattened minibatch for one gradient step. Targets and advantages are
// frozen data: no gradient flows through them.
struct LossBatch {
  Array obs;                          // [m, obs_dim]
  std::vector<int> actions;           // m
  Array old_logits;                   // [m, action_count]
  std::vector<double> old_logprobs;   // m
  std::vector<double> advantages;     // m (already normalized if enabled)
  std::vector<double> value_targets;  // m
  TransitionBatch transitions;

  int size() const { return obs.rows(); }
};

struct LossCoefficients {
  double clip_ratio = 0.2;
  double beta = 0.0;          // KL penalty weight
  double entropy_coef = 0.0;
  double c_v = 1.0;
  double c_t = 2.0;
  double c_r = 2.0;
};

struct LossNodes {
  NodeId total;            // minimized
  NodeId surrogate;        // clipped-ratio objective (maximized, so enters negated)
  NodeId value_loss;
  NodeId reward_loss;
  NodeId transition_loss;
  NodeId ratio;            // [m], diagnostics
  NodeId new_logits;       // [m, action_count], diagnostics
};

// Clipped-ratio surrogate alone: mean over the batch of
// min(ratio * A, clip(ratio, 1-eps, 1+eps) * A) with ratio from fresh
// log-probs against the stored old ones.
LossNodes surrogate_only(Graph& g, const BoundParams& bound, const PolicyValueNet& net,
                         const LossBatch& batch, double clip_ratio);

// Full unified objective:
//   total = -(surrogate - beta*KL + entropy_coef*entropy)
//           + c_v * L_v + c_T * L_T + c_r * L_r
// The KL and entropy nodes are only built when their coefficients are
// nonzero. Throws DivergenceError when the ratio or total goes non-finite.
LossNodes unified_loss(Graph& g, const BoundParams& bound, const PolicyValueNet& net,
                       const DynamicsModel& dyn, const LossBatch& batch,
                       const LossCoefficients& coef);

}  // namespace pome

#endif  // POME_POLICY_HPP_
