#ifndef POME_ENV_HPP_
#define POME_ENV_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pome/rng.hpp"

namespace pome {

struct EnvSpec {
  int observation_dim = 0;
  int action_count = 0;
  // Per-dimension [low, high]; finite with low < high so observations can be
  // scaled into [0,1] for the transition-model targets.
  std::vector<std::pair<double, double>> observation_bounds;
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
  // Return of the episode that just finished; set only when done.
  std::optional<double> episode_return;
};

// Discrete-action environment. All built-ins are small tabular MDPs with
// one-hot observations; (seed, action sequence) fully determines the stream.
class Env {
 public:
  virtual ~Env() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  // Starts a new episode without reseeding; the env's random stream carries
  // on. Used by the vectorized wrapper's auto-reset.
  virtual std::vector<double> soft_reset() = 0;
  virtual StepResult step(int action) = 0;
  // Tabular state index of the current state (diagnostics, value iteration).
  virtual int state_index() const = 0;
  virtual int state_count() const = 0;
  virtual std::string id() const = 0;
};

struct EnvParams {
  int chain_length = 20;
  bool chain_trap_reward = true;  // false: zero-reward-until-goal variant
  int episode_cap = 0;            // 0 = per-environment default
};

// Known ids: "chain20", "detgrid5", "noisycorridor".
std::unique_ptr<Env> make_env(const std::string& id, const EnvParams& params = {});

// Scales an observation into [0,1] per the declared bounds.
std::vector<double> scale_observation(const EnvSpec& spec, const std::vector<double>& obs);

}  // namespace pome

#endif  // POME_ENV_HPP_
