#ifndef POME_VEC_ENV_HPP_
#define POME_VEC_ENV_HPP_

#include <functional>
#include <memory>
#include <vector>

#include "pome/env.hpp"

namespace pome {

// Synchronous vector of independent worker environments. Workers never share
// state; results come back in worker order, so the caller sees the same
// stream no matter how the stepping is scheduled. A worker that finishes an
// episode is reset immediately and its StepResult carries the new episode's
// initial observation plus the finished episode's return.
class VecEnv {
 public:
  VecEnv(const std::string& env_id, const EnvParams& params, int n_workers,
         std::uint64_t base_seed);

  int n_workers() const { return static_cast<int>(envs_.size()); }
  const EnvSpec& spec() const { return envs_.front()->spec(); }
  const Env& worker(int i) const { return *envs_[static_cast<std::size_t>(i)]; }

  // Re-derives every worker stream from (base_seed, worker index).
  std::vector<std::vector<double>> reset(std::uint64_t base_seed);

  // One synchronous step; actions.size() must equal n_workers().
  std::vector<StepResult> vec_step(const std::vector<int>& actions);

  // Tabular state index per worker, captured before stepping (diagnostics).
  std::vector<int> state_indices() const;

 private:
  std::vector<std::unique_ptr<Env>> envs_;
};

}  // namespace pome

#endif  // POME_VEC_ENV_HPP_
