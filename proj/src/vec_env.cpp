#include "pome/vec_env.hpp"

#include "pome/error.hpp"

namespace pome {

VecEnv::VecEnv(const std::string& env_id, const EnvParams& params, int n_workers,
               std::uint64_t base_seed) {
  if (n_workers < 1) throw ConfigError("VecEnv needs at least one worker");
  envs_.reserve(static_cast<std::size_t>(n_workers));
  for (int i = 0; i < n_workers; ++i) envs_.push_back(make_env(env_id, params));
  reset(base_seed);
}

std::vector<std::vector<double>> VecEnv::reset(std::uint64_t base_seed) {
  std::vector<std::vector<double>> obs;
  obs.reserve(envs_.size());
  for (std::size_t i = 0; i < envs_.size(); ++i)
    obs.push_back(envs_[i]->reset(derive_stream_seed(base_seed, i)));
  return obs;
}

std::vector<StepResult> VecEnv::vec_step(const std::vector<int>& actions) {
  if (actions.size() != envs_.size())
    throw ContractError("vec_step: expected " + std::to_string(envs_.size()) + " actions, got " +
                        std::to_string(actions.size()));
  std::vector<StepResult> results(envs_.size());
  for (std::size_t i = 0; i < envs_.size(); ++i) {
    try {
      results[i] = envs_[i]->step(actions[i]);
      if (results[i].done) results[i].observation = envs_[i]->soft_reset();
    } catch (const std::exception& e) {
      throw ContractError("worker " + std::to_string(i) + ": " + e.what());
    }
  }
  return results;
}

std::vector<int> VecEnv::state_indices() const {
  std::vector<int> idx(envs_.size());
  for (std::size_t i = 0; i < envs_.size(); ++i) idx[i] = envs_[i]->state_index();
  return idx;
}

}  // namespace pome
