#ifndef POME_TARGETS_HPP_
#define POME_TARGETS_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pome/array.hpp"

namespace pome {

enum class Mode { kPpo, kPome, kPpoModelBased };
enum class MedianScope { kWorker, kBatch };

Mode mode_from_string(const std::string& s);
std::string mode_to_string(Mode m);

// One worker's fixed-length slice of experience. Episodes may end inside the
// slice (auto-reset); the bootstrap value at the end is always present.
struct Segment {
  std::vector<std::vector<double>> observations;       // k x obs_dim
  std::vector<int> actions;                            // k
  std::vector<double> rewards;                         // k
  std::vector<std::uint8_t> dones;                     // k
  std::vector<double> values;                          // k, V_old(s_t)
  std::vector<double> logprobs;                        // k, log pi_old(a_t|s_t)
  Array old_logits;                                    // k x action_count
  std::vector<std::vector<double>> next_observations;  // k x obs_dim (post-reset on done)
  std::vector<double> next_values;                     // k, V_old(s_{t+1}); [k-1] is the bootstrap
  std::vector<int> state_indices;                      // k, tabular diagnostics

  int length() const { return static_cast<int>(rewards.size()); }
};

// Everything compute_targets needs for one worker, as plain arrays. The
// caller supplies the model-side evaluations so this stays a pure transform.
struct TargetInputs {
  std::vector<double> rewards;
  std::vector<std::uint8_t> dones;
  std::vector<double> values;            // V_old(s_t)
  std::vector<double> next_values;       // V_old(s_{t+1})
  std::vector<double> pred_rewards;      // model reward r(s_t, a_t)
  std::vector<double> pred_next_values;  // V_old(T(s_t, a_t))
};

// Per-timestep targets for the whole batch, worker-major.
struct TargetTable {
  int k = 0;
  int workers = 0;
  std::vector<double> rewards;        // copies of the inputs, for dumping
  std::vector<double> values;
  std::vector<double> q_free;         // model-free target
  std::vector<double> q_based;        // model-based target
  std::vector<double> epsilon;        // |q_based - q_free|
  std::vector<double> delta;          // model-free TD error q_free - V
  std::vector<double> delta_pome;     // TD error actually used by the mode
  std::vector<double> advantage;      // k-step advantage from delta_pome
  std::vector<double> value_target;   // advantage + V, frozen for the epochs
  std::vector<double> eps_bar;        // per worker

  std::size_t index(int w, int t) const {
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(k) + static_cast<std::size_t>(t);
  }
  std::size_t rows() const { return static_cast<std::size_t>(k) * static_cast<std::size_t>(workers); }
};

// --- per-worker array transforms ---

// target_t = r_t + gamma * (1 - done_t) * next_value_t. Both the model-free
// (actual next state) and model-based (predicted next state) targets are this
// composition with different inputs.
std::vector<double> bootstrap_target(const std::vector<double>& rewards,
                                     const std::vector<std::uint8_t>& dones,
                                     const std::vector<double>& next_values, double gamma);

// Elementwise |a - b|.
std::vector<double> discrepancy(const std::vector<double>& q_based,
                                const std::vector<double>& q_free);

// Median; the mean of the two central order statistics when the count is
// even. Input is copied, not mutated.
double median(std::vector<double> values);

// delta + alpha * clip(eps - eps_bar, -|delta|, |delta|). The clip keeps the
// bonus inside the TD error's own magnitude; with `clipped` false the raw
// (unbounded) bonus is used instead.
std::vector<double> pome_delta(const std::vector<double>& delta, const std::vector<double>& epsilon,
                               double eps_bar, double alpha, bool clipped = true);

// Backward recursion A_t = delta_t + gamma*lambda*(1-done_t)*A_{t+1}.
std::vector<double> advantages_from_deltas(const std::vector<double>& deltas,
                                           const std::vector<std::uint8_t>& dones, double gamma,
                                           double lambda);

// target_t = advantage_t + V_t (the regression target for the value head).
std::vector<double> value_targets(const std::vector<double>& advantages,
                                  const std::vector<double>& values);

// --- batch assembly ---

struct TargetConfig {
  Mode mode = Mode::kPome;
  double alpha = 0.1;
  bool clipped_bonus = true;
  MedianScope median_scope = MedianScope::kWorker;
  double gamma = 0.99;
  double lambda = 0.95;
};

// Pure function of its inputs; recomputing with unchanged inputs yields an
// identical table.
TargetTable compute_targets(const std::vector<TargetInputs>& workers, const TargetConfig& config);

// Diagnostic dump, one row per timestep.
extern const char* const kTargetTableHeader;
void write_target_table(std::ostream& os, const TargetTable& table);

}  // namespace pome

#endif  // POME_TARGETS_HPP_
