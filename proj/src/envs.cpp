#include <algorithm>

#include "pome/env.hpp"
#include "pome/error.hpp"

namespace pome {

std::vector<double> scale_observation(const EnvSpec& spec, const std::vector<double>& obs) {
  if (static_cast<int>(obs.size()) != spec.observation_dim)
    throw ShapeError("scale_observation: dimension mismatch");
  std::vector<double> out(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto [lo, hi] = spec.observation_bounds[i];
    out[i] = (obs[i] - lo) / (hi - lo);
  }
  return out;
}

namespace {

std::vector<double> one_hot(int n, int index) {
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  v[static_cast<std::size_t>(index)] = 1.0;
  return v;
}

EnvSpec one_hot_spec(int n, int actions) {
  EnvSpec s;
  s.observation_dim = n;
  s.action_count = actions;
  s.observation_bounds.assign(static_cast<std::size_t>(n), {0.0, 1.0});
  return s;
}

// Base for the tabular built-ins: handles step counting, episode caps,
// episode-return accounting and the step-after-done contract.
class TabularEnv : public Env {
 public:
  TabularEnv(EnvSpec spec, int cap) : spec_(std::move(spec)), cap_(cap) {}

  const EnvSpec& spec() const override { return spec_; }
  int state_index() const override { return state_; }

  std::vector<double> reset(std::uint64_t seed) override {
    rng_ = std::make_unique<Rng>(seed);
    begin_episode();
    return one_hot(spec_.observation_dim, state_);
  }

  std::vector<double> soft_reset() override {
    if (!rng_) throw ContractError(id() + ": soft_reset before reset");
    begin_episode();
    return one_hot(spec_.observation_dim, state_);
  }

  StepResult step(int action) override {
    if (!rng_) throw ContractError(id() + ": step before reset");
    if (terminal_) throw ContractError(id() + ": step after done without reset");
    if (action < 0 || action >= spec_.action_count)
      throw ContractError(id() + ": action " + std::to_string(action) + " out of range");

    auto [next, reward, done] = transition(state_, action, *rng_);
    steps_ += 1;
    if (steps_ >= cap_) done = true;

    state_ = next;
    episode_return_ += reward;

    StepResult r;
    r.reward = reward;
    r.done = done;
    if (done) {
      r.episode_return = episode_return_;
      terminal_ = true;
    }
    r.observation = one_hot(spec_.observation_dim, state_);
    return r;
  }

 protected:
  virtual int start_state() const = 0;
  // Returns (next_state, reward, done-by-dynamics).
  virtual std::tuple<int, double, bool> transition(int state, int action, Rng& rng) const = 0;

 private:
  void begin_episode() {
    state_ = start_state();
    steps_ = 0;
    episode_return_ = 0.0;
    terminal_ = false;
  }

  EnvSpec spec_;
  int cap_;
  std::unique_ptr<Rng> rng_;
  int state_ = 0;
  int steps_ = 0;
  double episode_return_ = 0.0;
  bool terminal_ = true;
};

// Corridor of `length` cells, start at the left end. RIGHT walks toward the
// rightmost cell (+1, done); LEFT at the leftmost cell ends the episode with
// a small consolation reward, making it a trap that competes with the goal.
class ChainMdp final : public TabularEnv {
 public:
  ChainMdp(int length, bool trap_reward, int cap)
      : TabularEnv(one_hot_spec(length, 2), cap > 0 ? cap : kDefaultCap),
        length_(length),
        trap_reward_(trap_reward) {
    if (length < 2) throw ConfigError("chain length must be >= 2");
  }

  std::string id() const override { return "chain" + std::to_string(length_); }
  int state_count() const override { return length_; }

  static constexpr int kDefaultCap = 200;
  static constexpr double kTrapReward = 0.001;
  static constexpr double kGoalReward = 1.0;

 protected:
  int start_state() const override { return 0; }

  std::tuple<int, double, bool> transition(int state, int action, Rng&) const override {
    if (action == 1) {  // RIGHT
      const int next = state + 1;
      if (next == length_ - 1) return {next, kGoalReward, true};
      return {next, 0.0, false};
    }
    // LEFT
    if (state == 0) return {0, trap_reward_ ? kTrapReward : 0.0, true};
    return {state - 1, 0.0, false};
  }

 private:
  int length_;
  bool trap_reward_;
};

// Shared gridworld mechanics. Actions: 0=UP, 1=DOWN, 2=LEFT, 3=RIGHT; moving
// off the grid stays in place. Every step costs kStepReward; entering the
// goal cell adds +1 and ends the episode.
class GridEnv : public TabularEnv {
 public:
  GridEnv(int rows, int cols, int start, int goal, int cap)
      : TabularEnv(one_hot_spec(rows * cols, 4), cap > 0 ? cap : kDefaultCap),
        rows_(rows),
        cols_(cols),
        start_(start),
        goal_(goal) {}

  int state_count() const override { return rows_ * cols_; }

  static constexpr int kDefaultCap = 100;
  static constexpr double kStepReward = -0.01;
  static constexpr double kGoalBonus = 1.0;

  int move(int state, int dir) const {
    int r = state / cols_, c = state % cols_;
    switch (dir) {
      case 0: r -= 1; break;
      case 1: r += 1; break;
      case 2: c -= 1; break;
      case 3: c += 1; break;
      default: throw ContractError("bad direction");
    }
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) return state;
    return r * cols_ + c;
  }

  std::tuple<int, double, bool> outcome(int next) const {
    if (next == goal_) return {next, kStepReward + kGoalBonus, true};
    return {next, kStepReward, false};
  }

 protected:
  int start_state() const override { return start_; }

  int rows_, cols_, start_, goal_;
};

// Deterministic 5x5 gridworld: start top-left, goal bottom-right.
class DetGrid final : public GridEnv {
 public:
  explicit DetGrid(int cap) : GridEnv(5, 5, 0, 24, cap) {}
  std::string id() const override { return "detgrid5"; }

 protected:
  std::tuple<int, double, bool> transition(int state, int action, Rng&) const override {
    return outcome(move(state, action));
  }
};

// 5x9 grid with a noisy band: in columns 3..5 the chosen action is ignored
// and the agent moves in a uniformly random direction. Start is the middle of
// the left edge, goal the middle of the right edge, so every path crosses the
// band. Randomness is consumed only on in-band steps.
class NoisyCorridor final : public GridEnv {
 public:
  explicit NoisyCorridor(int cap) : GridEnv(5, 9, 2 * 9 + 0, 2 * 9 + 8, cap) {}
  std::string id() const override { return "noisycorridor"; }

  static constexpr int kZoneLow = 3;
  static constexpr int kZoneHigh = 5;

  bool in_zone(int state) const { return in_zone_col(state % cols_); }
  static bool in_zone_col(int col) { return col >= kZoneLow && col <= kZoneHigh; }

 protected:
  std::tuple<int, double, bool> transition(int state, int action, Rng& rng) const override {
    const int dir = in_zone(state) ? rng.below(4) : action;
    return outcome(move(state, dir));
  }
};

}  // namespace

std::unique_ptr<Env> make_env(const std::string& id, const EnvParams& params) {
  if (id == "chain20" || id == "chain")
    return std::make_unique<ChainMdp>(params.chain_length, params.chain_trap_reward,
                                      params.episode_cap);
  if (id == "detgrid5") return std::make_unique<DetGrid>(params.episode_cap);
  if (id == "noisycorridor") return std::make_unique<NoisyCorridor>(params.episode_cap);
  throw ConfigError("unknown environment id: " + id);
}

}  // namespace pome
