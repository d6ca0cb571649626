#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <set>

#include "oracles.hpp"
#include "pome/env.hpp"
#include "pome/error.hpp"
#include "pome/vec_env.hpp"
#include "test_support.hpp"

using namespace pome;

namespace {

int hot_index(const std::vector<double>& obs) {
  for (std::size_t i = 0; i < obs.size(); ++i)
    if (obs[i] != 0.0) return static_cast<int>(i);
  return -1;
}

}  // namespace

TEST_CASE("one-hot encodings: exactly one entry set to 1, within bounds") {
  for (const char* id : {"chain20", "detgrid5", "noisycorridor"}) {
    auto env = make_env(id);
    Rng rng(99);
    std::vector<double> obs = env->reset(1);
    for (int step = 0; step < 300; ++step) {
      int ones = 0;
      for (std::size_t i = 0; i < obs.size(); ++i) {
        const auto [lo, hi] = env->spec().observation_bounds[i];
        CHECK(obs[i] >= lo);
        CHECK(obs[i] <= hi);
        if (obs[i] == 1.0) ones += 1;
        else CHECK(obs[i] == 0.0);
      }
      CHECK(ones == 1);
      CHECK(hot_index(obs) == env->state_index());
      StepResult r = env->step(rng.below(env->spec().action_count));
      obs = r.done ? env->soft_reset() : r.observation;
      CHECK(std::isfinite(r.reward));
    }
  }
}

TEST_CASE("reset: fixed start states regardless of seed") {
  auto chain = make_env("chain20");
  CHECK(hot_index(chain->reset(0)) == 0);
  CHECK(hot_index(chain->reset(123456)) == 0);

  auto grid = make_env("detgrid5");
  CHECK(hot_index(grid->reset(5)) == 0);

  auto noisy = make_env("noisycorridor");
  CHECK(hot_index(noisy->reset(0)) == 18);   // middle of the left edge (row 2, col 0)
  CHECK(hot_index(noisy->reset(1)) == 18);
}

TEST_CASE("chain dynamics by enumeration") {
  auto env = make_env("chain20");
  env->reset(0);

  // RIGHT walks the full corridor; reward only on arrival at the right end.
  double total = 0.0;
  for (int i = 0; i < 19; ++i) {
    StepResult r = env->step(1);
    total += r.reward;
    CHECK(r.done == (i == 18));
    if (i < 18) CHECK(env->state_index() == i + 1);
  }
  CHECK(total == 1.0);

  // LEFT at the leftmost cell: small trap reward, episode over.
  env->reset(0);
  StepResult trap = env->step(0);
  CHECK(trap.done);
  CHECK(trap.reward == 0.001);
  CHECK(trap.episode_return == 0.001);

  // LEFT from the middle just walks back.
  env->reset(0);
  env->step(1);
  env->step(1);
  StepResult back = env->step(0);
  CHECK_FALSE(back.done);
  CHECK(back.reward == 0.0);
  CHECK(env->state_index() == 1);

  // trap reward off: the zero-reward-until-goal variant
  EnvParams p;
  p.chain_trap_reward = false;
  auto bare = make_env("chain20", p);
  bare->reset(0);
  StepResult trap2 = bare->step(0);
  CHECK(trap2.done);
  CHECK(trap2.reward == 0.0);

  // step after done without reset violates the contract
  env->reset(0);
  env->step(0);  // trap: episode over
  CHECK_THROWS_AS(env->step(0), ContractError);
  // invalid action
  env->reset(0);
  CHECK_THROWS_AS(env->step(2), ContractError);
}

TEST_CASE("detgrid dynamics: moves, walls, goal, cap") {
  auto env = make_env("detgrid5");
  env->reset(0);

  // moving off the grid stays in place but still costs a step
  StepResult up = env->step(0);
  CHECK(env->state_index() == 0);
  CHECK(up.reward == -0.01);
  CHECK_FALSE(up.done);

  // shortest path 4x DOWN + 4x RIGHT: return = 1 - 0.01 * 8
  env->reset(0);
  double total = 0.0;
  for (int i = 0; i < 4; ++i) total += env->step(1).reward;
  StepResult last{};
  for (int i = 0; i < 4; ++i) {
    last = env->step(3);
    total += last.reward;
  }
  CHECK(last.done);
  CHECK(pome::testing::close(total, 0.92, 1e-12));
  CHECK(pome::testing::close(*last.episode_return, 0.92, 1e-12));

  // cap terminates: bounce off the top wall 100 times
  env->reset(0);
  StepResult r{};
  for (int i = 0; i < 100; ++i) r = env->step(0);
  CHECK(r.done);
  CHECK(pome::testing::close(*r.episode_return, -1.0, 1e-12));
}

TEST_CASE("determinism: (seed, action sequence) fixes the full stream") {
  for (const char* id : {"chain20", "noisycorridor"}) {
    auto a = make_env(id);
    auto b = make_env(id);
    Rng script(7);
    std::vector<int> actions;
    for (int i = 0; i < 400; ++i) actions.push_back(script.below(a->spec().action_count));

    auto run = [&](Env& env) {
      std::vector<double> trace;
      env.reset(42);
      for (int act : actions) {
        StepResult r = env.step(act);
        trace.push_back(r.reward);
        trace.push_back(static_cast<double>(hot_index(r.observation)));
        trace.push_back(r.done ? 1.0 : 0.0);
        if (r.done) env.soft_reset();
      }
      return trace;
    };
    CHECK(run(*a) == run(*b));
  }
}

TEST_CASE("noisycorridor: noise confined to the marked zone") {
  // Outside the zone the transition must be a deterministic function of
  // (state, action); inside it must actually vary.
  auto env = make_env("noisycorridor");

  // col 0..2 and 6..8 are deterministic: repeat each (state, action) from a
  // fresh seed and compare landing states.
  for (int trial = 0; trial < 50; ++trial) {
    auto e1 = make_env("noisycorridor");
    auto e2 = make_env("noisycorridor");
    e1->reset(trial);
    e2->reset(trial + 1000);  // different noise streams
    Rng script(trial);
    // random walk kept outside the zone: only LEFT/UP/DOWN from cols 0..2
    for (int i = 0; i < 20; ++i) {
      const int a = std::array<int, 3>{0, 1, 2}[static_cast<std::size_t>(script.below(3))];
      StepResult r1 = e1->step(a);
      StepResult r2 = e2->step(a);
      CHECK(hot_index(r1.observation) == hot_index(r2.observation));
      if (r1.done) break;
    }
  }

  // inside the zone: stepping from the same state with the same action can
  // land in different cells across seeds
  std::set<int> landings;
  for (int seed = 0; seed < 20; ++seed) {
    auto e = make_env("noisycorridor");
    e->reset(static_cast<std::uint64_t>(seed));
    e->step(3);  // col 0 -> 1
    e->step(3);  // col 1 -> 2
    e->step(3);  // col 2 -> 3 (enter zone), deterministic so far
    CHECK(e->state_index() == 2 * 9 + 3);
    StepResult r = e->step(3);  // noisy
    landings.insert(hot_index(r.observation));
  }
  CHECK(landings.size() > 1);
}

TEST_CASE("vec_step: degenerate single worker equals step + auto-reset") {
  VecEnv venv("chain20", {}, 1, 5);
  auto solo = make_env("chain20");
  venv.reset(5);
  solo->reset(derive_stream_seed(5, 0));
  Rng script(3);
  for (int i = 0; i < 300; ++i) {
    const int a = script.below(2);
    const StepResult rv = venv.vec_step({a})[0];
    StepResult rs = solo->step(a);
    if (rs.done) rs.observation = solo->soft_reset();
    CHECK(rv.reward == rs.reward);
    CHECK(rv.done == rs.done);
    CHECK(rv.observation == rs.observation);
  }
}

TEST_CASE("vec_step: identical seeds give identical worker streams in a deterministic env") {
  // All workers share the seed only if we construct them that way; here we
  // check that DetGrid workers with the same action stream stay in lockstep
  // (their dynamics consume no randomness).
  VecEnv venv("detgrid5", {}, 8, 17);
  Rng script(11);
  for (int i = 0; i < 250; ++i) {
    const int a = script.below(4);
    const std::vector<StepResult> rs = venv.vec_step(std::vector<int>(8, a));
    for (int w = 1; w < 8; ++w) {
      CHECK(rs[static_cast<std::size_t>(w)].observation == rs[0].observation);
      CHECK(rs[static_cast<std::size_t>(w)].reward == rs[0].reward);
      CHECK(rs[static_cast<std::size_t>(w)].done == rs[0].done);
    }
  }
}

TEST_CASE("vec_step: distinct worker streams diverge only inside the noisy zone") {
  VecEnv venv("noisycorridor", {}, 8, 23);
  Rng script(2);
  bool diverged_in_zone = false;
  for (int i = 0; i < 400; ++i) {
    const std::vector<int> pre_states = venv.state_indices();
    const int a = script.below(4);
    const std::vector<StepResult> rs = venv.vec_step(std::vector<int>(8, a));
    // group workers by their pre-step state; same out-of-zone state + same
    // action must land identically
    for (int w1 = 0; w1 < 8; ++w1) {
      for (int w2 = w1 + 1; w2 < 8; ++w2) {
        if (pre_states[static_cast<std::size_t>(w1)] != pre_states[static_cast<std::size_t>(w2)]) continue;
        const int col = pre_states[static_cast<std::size_t>(w1)] % 9;
        const bool in_zone = col >= 3 && col <= 5;
        const bool either_done =
            rs[static_cast<std::size_t>(w1)].done || rs[static_cast<std::size_t>(w2)].done;
        const bool same =
            rs[static_cast<std::size_t>(w1)].observation == rs[static_cast<std::size_t>(w2)].observation;
        if (!in_zone && !either_done) {
          // same out-of-zone state + same action must land identically;
          // done workers are excluded because the episode cap depends on
          // each worker's own step counter, not the state
          CHECK(same);
        } else if (in_zone && !same) {
          diverged_in_zone = true;
        }
      }
    }
  }
  CHECK(diverged_in_zone);
}

TEST_CASE("vec_step: worker errors carry the worker index") {
  VecEnv venv("chain20", {}, 3, 0);
  try {
    venv.vec_step({0, 5, 0});
    FAIL("expected ContractError");
  } catch (const ContractError& e) {
    CHECK(std::string(e.what()).find("worker 1") != std::string::npos);
  }
  CHECK_THROWS_AS(venv.vec_step({0, 0}), ContractError);  // wrong arity
}

TEST_CASE("worker streams depend only on (base seed, worker index)") {
  // Adding workers must not perturb existing ones.
  VecEnv small("noisycorridor", {}, 2, 77);
  VecEnv large("noisycorridor", {}, 6, 77);
  Rng script(1);
  for (int i = 0; i < 200; ++i) {
    const int a = script.below(4);
    const std::vector<StepResult> rs = small.vec_step({a, a});
    const std::vector<StepResult> rl = large.vec_step(std::vector<int>(6, a));
    for (int w = 0; w < 2; ++w) {
      CHECK(rs[static_cast<std::size_t>(w)].observation == rl[static_cast<std::size_t>(w)].observation);
      CHECK(rs[static_cast<std::size_t>(w)].done == rl[static_cast<std::size_t>(w)].done);
    }
  }
}

TEST_CASE("episode caps: no infinite episodes under random actions") {
  for (const char* id : {"chain20", "detgrid5", "noisycorridor"}) {
    auto env = make_env(id);
    env->reset(3);
    Rng rng(4);
    for (int episode = 0; episode < 20; ++episode) {
      int len = 0;
      while (true) {
        len += 1;
        REQUIRE(len <= 200);
        StepResult r = env->step(rng.below(env->spec().action_count));
        if (r.done) {
          CHECK(r.episode_return.has_value());
          env->soft_reset();
          break;
        }
      }
    }
  }
}

TEST_CASE("value-iteration oracle: environment optima") {
  using namespace pome::oracles;
  // Chain: always-RIGHT nets exactly 1.0 undiscounted.
  CHECK(pome::testing::close(optimal_return_capped(chain_kernel(), 1.0), 1.0, 1e-12));
  // DetGrid: 1 - 0.01 * 8.
  CHECK(pome::testing::close(optimal_return_capped(detgrid_kernel(), 1.0), 0.92, 1e-12));
  // NoisyCorridor optimum is strictly below the deterministic analogue
  // (1 - 0.01*8) and well above the cap-out floor.
  const double noisy = optimal_return_capped(noisycorridor_kernel(), 1.0);
  CHECK(noisy < 0.92);
  CHECK(noisy > 0.3);

  // Discounted VI sanity on the chain: V*(s) = 0.99^(steps-to-goal).
  const std::vector<double> v = vi_values(chain_kernel(), 0.99);
  CHECK(pome::testing::close(v[19 - 1], 1.0, 1e-9));  // one step away
  CHECK(pome::testing::close(v[0], std::pow(0.99, 18.0), 1e-9));
}
