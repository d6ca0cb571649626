#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pome::oracles {

std::vector<double> gae_bruteforce(const std::vector<double>& deltas,
                                   const std::vector<std::uint8_t>& dones, double gamma,
                                   double lambda) {
  const std::size_t k = deltas.size();
  std::vector<double> adv(k, 0.0);
  for (std::size_t t = 0; t < k; ++t) {
    double acc = 0.0;
    for (std::size_t j = t; j < k; ++j) {
      acc += std::pow(gamma * lambda, static_cast<double>(j - t)) * deltas[j];
      if (dones[j]) break;
    }
    adv[t] = acc;
  }
  return adv;
}

std::vector<double> softmax_enum(const std::vector<double>& logits) {
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i]);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

double logprob_enum(const std::vector<double>& logits, int action) {
  return std::log(softmax_enum(logits)[static_cast<std::size_t>(action)]);
}

double kl_enum(const std::vector<double>& p_logits, const std::vector<double>& q_logits) {
  const std::vector<double> p = softmax_enum(p_logits);
  const std::vector<double> q = softmax_enum(q_logits);
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) kl += p[i] * (std::log(p[i]) - std::log(q[i]));
  return kl;
}

double entropy_enum(const std::vector<double>& logits) {
  const std::vector<double> p = softmax_enum(logits);
  double h = 0.0;
  for (double v : p) h -= v * std::log(v);
  return h;
}

// --- environment kernels, re-derived from the documented dynamics ---

Kernel chain_kernel(int length, bool trap_reward, int cap) {
  Kernel k;
  k.states = length;
  k.actions = 2;
  k.start = 0;
  k.cap = cap;
  k.p.assign(static_cast<std::size_t>(length),
             std::vector<std::vector<Outcome>>(2));
  for (int s = 0; s < length; ++s) {
    // LEFT
    if (s == 0)
      k.p[static_cast<std::size_t>(s)][0] = {{1.0, 0, trap_reward ? 0.001 : 0.0, true}};
    else
      k.p[static_cast<std::size_t>(s)][0] = {{1.0, s - 1, 0.0, false}};
    // RIGHT
    if (s + 1 == length - 1)
      k.p[static_cast<std::size_t>(s)][1] = {{1.0, s + 1, 1.0, true}};
    else if (s + 1 < length)
      k.p[static_cast<std::size_t>(s)][1] = {{1.0, s + 1, 0.0, false}};
    else  // acting from the absorbing end never happens; self-loop for completeness
      k.p[static_cast<std::size_t>(s)][1] = {{1.0, s, 0.0, true}};
  }
  return k;
}

namespace {

Kernel grid_kernel(int rows, int cols, int start, int goal, int cap, int zone_lo, int zone_hi) {
  Kernel k;
  k.states = rows * cols;
  k.actions = 4;
  k.start = start;
  k.cap = cap;
  k.p.assign(static_cast<std::size_t>(k.states), std::vector<std::vector<Outcome>>(4));

  auto move = [&](int s, int dir) {
    int r = s / cols, c = s % cols;
    if (dir == 0) r -= 1;
    if (dir == 1) r += 1;
    if (dir == 2) c -= 1;
    if (dir == 3) c += 1;
    if (r < 0 || r >= rows || c < 0 || c >= cols) return s;
    return r * cols + c;
  };
  auto outcome = [&](int next, double prob) {
    if (next == goal) return Outcome{prob, next, -0.01 + 1.0, true};
    return Outcome{prob, next, -0.01, false};
  };

  for (int s = 0; s < k.states; ++s) {
    const int col = s % cols;
    const bool noisy = col >= zone_lo && col <= zone_hi;
    for (int a = 0; a < 4; ++a) {
      if (noisy) {
        for (int dir = 0; dir < 4; ++dir)
          k.p[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)].push_back(
              outcome(move(s, dir), 0.25));
      } else {
        k.p[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)].push_back(
            outcome(move(s, a), 1.0));
      }
    }
  }
  return k;
}

}  // namespace

Kernel detgrid_kernel(int cap) { return grid_kernel(5, 5, 0, 24, cap, -1, -1); }

Kernel noisycorridor_kernel(int cap) { return grid_kernel(5, 9, 2 * 9 + 0, 2 * 9 + 8, cap, 3, 5); }

std::vector<double> vi_values(const Kernel& k, double gamma) {
  std::vector<double> v(static_cast<std::size_t>(k.states), 0.0);
  for (int iter = 0; iter < 1000000; ++iter) {
    double sup = 0.0;
    std::vector<double> next(v.size());
    for (int s = 0; s < k.states; ++s) {
      double best = -1e300;
      for (int a = 0; a < k.actions; ++a) {
        double q = 0.0;
        for (const Outcome& o : k.p[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)])
          q += o.prob * (o.reward + (o.done ? 0.0 : gamma * v[static_cast<std::size_t>(o.next)]));
        best = std::max(best, q);
      }
      next[static_cast<std::size_t>(s)] = best;
      sup = std::max(sup, std::abs(best - v[static_cast<std::size_t>(s)]));
    }
    v = std::move(next);
    if (sup < 1e-10) return v;
  }
  throw std::runtime_error("value iteration did not converge");
}

namespace {

// Finite-horizon DP; `maximize` picks the optimal policy, otherwise the
// uniform-random one.
double horizon_dp(const Kernel& k, double gamma, bool maximize) {
  std::vector<double> v(static_cast<std::size_t>(k.states), 0.0);  // value with 0 steps left
  for (int h = 0; h < k.cap; ++h) {
    std::vector<double> next(v.size());
    for (int s = 0; s < k.states; ++s) {
      double agg = maximize ? -1e300 : 0.0;
      for (int a = 0; a < k.actions; ++a) {
        double q = 0.0;
        for (const Outcome& o : k.p[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]) {
          // With h steps left after this one, a forced cut at the cap means
          // the continuation is only available when h > 0 and not done.
          const double cont = (o.done || h == 0) ? 0.0 : gamma * v[static_cast<std::size_t>(o.next)];
          q += o.prob * (o.reward + cont);
        }
        if (maximize)
          agg = std::max(agg, q);
        else
          agg += q / static_cast<double>(k.actions);
      }
      next[static_cast<std::size_t>(s)] = agg;
    }
    v = std::move(next);
  }
  return v[static_cast<std::size_t>(k.start)];
}

}  // namespace

double optimal_return_capped(const Kernel& k, double gamma) { return horizon_dp(k, gamma, true); }

double uniform_policy_return_capped(const Kernel& k) { return horizon_dp(k, 1.0, false); }

std::vector<Array> finite_difference_grads(ParamSet& params,
                                           const std::function<double()>& loss_fn, double h) {
  std::vector<Array> grads;
  grads.reserve(params.count());
  for (std::size_t p = 0; p < params.count(); ++p) {
    Array g = Array::zeros(params.at(p).shape);
    for (std::size_t i = 0; i < g.data.size(); ++i) {
      double& w = params.at(p).data[i];
      const double saved = w;
      w = saved + h;
      const double up = loss_fn();
      w = saved - h;
      const double down = loss_fn();
      w = saved;
      g.data[i] = (up - down) / (2.0 * h);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

double max_relative_error(const std::vector<Array>& analytic, const std::vector<Array>& numeric,
                          double floor) {
  double worst = 0.0;
  for (std::size_t p = 0; p < analytic.size(); ++p) {
    for (std::size_t i = 0; i < analytic[p].data.size(); ++i) {
      const double a = analytic[p].data[i];
      const double n = numeric[p].data[i];
      const double denom = std::max({std::abs(a), std::abs(n), floor});
      worst = std::max(worst, std::abs(a - n) / denom);
    }
  }
  return worst;
}

}  // namespace pome::oracles
