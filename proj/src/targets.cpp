#include "pome/targets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "pome/error.hpp"

namespace pome {

Mode mode_from_string(const std::string& s) {
  if (s == "ppo") return Mode::kPpo;
  if (s == "pome") return Mode::kPome;
  if (s == "ppo_model_based") return Mode::kPpoModelBased;
  throw ConfigError("unknown mode: " + s);
}

std::string mode_to_string(Mode m) {
  switch (m) {
    case Mode::kPpo: return "ppo";
    case Mode::kPome: return "pome";
    case Mode::kPpoModelBased: return "ppo_model_based";
  }
  throw ContractError("unhandled mode");
}

std::vector<double> bootstrap_target(const std::vector<double>& rewards,
                                     const std::vector<std::uint8_t>& dones,
                                     const std::vector<double>& next_values, double gamma) {
  if (rewards.size() != dones.size() || rewards.size() != next_values.size())
    throw ShapeError("bootstrap_target: array lengths differ");
  std::vector<double> out(rewards.size());
  for (std::size_t t = 0; t < rewards.size(); ++t)
    out[t] = rewards[t] + (dones[t] ? 0.0 : gamma * next_values[t]);
  return out;
}

std::vector<double> discrepancy(const std::vector<double>& q_based,
                                const std::vector<double>& q_free) {
  if (q_based.size() != q_free.size()) throw ShapeError("discrepancy: array lengths differ");
  std::vector<double> out(q_free.size());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = std::abs(q_based[t] - q_free[t]);
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ContractError("median of empty array");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<double> pome_delta(const std::vector<double>& delta, const std::vector<double>& epsilon,
                               double eps_bar, double alpha, bool clipped) {
  if (delta.size() != epsilon.size()) throw ShapeError("pome_delta: array lengths differ");
  if (alpha < 0.0) throw ContractError("pome_delta: alpha must be >= 0");
  std::vector<double> out(delta.size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    double bonus = epsilon[t] - eps_bar;
    if (clipped) {
      const double bound = std::abs(delta[t]);
      bonus = std::clamp(bonus, -bound, bound);
    }
    out[t] = delta[t] + alpha * bonus;
  }
  return out;
}

std::vector<double> advantages_from_deltas(const std::vector<double>& deltas,
                                           const std::vector<std::uint8_t>& dones, double gamma,
                                           double lambda) {
  if (deltas.size() != dones.size()) throw ShapeError("advantages_from_deltas: lengths differ");
  std::vector<double> adv(deltas.size());
  double carry = 0.0;
  for (std::size_t i = deltas.size(); i-- > 0;) {
    carry = deltas[i] + (dones[i] ? 0.0 : gamma * lambda * carry);
    adv[i] = carry;
  }
  return adv;
}

std::vector<double> value_targets(const std::vector<double>& advantages,
                                  const std::vector<double>& values) {
  if (advantages.size() != values.size()) throw ShapeError("value_targets: lengths differ");
  std::vector<double> out(advantages.size());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = advantages[t] + values[t];
  return out;
}

TargetTable compute_targets(const std::vector<TargetInputs>& workers, const TargetConfig& config) {
  if (workers.empty()) throw ContractError("compute_targets: no workers");
  const int k = static_cast<int>(workers.front().rewards.size());
  if (k < 1) throw ContractError("compute_targets: empty segment");
  for (const TargetInputs& w : workers) {
    if (static_cast<int>(w.rewards.size()) != k || static_cast<int>(w.dones.size()) != k ||
        static_cast<int>(w.values.size()) != k || static_cast<int>(w.next_values.size()) != k ||
        static_cast<int>(w.pred_rewards.size()) != k ||
        static_cast<int>(w.pred_next_values.size()) != k)
      throw ShapeError("compute_targets: worker arrays must all have length k");
  }

  TargetTable table;
  table.k = k;
  table.workers = static_cast<int>(workers.size());
  const std::size_t n = table.rows();
  table.rewards.resize(n);
  table.values.resize(n);
  table.q_free.resize(n);
  table.q_based.resize(n);
  table.epsilon.resize(n);
  table.delta.resize(n);
  table.delta_pome.resize(n);
  table.advantage.resize(n);
  table.value_target.resize(n);
  table.eps_bar.resize(workers.size());

  // Per-worker targets and discrepancies first; the batch-scope median needs
  // every worker's epsilons before any bonus is formed.
  std::vector<std::vector<double>> qf(workers.size()), qb(workers.size()), eps(workers.size());
  for (std::size_t w = 0; w < workers.size(); ++w) {
    qf[w] = bootstrap_target(workers[w].rewards, workers[w].dones, workers[w].next_values,
                             config.gamma);
    qb[w] = bootstrap_target(workers[w].pred_rewards, workers[w].dones,
                             workers[w].pred_next_values, config.gamma);
    eps[w] = discrepancy(qb[w], qf[w]);
  }

  if (config.median_scope == MedianScope::kBatch) {
    std::vector<double> pooled;
    pooled.reserve(n);
    for (const auto& e : eps) pooled.insert(pooled.end(), e.begin(), e.end());
    const double m = median(std::move(pooled));
    std::fill(table.eps_bar.begin(), table.eps_bar.end(), m);
  } else {
    for (std::size_t w = 0; w < workers.size(); ++w) table.eps_bar[w] = median(eps[w]);
  }

  for (std::size_t w = 0; w < workers.size(); ++w) {
    const TargetInputs& in = workers[w];
    std::vector<double> delta(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t)
      delta[static_cast<std::size_t>(t)] = qf[w][static_cast<std::size_t>(t)] - in.values[static_cast<std::size_t>(t)];

    std::vector<double> dp;
    switch (config.mode) {
      case Mode::kPpo:
        dp = delta;
        break;
      case Mode::kPome:
        dp = pome_delta(delta, eps[w], table.eps_bar[w], config.alpha, config.clipped_bonus);
        break;
      case Mode::kPpoModelBased:
        dp.resize(static_cast<std::size_t>(k));
        for (int t = 0; t < k; ++t)
          dp[static_cast<std::size_t>(t)] =
              qb[w][static_cast<std::size_t>(t)] - in.values[static_cast<std::size_t>(t)];
        break;
    }

    const std::vector<double> adv = advantages_from_deltas(dp, in.dones, config.gamma, config.lambda);
    const std::vector<double> vt = value_targets(adv, in.values);

    for (int t = 0; t < k; ++t) {
      const std::size_t i = table.index(static_cast<int>(w), t);
      const std::size_t s = static_cast<std::size_t>(t);
      table.rewards[i] = in.rewards[s];
      table.values[i] = in.values[s];
      table.q_free[i] = qf[w][s];
      table.q_based[i] = qb[w][s];
      table.epsilon[i] = eps[w][s];
      table.delta[i] = delta[s];
      table.delta_pome[i] = dp[s];
      table.advantage[i] = adv[s];
      table.value_target[i] = vt[s];
    }
  }
  return table;
}

const char* const kTargetTableHeader =
    "t,worker,r,V,q_star_f,q_star_b,epsilon,epsilon_bar,delta,delta_pome,advantage";

void write_target_table(std::ostream& os, const TargetTable& table) {
  os << kTargetTableHeader << "\n";
  char buf[32];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf << sep;
  };
  for (int w = 0; w < table.workers; ++w) {
    for (int t = 0; t < table.k; ++t) {
      const std::size_t i = table.index(w, t);
      os << t << ',' << w << ',';
      put(table.rewards[i], ',');
      put(table.values[i], ',');
      put(table.q_free[i], ',');
      put(table.q_based[i], ',');
      put(table.epsilon[i], ',');
      put(table.eps_bar[static_cast<std::size_t>(w)], ',');
      put(table.delta[i], ',');
      put(table.delta_pome[i], ',');
      put(table.advantage[i], '\n');
    }
  }
}

}  // namespace pome
