#include "pome/distributions.hpp"

#include <algorithm>
#include <cmath>

#include "pome/error.hpp"

namespace pome {

namespace {

void require_logits(const Array& logits, const char* op) {
  if (logits.size() == 0) throw ContractError(std::string(op) + ": empty logits");
  if (!logits.all_finite()) throw ContractError(std::string(op) + ": non-finite logits");
}

// log softmax with max subtraction.
std::vector<double> log_softmax(const Array& logits) {
  const std::size_t n = logits.data.size();
  double mx = logits.data[0];
  for (double v : logits.data) mx = std::max(mx, v);
  double lse = 0.0;
  for (double v : logits.data) lse += std::exp(v - mx);
  lse = std::log(lse) + mx;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = logits.data[i] - lse;
  return out;
}

}  // namespace

double categorical_logprob(const Array& logits, int action) {
  require_logits(logits, "categorical_logprob");
  if (action < 0 || action >= static_cast<int>(logits.size()))
    throw ContractError("categorical_logprob: action " + std::to_string(action) +
                        " out of range for " + std::to_string(logits.size()) + " actions");
  return log_softmax(logits)[static_cast<std::size_t>(action)];
}

double categorical_kl(const Array& logits_p, const Array& logits_q) {
  require_logits(logits_p, "categorical_kl");
  require_logits(logits_q, "categorical_kl");
  if (logits_p.size() != logits_q.size())
    throw ShapeError("categorical_kl: action counts differ, " + std::to_string(logits_p.size()) +
                     " vs " + std::to_string(logits_q.size()));
  const std::vector<double> lp = log_softmax(logits_p);
  const std::vector<double> lq = log_softmax(logits_q);
  double kl = 0.0;
  for (std::size_t i = 0; i < lp.size(); ++i) kl += std::exp(lp[i]) * (lp[i] - lq[i]);
  return kl;
}

double categorical_entropy(const Array& logits) {
  require_logits(logits, "categorical_entropy");
  const std::vector<double> lp = log_softmax(logits);
  double h = 0.0;
  for (double v : lp) h -= std::exp(v) * v;
  return h;
}

std::vector<double> softmax(const Array& logits) {
  require_logits(logits, "softmax");
  std::vector<double> lp = log_softmax(logits);
  for (double& v : lp) v = std::exp(v);
  return lp;
}

int sample_categorical(const Array& logits, Rng& rng) {
  return rng.categorical(softmax(logits));
}

}  // namespace pome
