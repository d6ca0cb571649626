#ifndef POME_DISTRIBUTIONS_HPP_
#define POME_DISTRIBUTIONS_HPP_

#include <vector>

#include "pome/array.hpp"
#include "pome/rng.hpp"

namespace pome {

// Categorical distribution utilities over raw logits (rank-1 arrays). All of
// them go through max-subtracted log-softmax; raw probabilities are never
// formed to compute a log-probability.

// log softmax(logits)[action]
double categorical_logprob(const Array& logits, int action);

// KL[p || q] for the softmax distributions of two logit vectors. Non-negative;
// exactly zero when the logits differ by a constant shift.
double categorical_kl(const Array& logits_p, const Array& logits_q);

// -sum p log p, in [0, log n].
double categorical_entropy(const Array& logits);

// softmax(logits); sums to 1.
std::vector<double> softmax(const Array& logits);

// Sample an action index from softmax(logits).
int sample_categorical(const Array& logits, Rng& rng);

}  // namespace pome

#endif  // POME_DISTRIBUTIONS_HPP_
