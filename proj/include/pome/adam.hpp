#ifndef POME_ADAM_HPP_
#define POME_ADAM_HPP_

#include <cstdint>
#include <vector>

#include "pome/array.hpp"
#include "pome/nn.hpp"

namespace pome {

// Adam accumulators, one (m, v) pair per parameter, aligned with a ParamSet's
// iteration order.
struct AdamState {
  std::vector<Array> m;
  std::vector<Array> v;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState init(const ParamSet& params);
};

// One bias-corrected Adam update in place. `grads` must align with `params`;
// NaN/Inf gradients abort with a DivergenceError naming the parameter.
void adam_step(ParamSet& params, const std::vector<Array>& grads, AdamState& state, double lr);

}  // namespace pome

#endif  // POME_ADAM_HPP_
