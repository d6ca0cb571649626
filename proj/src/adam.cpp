#include "pome/adam.hpp"

#include <cmath>

#include "pome/error.hpp"

namespace pome {

AdamState AdamState::init(const ParamSet& params) {
  AdamState s;
  s.m.reserve(params.count());
  s.v.reserve(params.count());
  for (std::size_t i = 0; i < params.count(); ++i) {
    s.m.push_back(Array::zeros(params.at(i).shape));
    s.v.push_back(Array::zeros(params.at(i).shape));
  }
  return s;
}

void adam_step(ParamSet& params, const std::vector<Array>& grads, AdamState& state, double lr) {
  if (grads.size() != params.count())
    throw ContractError("adam_step: gradient count " + std::to_string(grads.size()) +
                        " does not match parameter count " + std::to_string(params.count()));

  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

  for (std::size_t p = 0; p < params.count(); ++p) {
    Array& w = params.at(p);
    const Array& g = grads[p];
    if (!same_shape(w, g))
      throw ShapeError("adam_step: gradient shape mismatch for " + params.names()[p]);
    if (!g.all_finite())
      throw DivergenceError("adam_step: non-finite gradient for parameter " + params.names()[p]);

    Array& m = state.m[p];
    Array& v = state.v[p];
    for (std::size_t i = 0; i < w.data.size(); ++i) {
      m.data[i] = state.beta1 * m.data[i] + (1.0 - state.beta1) * g.data[i];
      v.data[i] = state.beta2 * v.data[i] + (1.0 - state.beta2) * g.data[i] * g.data[i];
      const double mhat = m.data[i] / bc1;
      const double vhat = v.data[i] / bc2;
      w.data[i] -= lr * mhat / (std::sqrt(vhat) + state.epsilon);
    }
  }
}

}  // namespace pome
