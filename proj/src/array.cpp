#include "pome/array.hpp"

#include <sstream>

namespace pome {

std::int64_t numel(const std::vector<int>& shape) {
  std::int64_t n = 1;
  for (int e : shape) {
    if (e < 0) throw ShapeError("negative extent in shape " + shape_string(shape));
    n *= e;
  }
  return n;
}

Array::Array(std::vector<int> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
  if (numel(shape) != static_cast<std::int64_t>(data.size())) {
    throw ShapeError("data length " + std::to_string(data.size()) + " does not match shape " +
                     shape_string(shape));
  }
}

Array Array::zeros(std::vector<int> s) {
  std::int64_t n = numel(s);
  return Array(std::move(s), std::vector<double>(static_cast<std::size_t>(n), 0.0));
}

Array Array::full(std::vector<int> s, double v) {
  std::int64_t n = numel(s);
  return Array(std::move(s), std::vector<double>(static_cast<std::size_t>(n), v));
}

Array Array::vec(std::vector<double> d) {
  int n = static_cast<int>(d.size());
  return Array({n}, std::move(d));
}

Array Array::scalar(double v) { return Array({1}, {v}); }

bool Array::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool same_shape(const Array& a, const Array& b) { return a.shape == b.shape; }

std::string shape_string(const std::vector<int>& shape) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ",";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

void check_finite(const Array& a, const std::string& what) {
  if (!a.all_finite()) throw DivergenceError("non-finite values in " + what);
}

}  // namespace pome
