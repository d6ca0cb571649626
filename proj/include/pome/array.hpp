#ifndef POME_ARRAY_HPP_
#define POME_ARRAY_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pome/error.hpp"

namespace pome {

// Dense row-major array of 64-bit reals. Rank is dynamic but in practice
// everything in this codebase is rank 1 or 2.
struct Array {
  std::vector<int> shape;
  std::vector<double> data;

  Array() = default;
  Array(std::vector<int> s, std::vector<double> d);

  static Array zeros(std::vector<int> s);
  static Array full(std::vector<int> s, double v);
  static Array vec(std::vector<double> d);
  static Array scalar(double v);

  std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }
  int ndim() const { return static_cast<int>(shape.size()); }
  bool is_scalar() const { return data.size() == 1; }

  // 2-d accessors; shape checks are the caller's business.
  int rows() const { return shape.empty() ? 1 : shape[0]; }
  int cols() const { return shape.size() < 2 ? 1 : shape[1]; }
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols() + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols() + c]; }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  bool all_finite() const;
};

std::int64_t numel(const std::vector<int>& shape);
bool same_shape(const Array& a, const Array& b);
std::string shape_string(const std::vector<int>& shape);

// Throws DivergenceError naming `what` if any entry is NaN/Inf.
void check_finite(const Array& a, const std::string& what);

}  // namespace pome

#endif  // POME_ARRAY_HPP_
