#ifndef POME_ERROR_HPP_
#define POME_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace pome {

// Shape or dimension disagreement between arrays/operands.
class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// A caller violated a documented precondition (non-scalar loss, empty batch,
// step after done, out-of-range action, ...).
class ContractError : public std::runtime_error {
 public:
  explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

// A learned model or loss produced NaN/Inf.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pome

#endif  // POME_ERROR_HPP_
