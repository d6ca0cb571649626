#ifndef POME_NN_HPP_
#define POME_NN_HPP_

#include <string>
#include <unordered_map>
#include <vector>

#include "pome/array.hpp"
#include "pome/graph.hpp"
#include "pome/rng.hpp"

namespace pome {

enum class Activation { kIdentity, kTanh, kRelu, kSigmoid };

Activation activation_from_string(const std::string& name);

// Fully-connected stack: widths = {in, h1, ..., out}, one activation per
// layer (so activations.size() == widths.size() - 1).
struct MlpSpec {
  std::vector<int> widths;
  std::vector<Activation> activations;

  int input_dim() const { return widths.front(); }
  int output_dim() const { return widths.back(); }
  int layer_count() const { return static_cast<int>(activations.size()); }
  void validate() const;
};

// Ordered, uniquely-named collection of parameter arrays. Iteration order is
// the insertion order, which makes gradient alignment and checkpoint layout
// reproducible run to run.
class ParamSet {
 public:
  void add(const std::string& name, Array value);
  bool has(const std::string& name) const { return index_.count(name) != 0; }
  Array& get(const std::string& name);
  const Array& get(const std::string& name) const;
  const std::vector<std::string>& names() const { return names_; }
  std::size_t count() const { return names_.size(); }
  Array& at(std::size_t i) { return values_[i]; }
  const Array& at(std::size_t i) const { return values_[i]; }

 private:
  std::vector<std::string> names_;
  std::vector<Array> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Orthogonal(ish) weight matrix: QR of a Gaussian draw, sign-fixed, times
// `gain`. For rows < cols the transpose is orthogonalized instead so the
// rows come out orthonormal.
Array orthogonal(int rows, int cols, double gain, Rng& rng);

// Adds "<prefix>/W{i}" and "<prefix>/b{i}" params for every layer. Hidden
// layers use gain sqrt(2); the final layer uses `final_gain` (0.01 for policy
// heads keeps the initial policy near uniform). Biases start at zero.
void init_mlp(ParamSet& params, const std::string& prefix, const MlpSpec& spec, double final_gain,
              Rng& rng);

// Per-graph binding of a ParamSet: every parameter becomes a leaf so that
// gradients can be read back aligned with the set.
class BoundParams {
 public:
  BoundParams(Graph& g, const ParamSet& params);
  NodeId node(const std::string& name) const;
  // d(loss)/d(param) for every param, in ParamSet order. Valid after backward.
  std::vector<Array> gradients(const Graph& g) const;

 private:
  std::unordered_map<std::string, NodeId> ids_;
  std::vector<NodeId> ordered_;
};

// input is [batch, in_dim]; returns [batch, out_dim] recorded on the graph.
NodeId mlp_forward(Graph& g, const BoundParams& bound, const std::string& prefix,
                   const MlpSpec& spec, NodeId input);

// Plain evaluation through a throwaway graph; no gradients survive.
Array mlp_eval(const ParamSet& params, const std::string& prefix, const MlpSpec& spec,
               const Array& input);

}  // namespace pome

#endif  // POME_NN_HPP_
