#include "pome/nn.hpp"

#include <cmath>

#include "pome/error.hpp"

namespace pome {

Activation activation_from_string(const std::string& name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  throw ConfigError("unknown activation: " + name);
}

void MlpSpec::validate() const {
  if (widths.size() < 2) throw ConfigError("MlpSpec needs at least input and output widths");
  if (activations.size() != widths.size() - 1)
    throw ConfigError("MlpSpec needs one activation per layer");
  for (int w : widths)
    if (w <= 0) throw ConfigError("MlpSpec widths must be positive");
}

void ParamSet::add(const std::string& name, Array value) {
  if (has(name)) throw ContractError("duplicate parameter name: " + name);
  index_[name] = names_.size();
  names_.push_back(name);
  values_.push_back(std::move(value));
}

Array& ParamSet::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ContractError("unknown parameter: " + name);
  return values_[it->second];
}

const Array& ParamSet::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ContractError("unknown parameter: " + name);
  return values_[it->second];
}

namespace {

// Householder QR on a column-major copy; returns Q's first `cols` columns.
// Small matrices only (layer widths), no pivoting.
void qr_orthonormal(int rows, int cols, std::vector<double>& a /* col-major rows x cols */) {
  std::vector<double> q(static_cast<std::size_t>(rows) * rows, 0.0);
  for (int i = 0; i < rows; ++i) q[static_cast<std::size_t>(i) * rows + i] = 1.0;  // Q = I

  std::vector<double> v(static_cast<std::size_t>(rows));
  for (int k = 0; k < cols && k < rows - 1; ++k) {
    double norm = 0.0;
    for (int i = k; i < rows; ++i) {
      v[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(k) * rows + i];
      norm += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double alpha = a[static_cast<std::size_t>(k) * rows + k] >= 0.0 ? -norm : norm;
    v[static_cast<std::size_t>(k)] -= alpha;
    double vnorm2 = 0.0;
    for (int i = k; i < rows; ++i) vnorm2 += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    if (vnorm2 == 0.0) continue;

    // A <- (I - 2vv^T/v^Tv) A
    for (int j = k; j < cols; ++j) {
      double dot = 0.0;
      for (int i = k; i < rows; ++i) dot += v[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(j) * rows + i];
      const double f = 2.0 * dot / vnorm2;
      for (int i = k; i < rows; ++i) a[static_cast<std::size_t>(j) * rows + i] -= f * v[static_cast<std::size_t>(i)];
    }
    // Q <- Q (I - 2vv^T/v^Tv)
    for (int j = 0; j < rows; ++j) {
      double dot = 0.0;
      for (int i = k; i < rows; ++i) dot += v[static_cast<std::size_t>(i)] * q[static_cast<std::size_t>(i) * rows + j];
      const double f = 2.0 * dot / vnorm2;
      for (int i = k; i < rows; ++i) q[static_cast<std::size_t>(i) * rows + j] -= f * v[static_cast<std::size_t>(i)];
    }
  }

  // Sign-fix with diag(R) so the factorization is unique, then hand back Q's
  // leading columns in the input buffer (still column-major).
  std::vector<double> out(static_cast<std::size_t>(rows) * cols);
  for (int j = 0; j < cols; ++j) {
    const double sign = a[static_cast<std::size_t>(j) * rows + j] >= 0.0 ? 1.0 : -1.0;
    for (int i = 0; i < rows; ++i)
      out[static_cast<std::size_t>(j) * rows + i] = sign * q[static_cast<std::size_t>(j) * rows + i];
  }
  a = std::move(out);
}

}  // namespace

Array orthogonal(int rows, int cols, double gain, Rng& rng) {
  const bool transpose = rows < cols;
  const int r = transpose ? cols : rows;
  const int c = transpose ? rows : cols;

  std::vector<double> a(static_cast<std::size_t>(r) * c);
  for (double& v : a) v = rng.normal();  // col-major fill; order only affects which draw lands where
  qr_orthonormal(r, c, a);

  Array w = Array::zeros({rows, cols});
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double q = transpose ? a[static_cast<std::size_t>(i) * r + j]   // (j,i) of the tall factor
                                 : a[static_cast<std::size_t>(j) * r + i];
      w.at(i, j) = gain * q;
    }
  }
  return w;
}

void init_mlp(ParamSet& params, const std::string& prefix, const MlpSpec& spec, double final_gain,
              Rng& rng) {
  spec.validate();
  const int layers = spec.layer_count();
  for (int l = 0; l < layers; ++l) {
    const int in = spec.widths[static_cast<std::size_t>(l)];
    const int out = spec.widths[static_cast<std::size_t>(l) + 1];
    const double gain = (l == layers - 1) ? final_gain : std::sqrt(2.0);
    params.add(prefix + "/W" + std::to_string(l), orthogonal(in, out, gain, rng));
    params.add(prefix + "/b" + std::to_string(l), Array::zeros({out}));
  }
}

BoundParams::BoundParams(Graph& g, const ParamSet& params) {
  ordered_.reserve(params.count());
  for (std::size_t i = 0; i < params.count(); ++i) {
    NodeId id = g.leaf(params.at(i));
    ids_[params.names()[i]] = id;
    ordered_.push_back(id);
  }
}

NodeId BoundParams::node(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) throw ContractError("parameter not bound: " + name);
  return it->second;
}

std::vector<Array> BoundParams::gradients(const Graph& g) const {
  std::vector<Array> grads;
  grads.reserve(ordered_.size());
  for (NodeId id : ordered_) grads.push_back(g.grad(id));
  return grads;
}

namespace {

NodeId apply_activation(Graph& g, NodeId x, Activation act) {
  switch (act) {
    case Activation::kIdentity: return x;
    case Activation::kTanh: return g.tanh_(x);
    case Activation::kRelu: return g.relu_(x);
    case Activation::kSigmoid: return g.sigmoid_(x);
  }
  throw ContractError("unhandled activation");
}

}  // namespace

NodeId mlp_forward(Graph& g, const BoundParams& bound, const std::string& prefix,
                   const MlpSpec& spec, NodeId input) {
  if (g.value(input).cols() != spec.input_dim()) {
    throw ShapeError("mlp_forward(" + prefix + "): input width " +
                     std::to_string(g.value(input).cols()) + " != expected " +
                     std::to_string(spec.input_dim()));
  }
  NodeId h = input;
  for (int l = 0; l < spec.layer_count(); ++l) {
    NodeId w = bound.node(prefix + "/W" + std::to_string(l));
    NodeId b = bound.node(prefix + "/b" + std::to_string(l));
    h = g.add_rowvec(g.matmul(h, w), b);
    h = apply_activation(g, h, spec.activations[static_cast<std::size_t>(l)]);
  }
  return h;
}

Array mlp_eval(const ParamSet& params, const std::string& prefix, const MlpSpec& spec,
               const Array& input) {
  Graph g;
  BoundParams bound(g, params);
  NodeId in = g.leaf(input);
  NodeId out = mlp_forward(g, bound, prefix, spec, in);
  return g.value(out);
}

}  // namespace pome
