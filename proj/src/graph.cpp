#include "pome/graph.hpp"

#include <algorithm>
#include <cmath>

#include "pome/error.hpp"

namespace pome {

namespace {

void require_same_shape(const Array& a, const Array& b, const char* op) {
  if (!same_shape(a, b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.shape) + " vs " +
                     shape_string(b.shape));
  }
}

void require_matrix(const Array& a, const char* op) {
  if (a.ndim() != 2) throw ShapeError(std::string(op) + ": expected rank-2, got " + shape_string(a.shape));
}

}  // namespace

NodeId Graph::emplace(Array value, std::vector<NodeId> inputs,
                      std::function<void(Graph&, NodeId)> backprop) {
  nodes_.push_back(Node{std::move(value), Array{}, std::move(inputs), std::move(backprop)});
  return static_cast<NodeId>(nodes_.size()) - 1;
}

NodeId Graph::leaf(Array value) { return emplace(std::move(value), {}, {}); }

NodeId Graph::matmul(NodeId a, NodeId b) {
  const Array& av = value(a);
  const Array& bv = value(b);
  require_matrix(av, "matmul");
  require_matrix(bv, "matmul");
  if (av.cols() != bv.rows()) {
    throw ShapeError("matmul: inner dimensions differ, " + shape_string(av.shape) + " x " +
                     shape_string(bv.shape));
  }
  const int m = av.rows(), k = av.cols(), n = bv.cols();
  Array out = Array::zeros({m, n});
  for (int i = 0; i < m; ++i) {
    const double* arow = &av.data[static_cast<std::size_t>(i) * k];
    double* orow = &out.data[static_cast<std::size_t>(i) * n];
    for (int p = 0; p < k; ++p) {
      const double aip = arow[p];
      if (aip == 0.0) continue;  // one-hot inputs make this common
      const double* brow = &bv.data[static_cast<std::size_t>(p) * n];
      for (int j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  return emplace(std::move(out), {a, b}, [a, b, m, k, n](Graph& g, NodeId self) {
    const Array& go = g.grad(self);
    const Array& av2 = g.value(a);
    const Array& bv2 = g.value(b);
    Array& ga = g.grad_mut(a);
    Array& gb = g.grad_mut(b);
    // dA = dC * B^T
    for (int i = 0; i < m; ++i) {
      const double* grow = &go.data[static_cast<std::size_t>(i) * n];
      double* garow = &ga.data[static_cast<std::size_t>(i) * k];
      for (int p = 0; p < k; ++p) {
        const double* brow = &bv2.data[static_cast<std::size_t>(p) * n];
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += grow[j] * brow[j];
        garow[p] += acc;
      }
    }
    // dB = A^T * dC
    for (int i = 0; i < m; ++i) {
      const double* arow = &av2.data[static_cast<std::size_t>(i) * k];
      const double* grow = &go.data[static_cast<std::size_t>(i) * n];
      for (int p = 0; p < k; ++p) {
        const double aip = arow[p];
        if (aip == 0.0) continue;
        double* gbrow = &gb.data[static_cast<std::size_t>(p) * n];
        for (int j = 0; j < n; ++j) gbrow[j] += aip * grow[j];
      }
    }
  });
}

NodeId Graph::add(NodeId a, NodeId b) {
  const Array& av = value(a);
  const Array& bv = value(b);
  require_same_shape(av, bv, "add");
  Array out = av;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += bv.data[i];
  return emplace(std::move(out), {a, b}, [a, b](Graph& g, NodeId self) {
    const Array& go = g.grad(self);
    Array& ga = g.grad_mut(a);
    Array& gb = g.grad_mut(b);
    for (std::size_t i = 0; i < go.data.size(); ++i) {
      ga.data[i] += go.data[i];
      gb.data[i] += go.data[i];
    }
  });
}

NodeId Graph::sub(NodeId a, NodeId b) {
  const Array& av = value(a);
  const Array& bv = value(b);
  require_same_shape(av, bv, "sub");
  Array out = av;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= bv.data[i];
  return emplace(std::move(out), {a, b}, [a, b](Graph& g, NodeId self) {
    const Array& go = g.grad(self);
    Array& ga = g.grad_mut(a);
    Array& gb = g.grad_mut(b);
    for (std::size_t i = 0; i < go.data.size(); ++i) {
      ga.data[i] += go.data[i];
      gb.data[i] -= go.data[i];
    }
  });
}

NodeId Graph::mul(NodeId a, NodeId b) {
  const Array& av = value(a);
  const Array& bv = value(b);
  require_same_shape(av, bv, "mul");
  Array out = av;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= bv.data[i];
  return emplace(std::move(out), {a, b}, [a, b](Graph& g, NodeId self) {
    const Array& go = g.grad(self);
    const Array& av2 = g.value(a);
    const Array& bv2 = g.value(b);
    Array& ga = g.grad_mut(a);
    Array& gb = g.grad_mut(b);
    for (std::size_t i = 0; i < go.data.size(); ++i) {
      ga.data[i] += go.data[i] * bv2.data[i];
      gb.data[i] += go.data[i] * av2.data[i];
    }
  });
}

NodeId Graph::add_rowvec(NodeId x, NodeId b) {
  const Array& xv = value(x);
  const Array& bv = value(b);
  require_matrix(xv, "add_rowvec");
  if (bv.size() != xv.cols()) {
    throw ShapeError("add_rowvec: bias length " + std::to_string(bv.size()) +
                     " does not match row width " + std::to_string(xv.cols()));
  }
  const int m = xv.rows(), n = xv.cols();
  Array out = xv;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out.data[static_cast<std::size_t>(i) * n + j] += bv.data[j];
  return emplace(std::move(out), {x, b}, [x, b, m, n](Graph& g, NodeId self) {
    const Array& go = g.grad(self);
    Array& gx = g.grad_mut(x);
    Array& gb = g.grad_mut(b);
    for (int i = 0; i < m; ++i) {
      const double* grow = &go.data[static_cast<std::size_t>(i) * n];
      double* gxrow = &gx.data[static_cast<std::size_t>(i) * n];
      for (int j = 0; j < n; ++j) {
        gxrow[j] += grow[j];
        gb.data[j] += grow[j];
      }
    }
  });
}

NodeId Graph::scale(NodeId a, double c) {
  Array out = value(a);
  for (double& v : out.data) v *= c;
  return emplace(std::move(out), {a}, [a, c](Graph& g, NodeId self) {
    const Array& go = g.grad(self);
    Array& ga = g.grad_mut(a);
    for (std::size_t i = 0; i < go.data.size(); ++i) ga.data[i] += c * go.data[i];
  });
}

NodeId Graph::tanh_(NodeId a) {
  Array out = value(a);
  for (double& v : out.data) v = std::tanh(v);
  return emplace(std::move(out), {a}, [a](Graph& g, NodeId self) {
    const Array& go = g.grad(self);
    const Array& y = g.value(self);
    Array& ga = g.grad_mut(a);
    for (std::size_t i = 0; i < go.data.size(); ++i)
      ga.data[i] += go.data[i] * (1.0 - y.data[i] * y.data[i]);
  });
}

NodeId Graph::relu_(NodeId a) {
  Array out = value(a);
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return emplace(std::move(out), {a}, [a](Graph& g, NodeId self) {
    const Array& go = g.grad(self);
    const Array& x = g.value(a);
    Array& ga = g.grad_mut(a);
    for (std::size_t i = 0; i < go.data.size(); ++i)
      if (x.data[i] > 0.0) ga.data[i] += go.data[i];
  });
}

NodeId Graph::sigmoid_(NodeId a) {
  Array out = value(a);
  for (double& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
  return emplace(std::move(out), {a}, [a](Graph& g, NodeId self) {
    const Array& go = g.grad(self);
    const Array& y = g.value(self);
    Array& ga = g.grad_mut(a);
    for (std::size_t i = 0; i < go.data.size(); ++i)
      ga.data[i] += go.data[i] * y.data[i] * (1.0 - y.data[i]);
  });
}

NodeId Graph::exp_(NodeId a) {
  Array out = value(a);
  for (double& v : out.data) v = std::exp(v);
  return emplace(std::move(out), {a}, [a](Graph& g, NodeId self) {
    const Array& go = g.grad(self);
    const Array& y = g.value(self);
    Array& ga = g.grad_mut(a);
    for (std::size_t i = 0; i < go.data.size(); ++i) ga.data[i] += go.data[i] * y.data[i];
  });
}

NodeId Graph::log_(NodeId a) {
  Array out = value(a);
  for (double& v : out.data) v = std::log(v);
  return emplace(std::move(out), {a}, [a](Graph& g, NodeId self) {
    const Array& go = g.grad(self);
    const Array& x = g.value(a);
    Array& ga = g.grad_mut(a);
    for (std::size_t i = 0; i < go.data.size(); ++i) ga.data[i] += go.data[i] / x.data[i];
  });
}

NodeId Graph::square(NodeId a) {
  Array out = value(a);
  for (double& v : out.data) v = v * v;
  return emplace(std::move(out), {a}, [a](Graph& g, NodeId self) {
    const Array& go = g.grad(self);
    const Array& x = g.value(a);
    Array& ga = g.grad_mut(a);
    for (std::size_t i = 0; i < go.data.size(); ++i) ga.data[i] += go.data[i] * 2.0 * x.data[i];
  });
}

NodeId Graph::clip(NodeId a, double lo, double hi) {
  if (!(lo <= hi)) throw ContractError("clip: lo > hi");
  Array out = value(a);
  for (double& v : out.data) v = std::min(std::max(v, lo), hi);
  return emplace(std::move(out), {a}, [a, lo, hi](Graph& g, NodeId self) {
    const Array& go = g.grad(self);
    const Array& x = g.value(a);
    Array& ga = g.grad_mut(a);
    for (std::size_t i = 0; i < go.data.size(); ++i)
      if (x.data[i] >= lo && x.data[i] <= hi) ga.data[i] += go.data[i];
  });
}

NodeId Graph::min_elem(NodeId a, NodeId b) {
  const Array& av = value(a);
  const Array& bv = value(b);
  require_same_shape(av, bv, "min_elem");
  Array out = av;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = std::min(av.data[i], bv.data[i]);
  return emplace(std::move(out), {a, b}, [a, b](Graph& g, NodeId self) {
    const Array& go = g.grad(self);
    const Array& av2 = g.value(a);
    const Array& bv2 = g.value(b);
    Array& ga = g.grad_mut(a);
    Array& gb = g.grad_mut(b);
    for (std::size_t i = 0; i < go.data.size(); ++i) {
      if (av2.data[i] <= bv2.data[i])
        ga.data[i] += go.data[i];
      else
        gb.data[i] += go.data[i];
    }
  });
}

NodeId Graph::sum(NodeId a) {
  double acc = 0.0;
  for (double v : value(a).data) acc += v;
  return emplace(Array::scalar(acc), {a}, [a](Graph& g, NodeId self) {
    const double go = g.grad(self).data[0];
    Array& ga = g.grad_mut(a);
    for (double& v : ga.data) v += go;
  });
}

NodeId Graph::mean(NodeId a) {
  const std::int64_t n = value(a).size();
  if (n == 0) throw ContractError("mean of empty array");
  return scale(sum(a), 1.0 / static_cast<double>(n));
}

NodeId Graph::flatten(NodeId a) {
  Array out = value(a);
  out.shape = {static_cast<int>(out.data.size())};
  return emplace(std::move(out), {a}, [a](Graph& g, NodeId self) {
    const Array& go = g.grad(self);
    Array& ga = g.grad_mut(a);
    for (std::size_t i = 0; i < go.data.size(); ++i) ga.data[i] += go.data[i];
  });
}

NodeId Graph::log_softmax_rows(NodeId a) {
  const Array& xv = value(a);
  require_matrix(xv, "log_softmax_rows");
  const int m = xv.rows(), n = xv.cols();
  if (n == 0) throw ContractError("log_softmax_rows: zero-width rows");
  Array out = xv;
  for (int i = 0; i < m; ++i) {
    double* row = &out.data[static_cast<std::size_t>(i) * n];
    double mx = row[0];
    for (int j = 1; j < n; ++j) mx = std::max(mx, row[j]);
    double lse = 0.0;
    for (int j = 0; j < n; ++j) lse += std::exp(row[j] - mx);
    lse = std::log(lse) + mx;
    for (int j = 0; j < n; ++j) row[j] -= lse;
  }
  return emplace(std::move(out), {a}, [a, m, n](Graph& g, NodeId self) {
    const Array& go = g.grad(self);
    const Array& y = g.value(self);
    Array& ga = g.grad_mut(a);
    for (int i = 0; i < m; ++i) {
      const double* grow = &go.data[static_cast<std::size_t>(i) * n];
      const double* yrow = &y.data[static_cast<std::size_t>(i) * n];
      double* garow = &ga.data[static_cast<std::size_t>(i) * n];
      double gsum = 0.0;
      for (int j = 0; j < n; ++j) gsum += grow[j];
      for (int j = 0; j < n; ++j) garow[j] += grow[j] - std::exp(yrow[j]) * gsum;
    }
  });
}

NodeId Graph::gather_rows(NodeId a, std::vector<int> index) {
  const Array& xv = value(a);
  require_matrix(xv, "gather_rows");
  const int m = xv.rows(), n = xv.cols();
  if (static_cast<int>(index.size()) != m) {
    throw ShapeError("gather_rows: index length " + std::to_string(index.size()) +
                     " does not match row count " + std::to_string(m));
  }
  Array out = Array::zeros({m});
  for (int i = 0; i < m; ++i) {
    const int j = index[static_cast<std::size_t>(i)];
    if (j < 0 || j >= n) throw ContractError("gather_rows: column index out of range");
    out.data[static_cast<std::size_t>(i)] = xv.at(i, j);
  }
  return emplace(std::move(out), {a},
                 [a, idx = std::move(index), n](Graph& g, NodeId self) {
                   const Array& go = g.grad(self);
                   Array& ga = g.grad_mut(a);
                   for (std::size_t i = 0; i < idx.size(); ++i)
                     ga.data[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(idx[i])] +=
                         go.data[i];
                 });
}

void Graph::backward(NodeId loss) {
  if (loss < 0 || loss >= static_cast<NodeId>(nodes_.size()))
    throw ContractError("backward: loss node out of range");
  if (!value(loss).is_scalar())
    throw ContractError("backward: loss must be scalar, got shape " +
                        shape_string(value(loss).shape));

  // Mark the subgraph the loss depends on.
  std::vector<char> reachable(nodes_.size(), 0);
  std::vector<NodeId> stack{loss};
  reachable[static_cast<std::size_t>(loss)] = 1;
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    for (NodeId in : nodes_[static_cast<std::size_t>(id)].inputs) {
      if (!reachable[static_cast<std::size_t>(in)]) {
        reachable[static_cast<std::size_t>(in)] = 1;
        stack.push_back(in);
      }
    }
  }

  for (Node& node : nodes_) node.grad = Array::zeros(node.value.shape);
  grad_mut(loss).data[0] = 1.0;

  // Tape order is topological, so a reverse scan visits each node after all
  // of its consumers.
  for (NodeId id = loss; id >= 0; --id) {
    Node& node = nodes_[static_cast<std::size_t>(id)];
    if (reachable[static_cast<std::size_t>(id)] && node.backprop) node.backprop(*this, id);
  }
}

}  // namespace pome
