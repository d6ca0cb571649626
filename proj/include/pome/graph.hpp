#ifndef POME_GRAPH_HPP_
#define POME_GRAPH_HPP_

#include <functional>
#include <vector>

#include "pome/array.hpp"

namespace pome {

using NodeId = int;

// Reverse-mode autodiff tape over Array values. A Graph is built once per
// forward pass and thrown away after the gradients are read; nothing is
// cached between passes.
//
// Creation order is a topological order (an op may only reference nodes that
// already exist), so the backward sweep is a reverse scan of the tape. Only
// nodes reachable from the loss propagate; everything else keeps exact-zero
// gradients. Two identical graphs produce bitwise-identical gradients.
class Graph {
 public:
  // Leaves carry parameters and input/constant data alike; gradients are
  // accumulated into every reachable leaf.
  NodeId leaf(Array value);

  const Array& value(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  const Array& grad(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].grad; }
  std::size_t size() const { return nodes_.size(); }

  NodeId matmul(NodeId a, NodeId b);            // [m,k] x [k,n] -> [m,n]
  NodeId add(NodeId a, NodeId b);               // same shape
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);               // elementwise
  NodeId add_rowvec(NodeId x, NodeId b);        // [m,n] + [n], broadcast over rows
  NodeId scale(NodeId a, double c);
  NodeId tanh_(NodeId a);
  NodeId relu_(NodeId a);
  NodeId sigmoid_(NodeId a);
  NodeId exp_(NodeId a);
  NodeId log_(NodeId a);
  NodeId square(NodeId a);
  NodeId clip(NodeId a, double lo, double hi);  // zero gradient outside [lo, hi]
  NodeId min_elem(NodeId a, NodeId b);          // ties route the gradient to a
  NodeId sum(NodeId a);                         // -> scalar
  NodeId mean(NodeId a);                        // -> scalar
  NodeId flatten(NodeId a);                     // -> rank-1, same data
  NodeId log_softmax_rows(NodeId a);            // stable (max-subtracted), per row
  NodeId gather_rows(NodeId a, std::vector<int> index);  // [m,n] -> [m], pick per-row column

  // Seeds d(loss)/d(loss) = 1 and sweeps the tape in reverse order. The loss
  // node must be scalar; otherwise a ContractError is thrown.
  void backward(NodeId loss);

 private:
  struct Node {
    Array value;
    Array grad;
    std::vector<NodeId> inputs;
    std::function<void(Graph&, NodeId)> backprop;  // empty for leaves
  };

  NodeId emplace(Array value, std::vector<NodeId> inputs,
                 std::function<void(Graph&, NodeId)> backprop);
  Array& grad_mut(NodeId id) { return nodes_[static_cast<std::size_t>(id)].grad; }

  std::vector<Node> nodes_;
};

}  // namespace pome

#endif  // POME_GRAPH_HPP_
