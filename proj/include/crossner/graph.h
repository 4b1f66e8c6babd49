#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "crossner/tensor.h"

namespace crossner {

// A named, persistent leaf tensor. `grad` is allocated iff the parameter is
// trainable; backward passes add into it until zero_grad().
template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
  bool trainable = true;

  bool requires_grad() const { return trainable; }
  void zero_grad() { grad.fill(T(0)); }
};

// Ordered collection of parameters. Addresses are stable for the lifetime of
// the store, so graphs may hold pointers into it.
template <typename T>
class ParameterStore {
 public:
  Parameter<T>& add(std::string name, Tensor<T> value, bool trainable = true);

  Parameter<T>& at(const std::string& name);
  const Parameter<T>& at(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  std::size_t size() const { return params_.size(); }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  // Number of trainable scalars.
  std::size_t trainable_count() const;
  void zero_grad();

 private:
  std::deque<Parameter<T>> params_;
  std::map<std::string, std::size_t> index_;
};

template <typename T>
class Graph;

// Handle to a node in a Graph.
template <typename T>
struct Var {
  Graph<T>* graph = nullptr;
  std::size_t id = 0;

  const Tensor<T>& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

// Tape of operations. Nodes are appended in evaluation order, which is a
// valid topological order; backward walks the tape once in reverse.
template <typename T>
class Graph {
 public:
  // Propagates the node's gradient into its inputs.
  using BackwardFn = std::function<void(Graph&, std::size_t self)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Constant input; never receives a gradient.
  Var<T> constant(Tensor<T> value);
  // Leaf bound to a parameter. Repeated calls return the same node.
  Var<T> param(Parameter<T>& p);

  // Appends an op node. `backward` may be empty for non-differentiable ops.
  Var<T> record(Tensor<T> value, std::vector<std::size_t> inputs, BackwardFn backward);

  const Tensor<T>& value(std::size_t id) const { return nodes_[id].value; }
  const Tensor<T>& value(Var<T> v) const { return nodes_[v.id].value; }
  bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }

  // Gradient buffer of a node; zero-initialized on first access.
  Tensor<T>& grad(std::size_t id);
  const Tensor<T>& grad(Var<T> v) const { return nodes_[v.id].grad; }
  bool has_grad(std::size_t id) const { return !nodes_[id].grad.empty(); }

  std::size_t size() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss) = 1 and accumulates into every reachable trainable
  // parameter. `loss` must be 1 x 1.
  void backward(Var<T> loss);

  // Node ids in the order backward visited them (for inspection and tests).
  const std::vector<std::size_t>& last_backward_order() const { return visit_order_; }

 private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    Parameter<T>* param = nullptr;
    bool needs_grad = false;
  };

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter<T>*, std::size_t> param_nodes_;
  std::vector<std::size_t> visit_order_;
};

template <typename T>
const Tensor<T>& Var<T>::value() const {
  return graph->value(id);
}

extern template class ParameterStore<float>;
extern template class ParameterStore<double>;
extern template class Graph<float>;
extern template class Graph<double>;

}  // namespace crossner
