#include "crossner/graph.h"

#include "crossner/error.h"

namespace crossner {

template <typename T>
Parameter<T>& ParameterStore<T>::add(std::string name, Tensor<T> value, bool trainable) {
  if (index_.count(name)) throw ConfigError("duplicate parameter '" + name + "'");
  index_.emplace(name, params_.size());
  Parameter<T>& p = params_.emplace_back();
  p.name = std::move(name);
  p.trainable = trainable;
  if (trainable) p.grad = Tensor<T>(value.rows(), value.cols());
  p.value = std::move(value);
  return p;
}

template <typename T>
Parameter<T>& ParameterStore<T>::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("unknown parameter '" + name + "'");
  return params_[it->second];
}

template <typename T>
const Parameter<T>& ParameterStore<T>::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("unknown parameter '" + name + "'");
  return params_[it->second];
}

template <typename T>
std::size_t ParameterStore<T>::trainable_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) {
    if (p.trainable) n += p.value.size();
  }
  return n;
}

template <typename T>
void ParameterStore<T>::zero_grad() {
  for (auto& p : params_) {
    if (p.trainable) p.zero_grad();
  }
}

template <typename T>
Var<T> Graph<T>::constant(Tensor<T> value) {
  Node& n = nodes_.emplace_back();
  n.value = std::move(value);
  return {this, nodes_.size() - 1};
}

template <typename T>
Var<T> Graph<T>::param(Parameter<T>& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return {this, it->second};
  Node& n = nodes_.emplace_back();
  n.value = p.value;
  n.param = &p;
  n.needs_grad = p.trainable;
  const std::size_t id = nodes_.size() - 1;
  param_nodes_.emplace(&p, id);
  return {this, id};
}

template <typename T>
Var<T> Graph<T>::record(Tensor<T> value, std::vector<std::size_t> inputs, BackwardFn backward) {
  bool needs = false;
  for (std::size_t in : inputs) needs = needs || nodes_[in].needs_grad;
  Node& n = nodes_.emplace_back();
  n.value = std::move(value);
  n.inputs = std::move(inputs);
  n.needs_grad = needs && static_cast<bool>(backward);
  if (n.needs_grad) n.backward = std::move(backward);
  return {this, nodes_.size() - 1};
}

template <typename T>
Tensor<T>& Graph<T>::grad(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty() && !n.value.empty()) n.grad = Tensor<T>(n.value.rows(), n.value.cols());
  return n.grad;
}

template <typename T>
void Graph<T>::backward(Var<T> loss) {
  if (loss.graph != this) throw ContractError("backward: loss belongs to another graph");
  const Tensor<T>& lv = nodes_[loss.id].value;
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw ContractError("backward: loss must be scalar, got " + lv.shape_string());
  }
  visit_order_.clear();
  grad(loss.id)[0] += T(1);
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.needs_grad || n.grad.empty()) continue;
    visit_order_.push_back(i);
    if (n.param != nullptr) {
      Tensor<T>& target = n.param->grad;
      for (std::size_t k = 0; k < target.size(); ++k) target[k] += n.grad[k];
    } else if (n.backward) {
      n.backward(*this, i);
    }
  }
}

template class ParameterStore<float>;
template class ParameterStore<double>;
template class Graph<float>;
template class Graph<double>;

}  // namespace crossner
