#include "crossner/attention.h"

#include <cmath>
#include <string>

#include "crossner/error.h"
#include "crossner/features.h"
#include "crossner/ops.h"

namespace crossner {

namespace {

template <typename T>
void require_hidden(Var<T> hidden, const Parameter<T>& projection) {
  if (hidden.cols() != projection.value.rows()) {
    throw DimensionError("attention: hidden states " + hidden.value().shape_string() +
                         " do not match projection " + projection.name + " " +
                         projection.value.shape_string());
  }
}

}  // namespace

template <typename T>
Var<T> attention_scores(Var<T> hidden, const AttentionHead<T>& head) {
  require_hidden(hidden, *head.query);
  Graph<T>& g = *hidden.graph;
  Var<T> q = ops::matmul(hidden, g.param(*head.query));
  Var<T> k = ops::matmul(hidden, g.param(*head.key));
  const T inv_sqrt = T(1) / std::sqrt(static_cast<T>(head.query->value.cols()));
  return ops::rowwise_softmax(ops::scale(ops::matmul(q, ops::transpose(k)), inv_sqrt));
}

template <typename T>
Var<T> attention_context(Var<T> alpha, Var<T> hidden, const AttentionHead<T>& head) {
  require_hidden(hidden, *head.value);
  if (alpha.rows() != hidden.rows() || alpha.cols() != hidden.rows()) {
    throw DimensionError("attention: weights " + alpha.value().shape_string() + " do not match " +
                         std::to_string(hidden.rows()) + " tokens");
  }
  return ops::matmul(alpha, ops::matmul(hidden, hidden.graph->param(*head.value)));
}

template <typename T>
Var<T> att_classifier_input(Var<T> hidden, std::span<const Var<T>> contexts) {
  std::vector<Var<T>> parts{hidden};
  parts.insert(parts.end(), contexts.begin(), contexts.end());
  return ops::concat_cols<T>(parts);
}

template <typename T>
MultiHeadAttention<T>::MultiHeadAttention(ParameterStore<T>& store, std::size_t hidden_dim,
                                          std::size_t heads, std::size_t head_dim, Rng& rng) {
  for (std::size_t i = 0; i < heads; ++i) {
    const std::string prefix = "attention.head" + std::to_string(i + 1);
    AttentionHead<T> h;
    h.query = &store.add(prefix + ".query", glorot_uniform<T>(hidden_dim, head_dim, rng));
    h.key = &store.add(prefix + ".key", glorot_uniform<T>(hidden_dim, head_dim, rng));
    h.value = &store.add(prefix + ".value", glorot_uniform<T>(hidden_dim, head_dim, rng));
    heads_.push_back(h);
  }
}

template <typename T>
AttentionOutput<T> MultiHeadAttention<T>::forward(Var<T> hidden) const {
  AttentionOutput<T> out;
  for (const AttentionHead<T>& h : heads_) {
    out.alphas.push_back(attention_scores(hidden, h));
    out.contexts.push_back(attention_context(out.alphas.back(), hidden, h));
  }
  return out;
}

#define CROSSNER_INSTANTIATE_ATTENTION(T)                                             \
  template Var<T> attention_scores(Var<T>, const AttentionHead<T>&);                  \
  template Var<T> attention_context(Var<T>, Var<T>, const AttentionHead<T>&);         \
  template Var<T> att_classifier_input(Var<T>, std::span<const Var<T>>);              \
  template class MultiHeadAttention<T>;

CROSSNER_INSTANTIATE_ATTENTION(float)
CROSSNER_INSTANTIATE_ATTENTION(double)

}  // namespace crossner
