#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crossner/graph.h"
#include "crossner/rng.h"

namespace crossner {

template <typename T>
struct AttentionHead {
  Parameter<T>* query = nullptr;  // d_h x d_c
  Parameter<T>* key = nullptr;    // d_h x d_c
  Parameter<T>* value = nullptr;  // d_h x d_c
};

// alpha = softmax_rows(H Wq (H Wk)^T / sqrt(d_c)); rows are querying tokens.
template <typename T>
Var<T> attention_scores(Var<T> hidden, const AttentionHead<T>& head);

// C = alpha H Wv.
template <typename T>
Var<T> attention_context(Var<T> alpha, Var<T> hidden, const AttentionHead<T>& head);

// [H | C_1 | ... | C_m], column-wise.
template <typename T>
Var<T> att_classifier_input(Var<T> hidden, std::span<const Var<T>> contexts);

template <typename T>
struct AttentionOutput {
  std::vector<Var<T>> alphas;    // m x (n x n)
  std::vector<Var<T>> contexts;  // m x (n x d_c)
};

template <typename T>
class MultiHeadAttention {
 public:
  MultiHeadAttention(ParameterStore<T>& store, std::size_t hidden_dim, std::size_t heads,
                     std::size_t head_dim, Rng& rng);

  AttentionOutput<T> forward(Var<T> hidden) const;

  std::size_t heads() const { return heads_.size(); }
  const AttentionHead<T>& head(std::size_t i) const { return heads_.at(i); }

 private:
  std::vector<AttentionHead<T>> heads_;
};

}  // namespace crossner
