#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "crossner/graph.h"

namespace crossner::ops {

// Differentiable primitives. Every op checks shapes and throws DimensionError
// naming the offending shapes.

template <typename T> Var<T> matmul(Var<T> a, Var<T> b);
template <typename T> Var<T> transpose(Var<T> a);

template <typename T> Var<T> add(Var<T> a, Var<T> b);
template <typename T> Var<T> sub(Var<T> a, Var<T> b);
template <typename T> Var<T> mul(Var<T> a, Var<T> b);
// a (n x m) + row (1 x m), broadcast over rows.
template <typename T> Var<T> add_row(Var<T> a, Var<T> row);
// a (n x m) * row (1 x m), broadcast over rows.
template <typename T> Var<T> mul_row(Var<T> a, Var<T> row);
template <typename T> Var<T> scale(Var<T> a, T factor);

template <typename T> Var<T> sigmoid(Var<T> a);
template <typename T> Var<T> tanh(Var<T> a);

template <typename T> Var<T> concat_cols(std::span<const Var<T>> parts);
template <typename T> Var<T> concat_rows(std::span<const Var<T>> parts);
template <typename T> Var<T> slice_rows(Var<T> a, std::size_t begin, std::size_t count);
template <typename T> Var<T> slice_cols(Var<T> a, std::size_t begin, std::size_t count);

// out[i] = table[indices[i]]; backward scatters (adds) into the table rows.
template <typename T> Var<T> gather_rows(Var<T> table, std::vector<std::size_t> indices);
// out[k] = a(coords[k].first, coords[k].second) as a k x 1 column.
template <typename T>
Var<T> gather_elements(Var<T> a, std::vector<std::pair<std::size_t, std::size_t>> coords);

// Max over each block of `segment` consecutive rows, per column. The output
// has rows/segment rows. Ties route the gradient to the lowest row.
template <typename T> Var<T> segment_max_rows(Var<T> a, std::size_t segment);
template <typename T> Var<T> max_over_time(Var<T> a);

template <typename T> Var<T> rowwise_softmax(Var<T> a);
template <typename T> Var<T> rowwise_log_softmax(Var<T> a);

template <typename T> Var<T> sum(Var<T> a);
template <typename T> Var<T> mean(Var<T> a);

// Log partition of a linear-chain CRF. `scores` is n x K emission scores,
// `transitions` is (K+2) x (K+2) with row/col K = START and K+1 = STOP;
// transitions(i, j) scores moving from tag i to tag j.
template <typename T> Var<T> crf_log_partition(Var<T> scores, Var<T> transitions);

// Inverted dropout with one Bernoulli(1 - rate) column mask per call,
// broadcast across all rows (time steps). Identity when !training or rate 0.
template <typename T>
Var<T> variational_dropout(Var<T> a, double rate, std::uint64_t mask_seed, bool training);

// The column mask variational_dropout would apply (values 0 or 1/(1-rate)).
template <typename T>
Tensor<T> dropout_mask(std::size_t width, double rate, std::uint64_t mask_seed);

}  // namespace crossner::ops
