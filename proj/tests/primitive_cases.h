#pragma once

#include <functional>

#include "crossner/graph.h"
#include "crossner/ops.h"
#include "test_util.h"

namespace crossner::testing {

// A scalar function of one input tensor exercising a single primitive. The
// Rng supplies the fixed side inputs.
struct PrimitiveCase {
  const char* name;
  std::size_t rows, cols;
  std::function<Var<double>(Graph<double>&, Var<double>, Rng&)> body;
};

// Weighted sum so that every output entry gets a distinct upstream gradient.
inline Var<double> weighted(Graph<double>& g, Var<double> y, Rng& rng) {
  return ops::sum(ops::mul(y, g.constant(random_tensor(y.rows(), y.cols(), rng))));
}

inline const std::vector<PrimitiveCase>& primitive_cases() {
  using D = double;
  static const std::vector<PrimitiveCase> cases = {
    {"matmul_left", 3, 4, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::matmul(x, g.constant(random_tensor(4, 2, r))), r); }},
    {"matmul_right", 4, 2, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::matmul(g.constant(random_tensor(3, 4, r)), x), r); }},
    {"transpose", 2, 3, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::transpose(x), r); }},
    {"add", 2, 3, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::add(x, g.constant(random_tensor(2, 3, r))), r); }},
    {"sub", 2, 3, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::sub(g.constant(random_tensor(2, 3, r)), x), r); }},
    {"mul", 2, 3, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::mul(x, x), r); }},
    {"add_row", 1, 3, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::add_row(g.constant(random_tensor(4, 3, r)), x), r); }},
    {"mul_row", 4, 3, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::mul_row(x, g.constant(random_tensor(1, 3, r))), r); }},
    {"scale", 2, 2, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::scale(x, -1.7), r); }},
    {"sigmoid", 3, 3, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::sigmoid(ops::scale(x, 3.0)), r); }},
    {"tanh", 3, 3, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::tanh(ops::scale(x, 2.0)), r); }},
    {"concat_cols", 2, 2, [](Graph<D>& g, Var<D> x, Rng& r) { const Var<D> p[] = {x, g.constant(random_tensor(2, 3, r)), x}; return weighted(g, ops::concat_cols<D>(p), r); }},
    {"concat_rows", 2, 2, [](Graph<D>& g, Var<D> x, Rng& r) { const Var<D> p[] = {g.constant(random_tensor(1, 2, r)), x, x}; return weighted(g, ops::concat_rows<D>(p), r); }},
    {"slice_rows", 4, 3, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::slice_rows(x, 1, 2), r); }},
    {"slice_cols", 3, 4, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::slice_cols(x, 1, 2), r); }},
    {"gather_rows", 4, 3, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::gather_rows(x, {2, 0, 2, 3}), r); }},
    {"gather_elements", 3, 3, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::gather_elements(x, {{0, 1}, {2, 2}, {0, 1}}), r); }},
    {"segment_max_rows", 6, 3, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::segment_max_rows(x, 3), r); }},
    {"max_over_time", 5, 4, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::max_over_time(x), r); }},
    {"rowwise_softmax", 3, 4, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::rowwise_softmax(ops::scale(x, 3.0)), r); }},
    {"rowwise_log_softmax", 3, 4, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::rowwise_log_softmax(ops::scale(x, 3.0)), r); }},
    {"sum", 2, 3, [](Graph<D>&, Var<D> x, Rng&) { return ops::sum(x); }},
    {"mean", 2, 3, [](Graph<D>& g, Var<D> x, Rng& r) { return ops::mean(ops::mul(x, g.constant(random_tensor(2, 3, r)))); }},
    {"variational_dropout", 4, 6, [](Graph<D>& g, Var<D> x, Rng& r) { return weighted(g, ops::variational_dropout(x, 0.35, 17, true), r); }},
    {"crf_scores", 4, 3, [](Graph<D>& g, Var<D> x, Rng& r) { return ops::crf_log_partition(x, g.constant(random_tensor(5, 5, r))); }},
    {"crf_transitions", 5, 5, [](Graph<D>& g, Var<D> x, Rng& r) { return ops::crf_log_partition(g.constant(random_tensor(4, 3, r)), x); }},
  };
  return cases;
}

}  // namespace crossner::testing
