#include "crossner/recurrent.h"

#include <vector>

#include "crossner/error.h"
#include "crossner/features.h"
#include "crossner/ops.h"

namespace crossner {

template <typename T>
LstmCell<T> LstmCell<T>::create(ParameterStore<T>& store, std::string name, std::size_t input_dim,
                                std::size_t hidden_dim, Rng& rng) {
  LstmCell cell;
  cell.name = std::move(name);
  cell.input_dim = input_dim;
  cell.hidden_dim = hidden_dim;
  cell.input_weights = &store.add(cell.name + ".input", glorot_uniform<T>(input_dim, 4 * hidden_dim, rng));
  cell.recurrent_weights =
      &store.add(cell.name + ".recurrent", glorot_uniform<T>(hidden_dim, 4 * hidden_dim, rng));
  Tensor<T> bias(1, 4 * hidden_dim);
  for (std::size_t j = hidden_dim; j < 2 * hidden_dim; ++j) bias[j] = T(1);
  cell.bias = &store.add(cell.name + ".bias", std::move(bias));
  return cell;
}

namespace {

template <typename T>
void require_input(const LstmCell<T>& cell, std::size_t cols) {
  if (cols != cell.input_dim) {
    throw DimensionError("LSTM cell '" + cell.name + "' expects " + std::to_string(cell.input_dim) +
                         "-d input, got " + std::to_string(cols));
  }
}

// Gates from a precomputed x W + b row.
template <typename T>
LstmState<T> step_from_projection(const LstmCell<T>& cell, Var<T> projected, Var<T> h_prev, Var<T> c_prev) {
  Graph<T>& g = *projected.graph;
  const std::size_t h = cell.hidden_dim;
  Var<T> z = ops::add(projected, ops::matmul(h_prev, g.param(*cell.recurrent_weights)));
  Var<T> in = ops::sigmoid(ops::slice_cols(z, 0, h));
  Var<T> forget = ops::sigmoid(ops::slice_cols(z, h, h));
  Var<T> candidate = ops::tanh(ops::slice_cols(z, 2 * h, h));
  Var<T> out = ops::sigmoid(ops::slice_cols(z, 3 * h, h));
  Var<T> c = ops::add(ops::mul(forget, c_prev), ops::mul(in, candidate));
  return {ops::mul(out, ops::tanh(c)), c};
}

}  // namespace

template <typename T>
LstmState<T> lstm_step(const LstmCell<T>& cell, Var<T> x, Var<T> h_prev, Var<T> c_prev) {
  require_input(cell, x.cols());
  if (x.rows() != 1 || h_prev.cols() != cell.hidden_dim || c_prev.cols() != cell.hidden_dim) {
    throw DimensionError("LSTM cell '" + cell.name + "': step needs a single row and " +
                         std::to_string(cell.hidden_dim) + "-d state");
  }
  Graph<T>& g = *x.graph;
  Var<T> projected = ops::add_row(ops::matmul(x, g.param(*cell.input_weights)), g.param(*cell.bias));
  return step_from_projection(cell, projected, h_prev, c_prev);
}

template <typename T>
Var<T> run_direction(const LstmCell<T>& cell, Var<T> x, Direction direction) {
  require_input(cell, x.cols());
  Graph<T>& g = *x.graph;
  const std::size_t n = x.rows();
  Var<T> projected = ops::add_row(ops::matmul(x, g.param(*cell.input_weights)), g.param(*cell.bias));
  LstmState<T> state{g.constant(Tensor<T>(1, cell.hidden_dim)), g.constant(Tensor<T>(1, cell.hidden_dim))};
  std::vector<Var<T>> outputs(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t t = direction == Direction::Forward ? k : n - 1 - k;
    state = step_from_projection(cell, ops::slice_rows(projected, t, 1), state.h, state.c);
    outputs[t] = state.h;
  }
  return ops::concat_rows<T>(outputs);
}

template <typename T>
EncodedSequence<T> baseline_encode(const std::array<LstmCell<T>, 4>& cells, Var<T> x) {
  Var<T> fwd = run_direction(cells[1], run_direction(cells[0], x, Direction::Forward), Direction::Forward);
  Var<T> bwd = run_direction(cells[3], run_direction(cells[2], x, Direction::Backward), Direction::Backward);
  const Var<T> parts[] = {fwd, bwd};
  return {ops::concat_cols<T>(parts), fwd, bwd};
}

template <typename T>
EncodedSequence<T> cross_encode(const std::array<LstmCell<T>, 4>& cells, Var<T> x) {
  const std::size_t joined = cells[0].hidden_dim + cells[2].hidden_dim;
  for (std::size_t second : {1u, 3u}) {
    if (cells[second].input_dim != joined) {
      throw ConfigError("cross topology: cell '" + cells[second].name + "' takes " +
                        std::to_string(cells[second].input_dim) + "-d input, needs " +
                        std::to_string(joined));
    }
  }
  Var<T> fwd1 = run_direction(cells[0], x, Direction::Forward);
  Var<T> bwd1 = run_direction(cells[2], x, Direction::Backward);
  const Var<T> first[] = {fwd1, bwd1};
  Var<T> both = ops::concat_cols<T>(first);
  Var<T> fwd = run_direction(cells[1], both, Direction::Forward);
  Var<T> bwd = run_direction(cells[3], both, Direction::Backward);
  const Var<T> parts[] = {fwd, bwd};
  return {ops::concat_cols<T>(parts), fwd, bwd};
}

template <typename T>
BiLstmEncoder<T>::BiLstmEncoder(ParameterStore<T>& store, Architecture architecture,
                                std::size_t input_dim, std::size_t hidden_dim, Rng& rng)
    : crossed_(architecture == Architecture::Cross) {
  const std::size_t second_input = crossed_ ? 2 * hidden_dim : hidden_dim;
  cells_[0] = LstmCell<T>::create(store, "lstm1", input_dim, hidden_dim, rng);
  cells_[1] = LstmCell<T>::create(store, "lstm2", second_input, hidden_dim, rng);
  cells_[2] = LstmCell<T>::create(store, "lstm3", input_dim, hidden_dim, rng);
  cells_[3] = LstmCell<T>::create(store, "lstm4", second_input, hidden_dim, rng);
}

template <typename T>
EncodedSequence<T> BiLstmEncoder<T>::encode(Var<T> x) const {
  return crossed_ ? cross_encode(cells_, x) : baseline_encode(cells_, x);
}

#define CROSSNER_INSTANTIATE_RECURRENT(T)                                                      \
  template struct LstmCell<T>;                                                                 \
  template LstmState<T> lstm_step(const LstmCell<T>&, Var<T>, Var<T>, Var<T>);                 \
  template Var<T> run_direction(const LstmCell<T>&, Var<T>, Direction);                        \
  template EncodedSequence<T> baseline_encode(const std::array<LstmCell<T>, 4>&, Var<T>);      \
  template EncodedSequence<T> cross_encode(const std::array<LstmCell<T>, 4>&, Var<T>);         \
  template class BiLstmEncoder<T>;

CROSSNER_INSTANTIATE_RECURRENT(float)
CROSSNER_INSTANTIATE_RECURRENT(double)

}  // namespace crossner
