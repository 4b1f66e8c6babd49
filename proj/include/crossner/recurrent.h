#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "crossner/config.h"
#include "crossner/graph.h"
#include "crossner/rng.h"

namespace crossner {

// Plain LSTM cell; gate blocks are laid out (input, forget, candidate, output)
// along the 4 * hidden columns of every weight.
template <typename T>
struct LstmCell {
  std::string name;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Parameter<T>* input_weights = nullptr;      // input_dim x 4h
  Parameter<T>* recurrent_weights = nullptr;  // h x 4h
  Parameter<T>* bias = nullptr;               // 1 x 4h

  // Glorot-uniform weights, zero bias except forget-gate bias 1.
  static LstmCell create(ParameterStore<T>& store, std::string name, std::size_t input_dim,
                         std::size_t hidden_dim, Rng& rng);
};

template <typename T>
struct LstmState {
  Var<T> h;
  Var<T> c;
};

// One step on a 1 x input_dim row.
template <typename T>
LstmState<T> lstm_step(const LstmCell<T>& cell, Var<T> x, Var<T> h_prev, Var<T> c_prev);

enum class Direction { Forward, Backward };

// Runs the cell over the rows of X from zero state. Row t of the result is the
// state after reading tokens 0..t (forward) or t..n-1 (backward); rows stay
// aligned with token positions.
template <typename T>
Var<T> run_direction(const LstmCell<T>& cell, Var<T> x, Direction direction);

template <typename T>
struct EncodedSequence {
  Var<T> hidden;    // n x 2h, forward half first
  Var<T> forward;   // n x h
  Var<T> backward;  // n x h
};

// Four cells: 1 and 2 run forward, 3 and 4 backward. The baseline stacks each
// direction independently; the cross topology feeds both second-layer cells
// the concatenated first-layer states.
template <typename T>
class BiLstmEncoder {
 public:
  BiLstmEncoder(ParameterStore<T>& store, Architecture architecture, std::size_t input_dim,
                std::size_t hidden_dim, Rng& rng);

  EncodedSequence<T> encode(Var<T> x) const;

  bool crossed() const { return crossed_; }
  const LstmCell<T>& cell(std::size_t index) const { return cells_.at(index - 1); }

 private:
  bool crossed_;
  std::array<LstmCell<T>, 4> cells_;
};

template <typename T>
EncodedSequence<T> baseline_encode(const std::array<LstmCell<T>, 4>& cells, Var<T> x);
template <typename T>
EncodedSequence<T> cross_encode(const std::array<LstmCell<T>, 4>& cells, Var<T> x);

}  // namespace crossner
