#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crossner/graph.h"
#include "crossner/rng.h"

namespace crossner {

// s_t = features_t W + b.
template <typename T>
struct AffineClassifier {
  Parameter<T>* weight = nullptr;  // d_in x d_p
  Parameter<T>* bias = nullptr;    // 1 x d_p

  static AffineClassifier create(ParameterStore<T>& store, std::size_t input_dim,
                                 std::size_t num_tags, Rng& rng);
  Var<T> token_scores(Var<T> features) const;
};

template <typename T>
Var<T> token_scores(Var<T> features, const AffineClassifier<T>& classifier) {
  return classifier.token_scores(features);
}

// Mean over tokens of -log softmax(scores)[gold].
template <typename T>
Var<T> softmax_nll(Var<T> scores, std::span<const int> gold);

// Per-row argmax, lowest index on ties.
template <typename T>
std::vector<int> argmax_rows(const Tensor<T>& scores);

// Splits the affine scores of a [forward | backward] hidden matrix into the
// two directional contributions; scores == forward + backward + bias.
template <typename T>
struct ScoreDecomposition {
  Tensor<T> forward;
  Tensor<T> backward;
  Tensor<T> bias;
};

template <typename T>
ScoreDecomposition<T> decompose_scores(const Tensor<T>& forward_hidden, const Tensor<T>& backward_hidden,
                                       const AffineClassifier<T>& classifier);

// Linear-chain CRF over K tags with START = K and STOP = K + 1.
template <typename T>
struct CrfLayer {
  Parameter<T>* transitions = nullptr;  // (K+2) x (K+2), zero-initialized

  static CrfLayer create(ParameterStore<T>& store, std::size_t num_tags);
};

template <typename T>
Var<T> crf_log_partition(Var<T> scores, Var<T> transitions);

// Emission plus transition score of one tag sequence, START and STOP included.
template <typename T>
Var<T> crf_path_score(Var<T> scores, Var<T> transitions, std::span<const int> tags);

// log Z - score(gold).
template <typename T>
Var<T> crf_nll(Var<T> scores, Var<T> transitions, std::span<const int> gold);

template <typename T>
struct ViterbiResult {
  std::vector<int> tags;
  T score = T(0);
};

// Best sequence; ties go to the lowest tag index at every backpointer.
template <typename T>
ViterbiResult<T> crf_viterbi(const Tensor<T>& scores, const Tensor<T>& transitions);

// Non-differentiable path score, for decoding and tests.
template <typename T>
T path_score(const Tensor<T>& scores, const Tensor<T>& transitions, std::span<const int> tags);

}  // namespace crossner
