#include "crossner/classifier.h"

#include <string>

#include "crossner/error.h"
#include "crossner/features.h"
#include "crossner/ops.h"

namespace crossner {

template <typename T>
AffineClassifier<T> AffineClassifier<T>::create(ParameterStore<T>& store, std::size_t input_dim,
                                                std::size_t num_tags, Rng& rng) {
  AffineClassifier c;
  c.weight = &store.add("classifier.weight", glorot_uniform<T>(input_dim, num_tags, rng));
  c.bias = &store.add("classifier.bias", Tensor<T>(1, num_tags));
  return c;
}

template <typename T>
Var<T> AffineClassifier<T>::token_scores(Var<T> features) const {
  Graph<T>& g = *features.graph;
  return ops::add_row(ops::matmul(features, g.param(*weight)), g.param(*bias));
}

namespace {

void require_tags(std::span<const int> tags, std::size_t n, std::size_t num_tags, const char* what) {
  if (tags.size() != n) {
    throw DataError(std::string(what) + ": " + std::to_string(tags.size()) + " tags for " +
                    std::to_string(n) + " tokens");
  }
  for (std::size_t t = 0; t < tags.size(); ++t) {
    if (tags[t] < 0 || static_cast<std::size_t>(tags[t]) >= num_tags) {
      throw DataError(std::string(what) + ": tag id " + std::to_string(tags[t]) + " at token " +
                      std::to_string(t) + " outside [0, " + std::to_string(num_tags) + ")");
    }
  }
}

}  // namespace

template <typename T>
Var<T> softmax_nll(Var<T> scores, std::span<const int> gold) {
  require_tags(gold, scores.rows(), scores.cols(), "softmax_nll");
  std::vector<std::pair<std::size_t, std::size_t>> picks;
  for (std::size_t t = 0; t < gold.size(); ++t) picks.emplace_back(t, static_cast<std::size_t>(gold[t]));
  Var<T> logp = ops::gather_elements(ops::rowwise_log_softmax(scores), std::move(picks));
  return ops::scale(ops::mean(logp), T(-1));
}

template <typename T>
std::vector<int> argmax_rows(const Tensor<T>& scores) {
  std::vector<int> out(scores.rows());
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < scores.cols(); ++j) {
      if (scores(i, j) > scores(i, best)) best = j;
    }
    out[i] = static_cast<int>(best);
  }
  return out;
}

template <typename T>
ScoreDecomposition<T> decompose_scores(const Tensor<T>& forward_hidden, const Tensor<T>& backward_hidden,
                                       const AffineClassifier<T>& classifier) {
  const Tensor<T>& w = classifier.weight->value;
  const std::size_t half = forward_hidden.cols();
  if (half + backward_hidden.cols() != w.rows() || forward_hidden.rows() != backward_hidden.rows()) {
    throw DimensionError("decompose_scores: hidden halves " + forward_hidden.shape_string() + " + " +
                         backward_hidden.shape_string() + " do not match weight " + w.shape_string());
  }
  const std::size_t n = forward_hidden.rows(), k = w.cols();
  ScoreDecomposition<T> d{Tensor<T>(n, k), Tensor<T>(n, k), classifier.bias->value};
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t j = 0; j < k; ++j) {
      T f = T(0), b = T(0);
      for (std::size_t p = 0; p < half; ++p) f += forward_hidden(t, p) * w(p, j);
      for (std::size_t p = 0; p < backward_hidden.cols(); ++p) b += backward_hidden(t, p) * w(half + p, j);
      d.forward(t, j) = f;
      d.backward(t, j) = b;
    }
  }
  return d;
}

template <typename T>
CrfLayer<T> CrfLayer<T>::create(ParameterStore<T>& store, std::size_t num_tags) {
  return {&store.add("crf.transitions", Tensor<T>(num_tags + 2, num_tags + 2))};
}

template <typename T>
Var<T> crf_log_partition(Var<T> scores, Var<T> transitions) {
  return ops::crf_log_partition(scores, transitions);
}

template <typename T>
Var<T> crf_path_score(Var<T> scores, Var<T> transitions, std::span<const int> tags) {
  const std::size_t n = scores.rows(), k = scores.cols();
  require_tags(tags, n, k, "crf_path_score");
  if (transitions.rows() != k + 2 || transitions.cols() != k + 2) {
    throw DimensionError("crf_path_score: transitions " + transitions.value().shape_string() +
                         " do not match " + std::to_string(k) + " tags");
  }
  std::vector<std::pair<std::size_t, std::size_t>> emit, trans;
  for (std::size_t t = 0; t < n; ++t) {
    const auto y = static_cast<std::size_t>(tags[t]);
    emit.emplace_back(t, y);
    trans.emplace_back(t == 0 ? k : static_cast<std::size_t>(tags[t - 1]), y);
  }
  trans.emplace_back(static_cast<std::size_t>(tags[n - 1]), k + 1);
  return ops::add(ops::sum(ops::gather_elements(scores, std::move(emit))),
                  ops::sum(ops::gather_elements(transitions, std::move(trans))));
}

template <typename T>
Var<T> crf_nll(Var<T> scores, Var<T> transitions, std::span<const int> gold) {
  return ops::sub(ops::crf_log_partition(scores, transitions), crf_path_score(scores, transitions, gold));
}

template <typename T>
T path_score(const Tensor<T>& scores, const Tensor<T>& transitions, std::span<const int> tags) {
  const std::size_t n = scores.rows(), k = scores.cols();
  require_tags(tags, n, k, "path_score");
  T total = T(0);
  for (std::size_t t = 0; t < n; ++t) total += scores(t, static_cast<std::size_t>(tags[t]));
  total += transitions(k, static_cast<std::size_t>(tags[0]));
  for (std::size_t t = 1; t < n; ++t) {
    total += transitions(static_cast<std::size_t>(tags[t - 1]), static_cast<std::size_t>(tags[t]));
  }
  total += transitions(static_cast<std::size_t>(tags[n - 1]), k + 1);
  return total;
}

template <typename T>
ViterbiResult<T> crf_viterbi(const Tensor<T>& scores, const Tensor<T>& transitions) {
  const std::size_t n = scores.rows(), k = scores.cols();
  if (n == 0 || k == 0) throw DimensionError("crf_viterbi: empty scores " + scores.shape_string());
  if (transitions.rows() != k + 2 || transitions.cols() != k + 2) {
    throw DimensionError("crf_viterbi: transitions " + transitions.shape_string() + " do not match " +
                         std::to_string(k) + " tags");
  }
  Tensor<T> best(n, k);
  std::vector<std::size_t> back(n * k, 0);
  for (std::size_t j = 0; j < k; ++j) best(0, j) = transitions(k, j) + scores(0, j);
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t j = 0; j < k; ++j) {
      std::size_t arg = 0;
      T top = best(t - 1, 0) + transitions(0, j);
      for (std::size_t i = 1; i < k; ++i) {
        const T cand = best(t - 1, i) + transitions(i, j);
        if (cand > top) {
          top = cand;
          arg = i;
        }
      }
      best(t, j) = top + scores(t, j);
      back[t * k + j] = arg;
    }
  }
  std::size_t last = 0;
  T top = best(n - 1, 0) + transitions(0, k + 1);
  for (std::size_t j = 1; j < k; ++j) {
    const T cand = best(n - 1, j) + transitions(j, k + 1);
    if (cand > top) {
      top = cand;
      last = j;
    }
  }
  ViterbiResult<T> result;
  result.tags.assign(n, 0);
  result.tags[n - 1] = static_cast<int>(last);
  for (std::size_t t = n - 1; t > 0; --t) {
    result.tags[t - 1] = static_cast<int>(back[t * k + static_cast<std::size_t>(result.tags[t])]);
  }
  result.score = path_score<T>(scores, transitions, result.tags);
  return result;
}

#define CROSSNER_INSTANTIATE_CLASSIFIER(T)                                                          \
  template struct AffineClassifier<T>;                                                              \
  template struct CrfLayer<T>;                                                                      \
  template Var<T> softmax_nll(Var<T>, std::span<const int>);                                        \
  template std::vector<int> argmax_rows(const Tensor<T>&);                                          \
  template ScoreDecomposition<T> decompose_scores(const Tensor<T>&, const Tensor<T>&,               \
                                                  const AffineClassifier<T>&);                      \
  template Var<T> crf_log_partition(Var<T>, Var<T>);                                               \
  template Var<T> crf_path_score(Var<T>, Var<T>, std::span<const int>);                             \
  template Var<T> crf_nll(Var<T>, Var<T>, std::span<const int>);                                    \
  template T path_score(const Tensor<T>&, const Tensor<T>&, std::span<const int>);                  \
  template ViterbiResult<T> crf_viterbi(const Tensor<T>&, const Tensor<T>&);

CROSSNER_INSTANTIATE_CLASSIFIER(float)
CROSSNER_INSTANTIATE_CLASSIFIER(double)

}  // namespace crossner
