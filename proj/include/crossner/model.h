#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crossner/attention.h"
#include "crossner/classifier.h"
#include "crossner/config.h"
#include "crossner/corpus.h"
#include "crossner/features.h"
#include "crossner/recurrent.h"

namespace crossner {

// Which classifier-input component survives test-time zeroing.
struct AblationSpec {
  enum class Kind { All, Hidden, Contexts, Head };
  Kind kind = Kind::All;
  std::size_t head = 0;  // zero-based, for Kind::Head

  static AblationSpec all() { return {}; }
  static AblationSpec hidden() { return {Kind::Hidden, 0}; }
  static AblationSpec contexts() { return {Kind::Contexts, 0}; }
  static AblationSpec single_head(std::size_t h) { return {Kind::Head, h}; }

  // "HC_all", "H", "C_all", "C_1" ... "C_m".
  static AblationSpec parse(std::string_view text);
  std::string to_string() const;
  bool operator==(const AblationSpec&) const = default;
};

struct ForwardOptions {
  bool training = false;
  double dropout = 0.0;
  std::uint64_t dropout_seed = 0;
  AblationSpec keep;
};

template <typename T>
struct ForwardResult {
  Var<T> features;
  EncodedSequence<T> encoded;
  AttentionOutput<T> attention;  // empty unless the architecture is att
  Var<T> classifier_input;
  Var<T> scores;
};

// Baseline-, Cross- or Att-BiLSTM-CNN with a softmax or CRF head.
template <typename T>
class NerModel {
 public:
  NerModel(ModelConfig config, Vocab vocab, std::shared_ptr<const EmbeddingTable> embeddings,
           std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const Vocab& vocab() const { return vocab_; }
  const TagScheme& scheme() const { return vocab_.scheme; }
  const EmbeddingTable& embeddings() const { return *embeddings_; }
  ParameterStore<T>& params() { return params_; }
  const ParameterStore<T>& params() const { return params_; }

  const FeatureEncoder<T>& feature_encoder() const { return *features_; }
  const BiLstmEncoder<T>& encoder() const { return *encoder_; }
  const MultiHeadAttention<T>* attention() const { return attention_.get(); }
  const AffineClassifier<T>& classifier() const { return classifier_; }
  const CrfLayer<T>* crf() const { return crf_ ? &*crf_ : nullptr; }

  SentenceFeatures prepare(std::span<const std::string> tokens) const;

  ForwardResult<T> forward(Graph<T>& g, const SentenceFeatures& sentence,
                           const ForwardOptions& options = {});

  // Per-token cross-entropy (softmax head) or sentence NLL (CRF head).
  Var<T> loss(const ForwardResult<T>& result, std::span<const int> gold);

  // Argmax per token, or Viterbi under the CRF head.
  std::vector<int> decode(const ForwardResult<T>& result) const;

  std::vector<int> predict(const SentenceFeatures& sentence, const AblationSpec& keep = {});

 private:
  ModelConfig config_;
  Vocab vocab_;
  std::shared_ptr<const EmbeddingTable> embeddings_;
  ParameterStore<T> params_;
  std::unique_ptr<FeatureEncoder<T>> features_;
  std::unique_ptr<BiLstmEncoder<T>> encoder_;
  std::unique_ptr<MultiHeadAttention<T>> attention_;
  AffineClassifier<T> classifier_;
  std::optional<CrfLayer<T>> crf_;
};

extern template class NerModel<float>;
extern template class NerModel<double>;

}  // namespace crossner
