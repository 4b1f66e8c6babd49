#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "crossner/config.h"
#include "crossner/corpus.h"
#include "crossner/graph.h"
#include "crossner/rng.h"

namespace crossner {

enum class CharType : std::uint8_t { Upper = 0, Lower = 1, Digit = 2, Punct = 3 };
enum class CapClass : std::uint8_t { Upper = 0, UpperInitial = 1, Lower = 2, Mixed = 3 };

// Characters that are neither cased letters nor digits count as punctuation.
CharType char_type(char32_t cp);

// Decided on letters only; a token without letters is Lower.
CapClass capitalization(std::string_view word);
std::array<std::uint8_t, 4> capitalization_feature(std::string_view word);

inline constexpr std::uint8_t kPadType = 0xFF;

// A token truncated/padded to a fixed number of character slots.
struct CharEncoding {
  std::vector<std::size_t> ids;      // char table rows; padding uses vocab.char_pad()
  std::vector<std::uint8_t> types;   // CharType per slot, kPadType for padding
};

CharEncoding encode_characters(std::string_view token, const Vocab& vocab, std::size_t max_length);

// Model-independent per-sentence features, computed once per sentence.
struct SentenceFeatures {
  std::size_t length = 0;
  std::size_t word_dim = 0;
  std::size_t max_word_length = 0;
  std::vector<std::size_t> char_ids;       // length * max_word_length
  std::vector<std::uint8_t> char_types;    // length * max_word_length
  std::vector<float> word_vectors;         // length * word_dim; zeros for unknown words
  std::vector<std::uint8_t> unknown;       // 1 where the word missed the table
  std::vector<CapClass> caps;
};

SentenceFeatures prepare_sentence(std::span<const std::string> tokens, const Vocab& vocab,
                                  const EmbeddingTable& embeddings, std::size_t max_word_length);

// Trainable part of the raw features: character embeddings, the character
// CNN, and the vector shared by all unknown words. Word vectors are frozen.
template <typename T>
class FeatureEncoder {
 public:
  FeatureEncoder(ParameterStore<T>& store, const ModelConfig& config, std::size_t char_table_size,
                 Rng& rng);

  // (n * max_word_length) x (char_dim + 4): embedding rows next to type bits.
  Var<T> char_feature_map(Graph<T>& g, const SentenceFeatures& s) const;

  // Stacked per-token maps -> n x (kernels * widths), max-pooled over positions.
  Var<T> char_cnn(Var<T> maps) const;

  // n x d_x: [word vector; char CNN vector; capitalization one-hot].
  Var<T> assemble(Graph<T>& g, const SentenceFeatures& s) const;

  const ModelConfig& config() const { return config_; }

 private:
  ModelConfig config_;
  Parameter<T>* char_table_;
  std::vector<Parameter<T>*> kernels_;
  std::vector<Parameter<T>*> kernel_biases_;
  Parameter<T>* unknown_word_;
};

extern template class FeatureEncoder<float>;
extern template class FeatureEncoder<double>;

// Glorot-uniform matrix, shared by the model components.
template <typename T>
Tensor<T> glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace crossner
