#include "crossner/features.h"

#include <algorithm>
#include <cmath>

#include "crossner/error.h"
#include "crossner/ops.h"
#include "crossner/text.h"

namespace crossner {

CharType char_type(char32_t cp) {
  if (is_upper_letter(cp)) return CharType::Upper;
  if (is_lower_letter(cp)) return CharType::Lower;
  if (is_digit(cp)) return CharType::Digit;
  return CharType::Punct;
}

CapClass capitalization(std::string_view word) {
  std::vector<char32_t> letters;
  for (char32_t cp : utf8_decode(word)) {
    if (is_letter(cp)) letters.push_back(cp);
  }
  if (letters.empty()) return CapClass::Lower;
  const bool all_upper = std::all_of(letters.begin(), letters.end(), is_upper_letter);
  if (all_upper) return CapClass::Upper;
  const bool rest_lower = std::all_of(letters.begin() + 1, letters.end(), is_lower_letter);
  if (is_upper_letter(letters.front()) && rest_lower) return CapClass::UpperInitial;
  if (is_lower_letter(letters.front()) && rest_lower) return CapClass::Lower;
  return CapClass::Mixed;
}

std::array<std::uint8_t, 4> capitalization_feature(std::string_view word) {
  std::array<std::uint8_t, 4> onehot{};
  onehot[static_cast<std::size_t>(capitalization(word))] = 1;
  return onehot;
}

CharEncoding encode_characters(std::string_view token, const Vocab& vocab, std::size_t max_length) {
  if (token.empty()) throw DataError("cannot encode an empty token");
  const std::vector<char32_t> cps = utf8_decode(token);
  CharEncoding enc;
  enc.ids.assign(max_length, vocab.char_pad());
  enc.types.assign(max_length, kPadType);
  for (std::size_t i = 0; i < std::min(max_length, cps.size()); ++i) {
    enc.ids[i] = vocab.char_id(cps[i]);
    enc.types[i] = static_cast<std::uint8_t>(char_type(cps[i]));
  }
  return enc;
}

SentenceFeatures prepare_sentence(std::span<const std::string> tokens, const Vocab& vocab,
                                  const EmbeddingTable& embeddings, std::size_t max_word_length) {
  if (tokens.empty()) throw DataError("cannot featurize an empty sentence");
  SentenceFeatures s;
  s.length = tokens.size();
  s.word_dim = embeddings.dim();
  s.max_word_length = max_word_length;
  s.word_vectors.assign(s.length * s.word_dim, 0.0f);
  s.unknown.assign(s.length, 0);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    CharEncoding enc = encode_characters(tokens[t], vocab, max_word_length);
    s.char_ids.insert(s.char_ids.end(), enc.ids.begin(), enc.ids.end());
    s.char_types.insert(s.char_types.end(), enc.types.begin(), enc.types.end());
    if (auto v = embeddings.lookup(tokens[t])) {
      std::copy(v->begin(), v->end(), s.word_vectors.begin() + static_cast<std::ptrdiff_t>(t * s.word_dim));
    } else {
      s.unknown[t] = 1;
    }
    s.caps.push_back(capitalization(tokens[t]));
  }
  return s;
}

template <typename T>
Tensor<T> glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor<T> w(fan_in, fan_out);
  for (T& v : w.values()) v = static_cast<T>(rng.uniform(-limit, limit));
  return w;
}

template <typename T>
FeatureEncoder<T>::FeatureEncoder(ParameterStore<T>& store, const ModelConfig& config,
                                  std::size_t char_table_size, Rng& rng)
    : config_(config) {
  const double bound = 0.5 / static_cast<double>(config.char_dim);
  Tensor<T> table(char_table_size, config.char_dim);
  for (T& v : table.values()) v = static_cast<T>(rng.uniform(-bound, bound));
  char_table_ = &store.add("chars.embedding", std::move(table));
  for (std::size_t w = 1; w <= config.max_kernel_width; ++w) {
    const std::string prefix = "chars.cnn" + std::to_string(w);
    kernels_.push_back(&store.add(prefix + ".kernel",
                                  glorot_uniform<T>(w * config.char_map_width(), config.char_kernels, rng)));
    kernel_biases_.push_back(&store.add(prefix + ".bias", Tensor<T>(1, config.char_kernels)));
  }
  unknown_word_ = &store.add("words.unknown", Tensor<T>(1, config.word_dim));
}

template <typename T>
Var<T> FeatureEncoder<T>::char_feature_map(Graph<T>& g, const SentenceFeatures& s) const {
  if (s.max_word_length != config_.max_word_length) {
    throw DimensionError("sentence prepared with " + std::to_string(s.max_word_length) +
                         " character slots, encoder expects " + std::to_string(config_.max_word_length));
  }
  Var<T> embedded = ops::gather_rows(g.param(*char_table_), s.char_ids);
  Tensor<T> types(s.char_types.size(), ModelConfig::kCharTypes);
  for (std::size_t i = 0; i < s.char_types.size(); ++i) {
    if (s.char_types[i] != kPadType) types(i, s.char_types[i]) = T(1);
  }
  const Var<T> parts[] = {embedded, g.constant(std::move(types))};
  return ops::concat_cols<T>(parts);
}

template <typename T>
Var<T> FeatureEncoder<T>::char_cnn(Var<T> maps) const {
  const std::size_t slots = config_.max_word_length;
  if (maps.cols() != config_.char_map_width() || maps.rows() == 0 || maps.rows() % slots != 0) {
    throw DimensionError("char_cnn: map " + maps.value().shape_string() + " is not a stack of " +
                         shape_string(slots, config_.char_map_width()) + " maps");
  }
  const std::size_t tokens = maps.rows() / slots;
  std::vector<Var<T>> pooled;
  for (std::size_t w = 1; w <= config_.max_kernel_width; ++w) {
    const std::size_t positions = slots - w + 1;
    std::vector<Var<T>> shifted;
    for (std::size_t offset = 0; offset < w; ++offset) {
      std::vector<std::size_t> rows;
      rows.reserve(tokens * positions);
      for (std::size_t t = 0; t < tokens; ++t)
        for (std::size_t p = 0; p < positions; ++p) rows.push_back(t * slots + p + offset);
      shifted.push_back(ops::gather_rows(maps, std::move(rows)));
    }
    Var<T> windows = w == 1 ? shifted[0] : ops::concat_cols<T>(shifted);
    Var<T> conv = ops::add_row(ops::matmul(windows, maps.graph->param(*kernels_[w - 1])),
                               maps.graph->param(*kernel_biases_[w - 1]));
    pooled.push_back(ops::segment_max_rows(conv, positions));
  }
  return ops::concat_cols<T>(pooled);
}

template <typename T>
Var<T> FeatureEncoder<T>::assemble(Graph<T>& g, const SentenceFeatures& s) const {
  if (s.word_dim != config_.word_dim) {
    throw DimensionError("word vectors have " + std::to_string(s.word_dim) + " dims, model expects " +
                         std::to_string(config_.word_dim));
  }
  const std::size_t n = s.length;
  Tensor<T> words(n, s.word_dim);
  for (std::size_t i = 0; i < words.size(); ++i) words[i] = static_cast<T>(s.word_vectors[i]);
  Var<T> word_part = g.constant(std::move(words));
  if (std::any_of(s.unknown.begin(), s.unknown.end(), [](std::uint8_t u) { return u != 0; })) {
    Tensor<T> indicator(n, 1);
    for (std::size_t t = 0; t < n; ++t) indicator[t] = s.unknown[t] ? T(1) : T(0);
    word_part = ops::add(word_part, ops::matmul(g.constant(std::move(indicator)), g.param(*unknown_word_)));
  }
  Tensor<T> caps(n, ModelConfig::kCapClasses);
  for (std::size_t t = 0; t < n; ++t) caps(t, static_cast<std::size_t>(s.caps[t])) = T(1);
  const Var<T> parts[] = {word_part, char_cnn(char_feature_map(g, s)), g.constant(std::move(caps))};
  return ops::concat_cols<T>(parts);
}

template class FeatureEncoder<float>;
template class FeatureEncoder<double>;
template Tensor<float> glorot_uniform<float>(std::size_t, std::size_t, Rng&);
template Tensor<double> glorot_uniform<double>(std::size_t, std::size_t, Rng&);

}  // namespace crossner
