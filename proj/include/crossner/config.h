#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace crossner {

enum class Architecture { Baseline, Cross, Att };
enum class Head { Softmax, Crf };
enum class Preset { Paper, Mini };

std::string to_string(Architecture a);
std::string to_string(Head h);
std::string to_string(Preset p);
Architecture parse_architecture(std::string_view s);
Head parse_head(std::string_view s);
Preset parse_preset(std::string_view s);

struct ModelConfig {
  Architecture architecture = Architecture::Baseline;
  Head head = Head::Softmax;
  std::size_t word_dim = 300;
  std::size_t char_dim = 25;
  std::size_t char_kernels = 20;  // per kernel width
  std::size_t max_kernel_width = 3;
  std::size_t max_word_length = 20;
  std::size_t lstm_dim = 100;
  std::size_t heads = 5;
  std::size_t head_dim = 40;

  static constexpr std::size_t kCharTypes = 4;
  static constexpr std::size_t kCapClasses = 4;

  // 300-d or 400-d word vectors, 25-d chars, 3 x 20 kernels, 100-d LSTMs,
  // 5 heads of d_h / 5.
  static ModelConfig paper(Architecture a, Head h, std::size_t word_dim);
  // Desk-scale dimensions: 5-d chars, 3 x 4 kernels, 16-d LSTMs, 2 heads of 16.
  static ModelConfig mini(Architecture a, Head h, std::size_t word_dim);
  static ModelConfig for_preset(Preset p, Architecture a, Head h, std::size_t word_dim);

  std::size_t char_vector_dim() const { return char_kernels * max_kernel_width; }
  std::size_t char_map_width() const { return char_dim + kCharTypes; }
  std::size_t feature_dim() const { return word_dim + char_vector_dim() + kCapClasses; }
  std::size_t hidden_dim() const { return 2 * lstm_dim; }
  std::size_t classifier_input_dim() const {
    return architecture == Architecture::Att ? hidden_dim() + heads * head_dim : hidden_dim();
  }

  // Throws ConfigError for unusable dimensions.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

}  // namespace crossner
