#include "crossner/config.h"

#include "crossner/error.h"

namespace crossner {

std::string to_string(Architecture a) {
  switch (a) {
    case Architecture::Baseline: return "baseline";
    case Architecture::Cross: return "cross";
    case Architecture::Att: return "att";
  }
  return "?";
}

std::string to_string(Head h) { return h == Head::Softmax ? "softmax" : "crf"; }

std::string to_string(Preset p) { return p == Preset::Paper ? "paper" : "mini"; }

Architecture parse_architecture(std::string_view s) {
  if (s == "baseline") return Architecture::Baseline;
  if (s == "cross") return Architecture::Cross;
  if (s == "att") return Architecture::Att;
  throw ConfigError("unknown architecture '" + std::string(s) + "'");
}

Head parse_head(std::string_view s) {
  if (s == "softmax") return Head::Softmax;
  if (s == "crf") return Head::Crf;
  throw ConfigError("unknown head '" + std::string(s) + "'");
}

Preset parse_preset(std::string_view s) {
  if (s == "paper") return Preset::Paper;
  if (s == "mini") return Preset::Mini;
  throw ConfigError("unknown preset '" + std::string(s) + "'");
}

ModelConfig ModelConfig::paper(Architecture a, Head h, std::size_t word_dim) {
  ModelConfig c;
  c.architecture = a;
  c.head = h;
  c.word_dim = word_dim;
  return c;
}

ModelConfig ModelConfig::mini(Architecture a, Head h, std::size_t word_dim) {
  ModelConfig c;
  c.architecture = a;
  c.head = h;
  c.word_dim = word_dim;
  c.char_dim = 5;
  c.char_kernels = 4;
  c.lstm_dim = 16;
  c.heads = 2;
  c.head_dim = 16;
  return c;
}

ModelConfig ModelConfig::for_preset(Preset p, Architecture a, Head h, std::size_t word_dim) {
  return p == Preset::Paper ? paper(a, h, word_dim) : mini(a, h, word_dim);
}

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* what) {
    if (v == 0) throw ConfigError(std::string(what) + " must be positive");
  };
  positive(word_dim, "word_dim");
  positive(char_dim, "char_dim");
  positive(char_kernels, "char_kernels");
  positive(max_kernel_width, "max_kernel_width");
  positive(lstm_dim, "lstm_dim");
  if (max_word_length < max_kernel_width) {
    throw ConfigError("max_word_length " + std::to_string(max_word_length) +
                      " shorter than the widest kernel");
  }
  if (architecture == Architecture::Att) {
    positive(heads, "heads");
    positive(head_dim, "head_dim");
    if (heads * head_dim != hidden_dim()) {
      throw ConfigError("heads x head_dim = " + std::to_string(heads * head_dim) +
                        " must equal the hidden width " + std::to_string(hidden_dim()));
    }
  }
}

}  // namespace crossner
