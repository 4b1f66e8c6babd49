#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "crossner/corpus.h"
#include "crossner/model.h"
#include "crossner/tags.h"

namespace crossner {

struct Counts {
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;

  // Zero when the denominator is zero.
  double precision() const;
  double recall() const;
  double f1() const;
  Counts& operator+=(const Counts& o);
  bool operator==(const Counts&) const = default;
};

// Mention lengths 1, 2, 3 and everything longer.
inline constexpr std::array<const char*, 4> kLengthBuckets = {"1", "2", "3", "3+"};
std::string length_bucket(std::size_t length);

struct EvalReport {
  Counts overall;
  std::map<std::string, Counts> per_type;
  // Predicted mentions land in the bucket of their own length, gold mentions
  // in theirs; a true positive has one length, so both agree on it.
  std::map<std::string, Counts> per_length;

  double precision() const { return overall.precision(); }
  double recall() const { return overall.recall(); }
  double f1() const { return overall.f1(); }
  bool operator==(const EvalReport&) const = default;
};

using MentionLists = std::vector<std::vector<Mention>>;

// A prediction counts only if start, end and type all match an unused gold
// mention. Type names come from `scheme` when given.
EvalReport strict_f1(std::span<const std::vector<Mention>> gold, std::span<const std::vector<Mention>> predicted,
                     const TagScheme* scheme = nullptr);

// Per chunk letter (type ignored): gold tokens with that letter whose
// prediction has the same letter, over gold tokens with that letter.
struct ChunkRecall {
  std::array<std::size_t, 5> correct{};
  std::array<std::size_t, 5> support{};

  double recall(Chunk c) const;
  ChunkRecall& operator+=(const ChunkRecall& o);
  bool operator==(const ChunkRecall&) const = default;
};

ChunkRecall chunk_tag_recall(std::span<const ChunkTag> gold, std::span<const ChunkTag> predicted);

// Fraction of tokens whose predicted chunk letter equals the gold letter.
double chunk_accuracy(std::span<const std::vector<ChunkTag>> gold, std::span<const std::vector<ChunkTag>> predicted);

// Decoded tag sequences for every sentence of a corpus.
std::vector<std::vector<ChunkTag>> predict_corpus(NerModel<float>& model, const Corpus& corpus,
                                                  const AblationSpec& keep = {});
MentionLists corpus_mentions(std::span<const std::vector<ChunkTag>> tags);
EvalReport evaluate(NerModel<float>& model, const Corpus& corpus);

// Chunk recalls with every component but `keep` zeroed before the classifier.
ChunkRecall run_ablation(NerModel<float>& model, const Corpus& corpus, const AblationSpec& keep);

// Recall rows O S B I E against ablation columns; the unablated column is
// absolute, the others are differences from it.
struct AblationTable {
  std::vector<AblationSpec> columns;
  std::vector<ChunkRecall> recalls;

  double cell(Chunk c, std::size_t column) const;
};

AblationTable ablation_table(NerModel<float>& model, const Corpus& corpus);

void write_report_table(std::ostream& out, const EvalReport& report);
void write_report_kv(std::ostream& out, const EvalReport& report);
void write_ablation_table(std::ostream& out, const AblationTable& table);
void write_ablation_kv(std::ostream& out, const AblationTable& table);

// Binary PGM (maxval 255) of an n x n attention map, pixel = round(255 alpha).
std::string encode_pgm(const Tensor<float>& alpha);
// Parses a binary PGM back into values in [0, 1].
Tensor<float> read_pgm(std::istream& in);
// Plain text matrix with the tokens as row and column labels.
std::string encode_alpha_text(const Tensor<float>& alpha, std::span<const std::string> tokens);

// Writes <prefix>head<i>.pgm and <prefix>head<i>.txt per head; returns the paths.
std::vector<std::string> export_heatmap(std::span<const Tensor<float>> alphas, std::span<const std::string> tokens,
                                        const std::string& directory, const std::string& prefix = "");

}  // namespace crossner
