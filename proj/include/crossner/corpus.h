#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "crossner/tags.h"

namespace crossner {

struct Sentence {
  std::vector<std::string> tokens;
  std::vector<ChunkTag> tags;

  std::size_t size() const { return tokens.size(); }
  std::vector<Mention> mentions() const { return decode_tags(tags); }
};

struct Corpus {
  std::vector<Sentence> sentences;
  TagScheme scheme;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
  std::size_t token_count() const;
};

// CoNLL-style text: one "TOKEN<TAB>TAG" per line, a blank line ends a
// sentence. The tag scheme lists entity types in order of first appearance.
Corpus read_conll(std::istream& in);
Corpus read_conll(const std::string& path);
void write_conll(std::ostream& out, const Corpus& corpus);
void write_conll(const std::string& path, const Corpus& corpus);

// Re-expresses a corpus under another scheme (e.g. dev data under the
// training scheme). Throws DataError for types the scheme lacks.
Corpus rebase(const Corpus& corpus, const TagScheme& scheme);

// Frozen pre-trained word vectors.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }

  // Returns false (and keeps the existing vector) for duplicate words.
  bool add(std::string word, std::span<const float> vector);

  // Exact match only; nullopt if absent.
  std::optional<std::span<const float>> find(std::string_view word) const;
  // Exact match, then lower-cased match; nullopt means the token is unknown.
  std::optional<std::span<const float>> lookup(std::string_view word) const;

  const std::vector<std::string>& words() const { return words_; }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Text format "word v1 ... vdim", space separated, one word per line.
EmbeddingTable load_embeddings(std::istream& in, std::size_t dim);
EmbeddingTable load_embeddings(const std::string& path, std::size_t dim);

// Sorted inventories; specials are appended after the sorted entries.
struct Vocab {
  static constexpr std::string_view kPad = "<pad>";
  static constexpr std::string_view kUnk = "<unk>";

  std::vector<std::string> words;      // sorted words, then <pad>, <unk>
  std::vector<char32_t> chars;         // sorted code points (specials excluded)
  TagScheme scheme;

  std::size_t char_pad() const { return chars.size(); }
  std::size_t char_unk() const { return chars.size() + 1; }
  std::size_t char_table_size() const { return chars.size() + 2; }
  std::size_t char_id(char32_t c) const;
  std::size_t word_id(std::string_view w) const;  // index of <unk> when absent
};

Vocab build_vocab(const Corpus& corpus);

}  // namespace crossner
