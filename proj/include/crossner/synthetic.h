#pragma once

#include <cstdint>
#include <memory>
#include <string_view>

#include "crossner/corpus.h"

namespace crossner {

// A generated corpus with the word vectors its tokens use.
struct SyntheticData {
  Corpus corpus;
  std::shared_ptr<const EmbeddingTable> embeddings;
};

inline constexpr std::size_t kSyntheticWordDim = 8;
inline constexpr std::size_t kMentionWordDim = 16;

// Each word gets its own axis (seeded assignment and scale), so vectors are
// mutually orthogonal and carry only word identity.
EmbeddingTable orthogonal_embeddings(std::span<const std::string> words, std::uint64_t seed,
                                     std::size_t dim = kSyntheticWordDim);

// "Key and Peele", "You and I" tagged as one work-of-art mention each;
// "Key and I", "You and Peele" all O.
SyntheticData gen_xor_phrase_corpus(std::uint64_t seed = 0);

enum class XorVariant { Phrase, Oso, Bie };
XorVariant parse_xor_variant(std::string_view s);
std::string_view to_string(XorVariant v);

// Words a, b, m, c, d in the pattern a m c / b m d / a m d / b m c. The first
// two phrases are positive: the middle token is a single-token mention (Oso)
// or the whole phrase is a mention (Bie). The rest are all O.
SyntheticData gen_xor_abstract_corpus(XorVariant variant, std::uint64_t seed = 0);

SyntheticData gen_xor_corpus(XorVariant variant, std::uint64_t seed = 0);

// Sentences over a small lexicon with mentions of length 1 to 4 whose
// interior tokens are shared with the outside context, so tagging an Inside
// token needs both neighbours.
SyntheticData gen_mention_corpus(std::size_t sentences, std::uint64_t seed);

}  // namespace crossner
