#include "crossner/synthetic.h"

#include <numeric>
#include <set>

#include "crossner/error.h"
#include "crossner/rng.h"

namespace crossner {
namespace {

Sentence make_sentence(std::vector<std::string> tokens, std::vector<Mention> mentions) {
  Sentence s;
  s.tags = encode_mentions(tokens.size(), mentions);
  s.tokens = std::move(tokens);
  return s;
}

SyntheticData finish(Corpus corpus, std::uint64_t seed, std::size_t dim = kSyntheticWordDim) {
  std::set<std::string> words;
  for (const Sentence& s : corpus.sentences) words.insert(s.tokens.begin(), s.tokens.end());
  const std::vector<std::string> sorted(words.begin(), words.end());
  auto table = std::make_shared<const EmbeddingTable>(orthogonal_embeddings(sorted, seed, dim));
  return {std::move(corpus), std::move(table)};
}

}  // namespace

EmbeddingTable orthogonal_embeddings(std::span<const std::string> words, std::uint64_t seed, std::size_t dim) {
  if (words.size() > dim) {
    throw ConfigError(std::to_string(words.size()) + " words do not fit " + std::to_string(dim) + " orthogonal axes");
  }
  Rng rng = Rng(seed).split(0xE3B);
  std::vector<std::size_t> axes(dim);
  std::iota(axes.begin(), axes.end(), 0);
  rng.shuffle(axes);
  EmbeddingTable table(dim);
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::vector<float> v(dim, 0.0f);
    v[axes[i]] = static_cast<float>(rng.uniform(0.5, 1.5));
    table.add(words[i], v);
  }
  return table;
}

SyntheticData gen_xor_phrase_corpus(std::uint64_t seed) {
  Corpus c;
  c.scheme = TagScheme({"work-of-art"});
  const Mention whole[] = {{0, 2, 0}};
  c.sentences.push_back(make_sentence({"Key", "and", "Peele"}, {whole[0]}));
  c.sentences.push_back(make_sentence({"You", "and", "I"}, {whole[0]}));
  c.sentences.push_back(make_sentence({"Key", "and", "I"}, {}));
  c.sentences.push_back(make_sentence({"You", "and", "Peele"}, {}));
  return finish(std::move(c), seed);
}

XorVariant parse_xor_variant(std::string_view s) {
  if (s == "phrase") return XorVariant::Phrase;
  if (s == "oso") return XorVariant::Oso;
  if (s == "bie") return XorVariant::Bie;
  throw ConfigError("unknown xor variant '" + std::string(s) + "' (phrase, oso or bie)");
}

std::string_view to_string(XorVariant v) {
  switch (v) {
    case XorVariant::Phrase: return "phrase";
    case XorVariant::Oso: return "oso";
    case XorVariant::Bie: return "bie";
  }
  return "?";
}

SyntheticData gen_xor_abstract_corpus(XorVariant variant, std::uint64_t seed) {
  if (variant == XorVariant::Phrase) throw ConfigError("the abstract corpus has oso and bie variants only");
  Corpus c;
  c.scheme = TagScheme({"T"});
  const std::vector<Mention> positive = {variant == XorVariant::Oso ? Mention{1, 1, 0} : Mention{0, 2, 0}};
  c.sentences.push_back(make_sentence({"a", "m", "c"}, positive));
  c.sentences.push_back(make_sentence({"b", "m", "d"}, positive));
  c.sentences.push_back(make_sentence({"a", "m", "d"}, {}));
  c.sentences.push_back(make_sentence({"b", "m", "c"}, {}));
  return finish(std::move(c), seed);
}

SyntheticData gen_xor_corpus(XorVariant variant, std::uint64_t seed) {
  return variant == XorVariant::Phrase ? gen_xor_phrase_corpus(seed) : gen_xor_abstract_corpus(variant, seed);
}

SyntheticData gen_mention_corpus(std::size_t sentences, std::uint64_t seed) {
  // An opener and a closer form a mention only when their letters agree, so
  // whether an interior "m" is Inside depends jointly on both ends, which no
  // sum of a past-only and a future-only score can express. Single tokens
  // "s" are one-token mentions; x and y are filler.
  const std::string openers[] = {"ka", "kb", "kc"};
  const std::string closers[] = {"za", "zb", "zc"};
  const std::string fillers[] = {"x", "y"};
  Rng rng = Rng(seed).split(0xC0);
  Corpus c;
  c.scheme = TagScheme({"T"});
  for (std::size_t i = 0; i < sentences; ++i) {
    std::vector<std::string> tokens;
    std::vector<Mention> mentions;
    const std::size_t segments = 1 + rng.below(3);
    for (std::size_t seg = 0; seg < segments; ++seg) {
      if (seg > 0 || rng.bernoulli(0.5)) tokens.push_back(fillers[rng.below(2)]);
      const std::size_t start = tokens.size();
      // Mention length: 1 is a lone "s"; 2 to 4 is opener, interior, closer.
      const std::size_t length = 1 + rng.below(4);
      if (length == 1) {
        tokens.emplace_back("s");
        mentions.push_back({start, start, 0});
        continue;
      }
      const std::size_t o = rng.below(3), z = rng.below(3);
      tokens.push_back(openers[o]);
      for (std::size_t k = 0; k + 2 < length; ++k) tokens.emplace_back("m");
      tokens.push_back(closers[z]);
      if (o == z) mentions.push_back({start, start + length - 1, 0});
    }
    if (rng.bernoulli(0.5)) tokens.push_back(fillers[rng.below(2)]);
    c.sentences.push_back(make_sentence(std::move(tokens), std::move(mentions)));
  }
  return finish(std::move(c), seed, kMentionWordDim);
}

}  // namespace crossner
