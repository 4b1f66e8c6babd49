#include "crossner/corpus.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "crossner/error.h"
#include "crossner/text.h"

namespace crossner {

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

namespace {

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

}  // namespace

Corpus read_conll(std::istream& in) {
  struct RawSentence {
    std::vector<std::string> tokens;
    std::vector<RawTag> tags;
  };
  std::vector<RawSentence> raw;
  RawSentence current;
  std::vector<std::string> types;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = strip_cr(line);
    if (view.empty()) {
      if (!current.tokens.empty()) raw.push_back(std::move(current));
      current = {};
      continue;
    }
    const auto tab = view.find('\t');
    if (tab == std::string_view::npos || tab == 0 || view.find('\t', tab + 1) != std::string_view::npos) {
      throw ParseError("expected TOKEN<TAB>TAG, got '" + std::string(view) + "'", line_no);
    }
    RawTag tag;
    try {
      tag = parse_raw_tag(view.substr(tab + 1));
    } catch (const DataError& e) {
      throw ParseError(e.what(), line_no);
    }
    if (tag.chunk != Chunk::O && std::find(types.begin(), types.end(), tag.type) == types.end()) {
      types.push_back(tag.type);
    }
    current.tokens.emplace_back(view.substr(0, tab));
    current.tags.push_back(std::move(tag));
  }
  if (!current.tokens.empty()) raw.push_back(std::move(current));

  Corpus corpus;
  corpus.scheme = TagScheme(std::move(types));
  corpus.sentences.reserve(raw.size());
  for (auto& r : raw) {
    Sentence s;
    s.tokens = std::move(r.tokens);
    for (const RawTag& t : r.tags) {
      s.tags.push_back(t.chunk == Chunk::O ? ChunkTag::outside()
                                           : ChunkTag{t.chunk, corpus.scheme.type_id(t.type)});
    }
    corpus.sentences.push_back(std::move(s));
  }
  return corpus;
}

Corpus read_conll(const std::string& path) {
  auto in = open_input(path);
  return read_conll(in);
}

void write_conll(std::ostream& out, const Corpus& corpus) {
  for (const Sentence& s : corpus.sentences) {
    for (std::size_t t = 0; t < s.size(); ++t) {
      out << s.tokens[t] << '\t' << corpus.scheme.to_string(s.tags[t]) << '\n';
    }
    out << '\n';
  }
}

void write_conll(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_conll(out, corpus);
}

Corpus rebase(const Corpus& corpus, const TagScheme& scheme) {
  Corpus out;
  out.scheme = scheme;
  out.sentences.reserve(corpus.size());
  for (const Sentence& s : corpus.sentences) {
    Sentence r;
    r.tokens = s.tokens;
    for (const ChunkTag& t : s.tags) {
      if (t.chunk == Chunk::O) {
        r.tags.push_back(t);
        continue;
      }
      const std::string& name = corpus.scheme.type_name(t.type);
      const int id = scheme.type_id(name);
      if (id < 0) throw DataError("entity type '" + name + "' not in the training scheme");
      r.tags.push_back({t.chunk, id});
    }
    out.sentences.push_back(std::move(r));
  }
  return out;
}

bool EmbeddingTable::add(std::string word, std::span<const float> vector) {
  if (vector.size() != dim_) {
    throw DimensionError("embedding for '" + word + "' has " + std::to_string(vector.size()) +
                         " values, expected " + std::to_string(dim_));
  }
  if (index_.count(word)) return false;
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  data_.insert(data_.end(), vector.begin(), vector.end());
  return true;
}

std::optional<std::span<const float>> EmbeddingTable::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return std::span<const float>(data_.data() + it->second * dim_, dim_);
}

std::optional<std::span<const float>> EmbeddingTable::lookup(std::string_view word) const {
  if (auto v = find(word)) return v;
  return find(to_lower(word));
}

EmbeddingTable load_embeddings(std::istream& in, std::size_t dim) {
  if (dim == 0) throw ConfigError("embedding dimension must be positive");
  EmbeddingTable table(dim);
  std::string line;
  std::size_t line_no = 0;
  std::vector<float> values;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = strip_cr(line);
    if (view.empty()) continue;
    const auto space = view.find(' ');
    if (space == std::string_view::npos || space == 0) {
      throw ParseError("expected 'word v1 ... v" + std::to_string(dim) + "'", line_no);
    }
    std::string word(view.substr(0, space));
    values.clear();
    std::size_t pos = space;
    while (pos < view.size()) {
      while (pos < view.size() && view[pos] == ' ') ++pos;
      if (pos >= view.size()) break;
      std::size_t next = view.find(' ', pos);
      if (next == std::string_view::npos) next = view.size();
      const std::string_view field = view.substr(pos, next - pos);
      float v = 0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError("bad number '" + std::string(field) + "' for word '" + word + "'", line_no);
      }
      values.push_back(v);
      pos = next;
    }
    if (values.size() != dim) {
      throw ParseError("word '" + word + "' has " + std::to_string(values.size()) +
                           " values, expected " + std::to_string(dim),
                       line_no);
    }
    table.add(std::move(word), values);
  }
  return table;
}

EmbeddingTable load_embeddings(const std::string& path, std::size_t dim) {
  auto in = open_input(path);
  return load_embeddings(in, dim);
}

std::size_t Vocab::char_id(char32_t c) const {
  auto it = std::lower_bound(chars.begin(), chars.end(), c);
  if (it == chars.end() || *it != c) return char_unk();
  return static_cast<std::size_t>(it - chars.begin());
}

std::size_t Vocab::word_id(std::string_view w) const {
  const std::size_t real = words.size() - 2;
  auto it = std::lower_bound(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(real), w);
  if (it == words.begin() + static_cast<std::ptrdiff_t>(real) || *it != w) return words.size() - 1;
  return static_cast<std::size_t>(it - words.begin());
}

Vocab build_vocab(const Corpus& corpus) {
  std::set<std::string> words;
  std::set<char32_t> chars;
  for (const Sentence& s : corpus.sentences) {
    for (const std::string& tok : s.tokens) {
      words.insert(tok);
      for (char32_t c : utf8_decode(tok)) chars.insert(c);
    }
  }
  Vocab v;
  v.words.assign(words.begin(), words.end());
  v.words.emplace_back(Vocab::kPad);
  v.words.emplace_back(Vocab::kUnk);
  v.chars.assign(chars.begin(), chars.end());
  v.scheme = corpus.scheme;
  return v;
}

}  // namespace crossner
