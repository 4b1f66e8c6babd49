#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crossner {

// OSBIE chunk letters.
enum class Chunk : std::uint8_t { O = 0, S = 1, B = 2, I = 3, E = 4 };

inline constexpr Chunk kChunks[] = {Chunk::O, Chunk::S, Chunk::B, Chunk::I, Chunk::E};

char chunk_letter(Chunk c);
Chunk chunk_from_letter(char c);  // throws DataError on anything but O/S/B/I/E

struct ChunkTag {
  Chunk chunk = Chunk::O;
  int type = -1;  // -1 iff chunk == O

  static ChunkTag outside() { return {}; }
  bool operator==(const ChunkTag&) const = default;
};

// A mention covers tokens [start, end] (inclusive).
struct Mention {
  std::size_t start = 0;
  std::size_t end = 0;
  int type = 0;

  std::size_t length() const { return end - start + 1; }
  auto operator<=>(const Mention&) const = default;
};

// Label algebra over P entity types: id 0 is O, then for each type in order
// the chunks S, B, I, E, giving P * 4 + 1 tag ids.
class TagScheme {
 public:
  TagScheme() = default;
  explicit TagScheme(std::vector<std::string> types);

  std::size_t num_types() const { return types_.size(); }
  std::size_t num_tags() const { return types_.size() * 4 + 1; }
  const std::vector<std::string>& types() const { return types_; }

  int type_id(std::string_view name) const;  // -1 if unknown
  const std::string& type_name(int type) const;

  int id(ChunkTag tag) const;
  ChunkTag tag(int id) const;

  // Surface form "TYPE:CHUNK" or "O".
  std::string to_string(ChunkTag tag) const;
  std::string to_string(int id) const { return to_string(tag(id)); }
  ChunkTag parse(std::string_view text) const;

  std::vector<int> ids(std::span<const ChunkTag> tags) const;
  std::vector<ChunkTag> tags(std::span<const int> ids) const;

  bool operator==(const TagScheme&) const = default;

 private:
  std::vector<std::string> types_;
};

// Splits "TYPE:CHUNK" at the last ':'; "O" yields an empty type.
struct RawTag {
  std::string type;
  Chunk chunk = Chunk::O;
};
RawTag parse_raw_tag(std::string_view text);

std::vector<ChunkTag> encode_mentions(std::size_t n, std::span<const Mention> mentions);

// Total decoding with a deterministic repair policy for illegal sequences.
std::vector<Mention> decode_tags(std::span<const ChunkTag> tags);

struct TagViolation {
  std::size_t index = 0;
  std::string rule;
  bool operator==(const TagViolation&) const = default;
};

// Positions breaking OSBIE adjacency: B must be followed by I/E, I must sit
// between B/I and I/E, E must follow B/I, S must not follow B/I nor precede
// I/E. Neighbours must share the entity type.
std::vector<TagViolation> validate_tags(std::span<const ChunkTag> tags);

}  // namespace crossner
