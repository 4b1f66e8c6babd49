#include "crossner/tags.h"

#include <optional>

#include "crossner/error.h"

namespace crossner {

char chunk_letter(Chunk c) {
  static constexpr char kLetters[] = {'O', 'S', 'B', 'I', 'E'};
  return kLetters[static_cast<int>(c)];
}

Chunk chunk_from_letter(char c) {
  switch (c) {
    case 'O': return Chunk::O;
    case 'S': return Chunk::S;
    case 'B': return Chunk::B;
    case 'I': return Chunk::I;
    case 'E': return Chunk::E;
    default: throw DataError(std::string("unknown chunk letter '") + c + "'");
  }
}

TagScheme::TagScheme(std::vector<std::string> types) : types_(std::move(types)) {
  for (std::size_t i = 0; i < types_.size(); ++i) {
    if (types_[i].empty()) throw ConfigError("empty entity type name");
    for (std::size_t j = 0; j < i; ++j) {
      if (types_[i] == types_[j]) throw ConfigError("duplicate entity type '" + types_[i] + "'");
    }
  }
}

int TagScheme::type_id(std::string_view name) const {
  for (std::size_t i = 0; i < types_.size(); ++i) {
    if (types_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

const std::string& TagScheme::type_name(int type) const {
  if (type < 0 || static_cast<std::size_t>(type) >= types_.size()) {
    throw DataError("entity type id " + std::to_string(type) + " out of range");
  }
  return types_[static_cast<std::size_t>(type)];
}

int TagScheme::id(ChunkTag tag) const {
  if (tag.chunk == Chunk::O) return 0;
  if (tag.type < 0 || static_cast<std::size_t>(tag.type) >= types_.size()) {
    throw DataError("entity type id " + std::to_string(tag.type) + " out of range");
  }
  return 1 + tag.type * 4 + (static_cast<int>(tag.chunk) - 1);
}

ChunkTag TagScheme::tag(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= num_tags()) {
    throw DataError("tag id " + std::to_string(id) + " out of range [0, " +
                    std::to_string(num_tags()) + ")");
  }
  if (id == 0) return ChunkTag::outside();
  return {static_cast<Chunk>((id - 1) % 4 + 1), (id - 1) / 4};
}

std::string TagScheme::to_string(ChunkTag tag) const {
  if (tag.chunk == Chunk::O) return "O";
  return type_name(tag.type) + ":" + chunk_letter(tag.chunk);
}

RawTag parse_raw_tag(std::string_view text) {
  if (text == "O") return {};
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 2 != text.size()) {
    throw DataError("malformed tag '" + std::string(text) + "' (expected TYPE:CHUNK or O)");
  }
  RawTag raw;
  raw.type = std::string(text.substr(0, colon));
  raw.chunk = chunk_from_letter(text.back());
  if (raw.chunk == Chunk::O) throw DataError("tag '" + std::string(text) + "' types an O chunk");
  return raw;
}

ChunkTag TagScheme::parse(std::string_view text) const {
  RawTag raw = parse_raw_tag(text);
  if (raw.chunk == Chunk::O) return ChunkTag::outside();
  const int type = type_id(raw.type);
  if (type < 0) throw DataError("unknown entity type '" + raw.type + "'");
  return {raw.chunk, type};
}

std::vector<int> TagScheme::ids(std::span<const ChunkTag> tags) const {
  std::vector<int> out;
  out.reserve(tags.size());
  for (const ChunkTag& t : tags) out.push_back(id(t));
  return out;
}

std::vector<ChunkTag> TagScheme::tags(std::span<const int> ids) const {
  std::vector<ChunkTag> out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(tag(i));
  return out;
}

namespace {

std::string describe(const Mention& m) {
  return "(" + std::to_string(m.start) + ", " + std::to_string(m.end) + ", type " +
         std::to_string(m.type) + ")";
}

}  // namespace

std::vector<ChunkTag> encode_mentions(std::size_t n, std::span<const Mention> mentions) {
  std::vector<ChunkTag> tags(n);
  std::vector<bool> used(n, false);
  for (const Mention& m : mentions) {
    if (m.start > m.end || m.end >= n || m.type < 0) {
      throw DataError("mention " + describe(m) + " out of range for length " + std::to_string(n));
    }
    for (std::size_t t = m.start; t <= m.end; ++t) {
      if (used[t]) throw DataError("mention " + describe(m) + " overlaps another mention");
      used[t] = true;
    }
    if (m.start == m.end) {
      tags[m.start] = {Chunk::S, m.type};
      continue;
    }
    tags[m.start] = {Chunk::B, m.type};
    for (std::size_t t = m.start + 1; t < m.end; ++t) tags[t] = {Chunk::I, m.type};
    tags[m.end] = {Chunk::E, m.type};
  }
  return tags;
}

std::vector<Mention> decode_tags(std::span<const ChunkTag> tags) {
  std::vector<Mention> out;
  std::optional<Mention> open;
  auto close_before = [&](std::size_t t) {
    if (open) {
      open->end = t - 1;
      out.push_back(*open);
      open.reset();
    }
  };
  for (std::size_t t = 0; t < tags.size(); ++t) {
    const ChunkTag& tag = tags[t];
    switch (tag.chunk) {
      case Chunk::O:
        close_before(t);
        break;
      case Chunk::S:
        close_before(t);
        out.push_back({t, t, tag.type});
        break;
      case Chunk::B:
        close_before(t);
        open = Mention{t, t, tag.type};
        break;
      case Chunk::I:
      case Chunk::E:
        if (open && open->type != tag.type) close_before(t);
        if (!open) open = Mention{t, t, tag.type};
        if (tag.chunk == Chunk::E) close_before(t + 1);
        break;
    }
  }
  if (open) close_before(tags.size());
  return out;
}

std::vector<TagViolation> validate_tags(std::span<const ChunkTag> tags) {
  std::vector<TagViolation> out;
  const std::size_t n = tags.size();
  // Whether tag `a` at t may be directly followed by `b` inside one mention.
  auto continues = [](const ChunkTag& a, const ChunkTag& b) {
    return (a.chunk == Chunk::B || a.chunk == Chunk::I) &&
           (b.chunk == Chunk::I || b.chunk == Chunk::E) && a.type == b.type;
  };
  for (std::size_t t = 0; t < n; ++t) {
    const ChunkTag& tag = tags[t];
    const bool has_prev = t > 0, has_next = t + 1 < n;
    const bool from_prev = has_prev && continues(tags[t - 1], tag);
    const bool to_next = has_next && continues(tag, tags[t + 1]);
    switch (tag.chunk) {
      case Chunk::O:
        break;
      case Chunk::S:
        if (has_prev && (tags[t - 1].chunk == Chunk::B || tags[t - 1].chunk == Chunk::I)) {
          out.push_back({t, "S follows an open B/I"});
        } else if (has_next && (tags[t + 1].chunk == Chunk::I || tags[t + 1].chunk == Chunk::E)) {
          out.push_back({t, "S followed by I/E"});
        }
        break;
      case Chunk::B:
        if (!to_next) out.push_back({t, "B not followed by I/E of the same type"});
        break;
      case Chunk::I:
        if (!from_prev) {
          out.push_back({t, "I not preceded by B/I of the same type"});
        } else if (!to_next) {
          out.push_back({t, "I not followed by I/E of the same type"});
        }
        break;
      case Chunk::E:
        if (!from_prev) out.push_back({t, "E not preceded by B/I of the same type"});
        break;
    }
  }
  return out;
}

}  // namespace crossner
