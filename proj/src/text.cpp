#include "crossner/text.h"

namespace crossner {
namespace {

// Latin Extended-A pairs capitals with the following code point, but the
// parity of the capital flips twice inside the block.
int latin_extended_a_case(char32_t cp) {
  if (cp < 0x100 || cp > 0x17E || cp == 0x138 || cp == 0x149) return 0;
  const bool odd_capitals = (cp >= 0x139 && cp <= 0x148) || cp >= 0x179;
  return (cp % 2 == 1) == odd_capitals ? 1 : -1;
}

}  // namespace

std::vector<char32_t> utf8_decode(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool valid = len != 0 && i + len <= text.size();
    for (std::size_t k = 1; valid && k < len; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) valid = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!valid) {
      out.push_back(b0);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string utf8_encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

bool is_upper_letter(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return true;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return true;
  if (latin_extended_a_case(cp) == 1) return true;
  if (cp >= 0x391 && cp <= 0x3A9) return true;         // Greek capitals
  if (cp >= 0x400 && cp <= 0x42F) return true;         // Cyrillic capitals
  return false;
}

bool is_lower_letter(char32_t cp) {
  if (cp >= U'a' && cp <= U'z') return true;
  if (cp >= 0xDF && cp <= 0xFF && cp != 0xF7) return true;
  if (latin_extended_a_case(cp) == -1) return true;
  if (cp >= 0x3B1 && cp <= 0x3C9) return true;
  if (cp >= 0x430 && cp <= 0x45F) return true;
  return false;
}

bool is_letter(char32_t cp) { return is_upper_letter(cp) || is_lower_letter(cp); }

bool is_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

std::string to_lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : utf8_decode(text)) {
    if (cp >= U'A' && cp <= U'Z') {
      cp += 32;
    } else if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) {
      cp += 0x20;
    } else if (latin_extended_a_case(cp) == 1) {
      cp += 1;
    } else if (cp >= 0x391 && cp <= 0x3A9) {
      cp += 0x20;
    } else if (cp >= 0x410 && cp <= 0x42F) {
      cp += 0x20;
    } else if (cp >= 0x400 && cp <= 0x40F) {
      cp += 0x50;
    }
    out += utf8_encode(cp);
  }
  return out;
}

}  // namespace crossner
