#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace crossner {

// Decodes UTF-8 into code points. Invalid bytes decode to themselves
// (as U+0080..U+00FF) so every byte string has a total, deterministic decoding.
std::vector<char32_t> utf8_decode(std::string_view text);
std::string utf8_encode(char32_t cp);

// Letter case for Latin, Greek and Cyrillic blocks; other scripts have no case.
bool is_upper_letter(char32_t cp);
bool is_lower_letter(char32_t cp);
bool is_letter(char32_t cp);
bool is_digit(char32_t cp);

// Case-folds the characters handled by is_upper_letter.
std::string to_lower(std::string_view text);

}  // namespace crossner
