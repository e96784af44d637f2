#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rtw::utf8 {

// nullopt on any malformed, overlong or surrogate sequence.
std::optional<std::u32string> decode(std::string_view bytes);
std::string encode(char32_t cp);
std::string encode(std::u32string_view cps);

// Russian alphabet: U+0410..U+044F plus Ё/ё.
constexpr bool is_cyrillic(char32_t c) {
  return (c >= 0x0410 && c <= 0x044F) || c == 0x0401 || c == 0x0451;
}
constexpr bool is_latin(char32_t c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}
constexpr bool is_digit(char32_t c) { return c >= '0' && c <= '9'; }
constexpr bool is_punctuation(char32_t c) {
  return c == '.' || c == ',' || c == '?' || c == '!' || c == ':' ||
         c == ';' || c == '-';
}
// Characters an annotation may carry (space included, newline excluded).
constexpr bool is_allowed(char32_t c) {
  return is_cyrillic(c) || is_latin(c) || is_digit(c) || is_punctuation(c) ||
         c == ' ';
}

// Simple case fold for the Russian and Basic Latin alphabets.
char32_t fold(char32_t c);
std::u32string fold(std::u32string_view s);

}  // namespace rtw::utf8
