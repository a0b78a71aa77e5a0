#ifndef NERSYNTH_UTF8_HPP
#define NERSYNTH_UTF8_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace nersynth::utf8 {

// Decodes UTF-8 into unicode scalar values. Invalid bytes are mapped to
// U+FFFD rather than rejected; corpus files are expected to be valid UTF-8.
std::u32string decode(std::string_view s);

std::string encode(std::u32string_view s);

// Codepoint length of a UTF-8 string without materializing the decoded form.
std::size_t length(std::string_view s);

// Substring in codepoint coordinates, [start, end).
std::string substr(std::string_view s, std::size_t start, std::size_t end);

bool is_space(char32_t c);

char32_t to_lower(char32_t c);
char32_t to_upper(char32_t c);
bool is_upper(char32_t c);
bool is_lower(char32_t c);
bool is_digit(char32_t c);

}  // namespace nersynth::utf8

#endif
