#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace trimix::utf8 {

inline constexpr char32_t kInvalid = 0xFFFFFFFF;

/// Decodes the code point starting at `pos`; `length` receives its byte count.
/// Malformed sequences decode as kInvalid with length 1.
char32_t decode(std::string_view text, std::size_t pos, std::size_t& length);

void append(std::string& out, char32_t cp);

std::size_t count_code_points(std::string_view text);

bool is_ascii_letter(char c);
std::string ascii_lower(std::string_view text);

}  // namespace trimix::utf8
