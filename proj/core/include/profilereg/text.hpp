#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace profilereg::text {

// Splits on runs of ASCII whitespace; never returns empty tokens.
std::vector<std::string> split_whitespace(std::string_view s);

std::string join(const std::vector<std::string>& tokens, const std::string& sep = " ");

// ASCII-only lowercasing; bytes outside A-Z pass through untouched.
std::string lower_ascii(std::string_view s);

// True when the first byte is an ASCII uppercase letter.
bool starts_upper_ascii(std::string_view token);

// Decodes UTF-8; invalid byte sequences come back as U+FFFD, one per byte.
std::vector<char32_t> utf8_decode(std::string_view s);

void utf8_append(std::string& out, char32_t cp);
std::string utf8_encode(const std::vector<char32_t>& cps);

}  // namespace profilereg::text
