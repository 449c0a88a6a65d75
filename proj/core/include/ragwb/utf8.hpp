#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ragwb::utf8 {

bool is_valid(std::string_view text);

/// Decodes valid UTF-8 into code points. Throws ParseError on invalid input.
std::vector<char32_t> decode(std::string_view text);

void append(std::string& out, char32_t cp);

/// Number of code points; this is what "characters" means throughout ragwb.
std::size_t length(std::string_view text);

/// The first `n` code points of `text` (all of it when shorter).
std::string_view prefix(std::string_view text, std::size_t n);

/// Byte offset of the start of every code point, plus text.size() at the end.
std::vector<std::size_t> boundaries(std::string_view text);

}  // namespace ragwb::utf8
