#pragma once

#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers shared by the data model, embedding keys and elaboration.
namespace dtscore::text {

// Invalid byte sequences decode to U+FFFD, one per offending byte.
std::vector<char32_t> decode_utf8(std::string_view s);
std::string encode_utf8(char32_t cp);

// Unicode White_Space property (includes U+3000 ideographic space).
bool is_whitespace(char32_t cp) noexcept;
bool is_cjk_unified_ideograph(char32_t cp) noexcept;

// Strips leading and trailing Unicode whitespace; interior is untouched.
std::string trim(std::string_view s);

// NFC normalization followed by trim. Used for cache keys and embedding input.
std::string normalize(std::string_view s);

}  // namespace dtscore::text
