#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace textdiar {

// Splits on ASCII whitespace. Never returns empty tokens.
std::vector<std::string> split_words(std::string_view text);

// Lowercases and strips leading/trailing punctuation. Internal apostrophes
// and other internal characters are kept. Pure punctuation maps to "".
std::string normalize_token(std::string_view word);

// split_words followed by normalize_token, dropping empty results.
std::vector<std::string> normalized_tokens(std::string_view text);

std::string_view trim(std::string_view s);

bool is_blank(std::string_view s);

// 64-bit FNV-1a. Stable across platforms; used for feature hashing and
// counter-based random streams.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace textdiar
