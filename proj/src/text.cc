#include "textdiar/text.h"

#include <cctype>
#include <cstdint>

namespace textdiar {

namespace {

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

// ASCII alphanumerics only; multi-byte UTF-8 punctuation such as an em dash
// is stripped at token edges like any other punctuation.
bool is_word_char(unsigned char c) {
  return std::isalnum(c) != 0;
}

}  // namespace

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string normalize_token(std::string_view word) {
  std::size_t b = 0;
  std::size_t e = word.size();
  while (b < e && !is_word_char(static_cast<unsigned char>(word[b]))) ++b;
  while (e > b && !is_word_char(static_cast<unsigned char>(word[e - 1]))) --e;
  std::string out;
  out.reserve(e - b);
  for (std::size_t i = b; i < e; ++i) {
    out.push_back(static_cast<char>(
        std::tolower(static_cast<unsigned char>(word[i]))));
  }
  return out;
}

std::vector<std::string> normalized_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& w : split_words(text)) {
    auto n = normalize_token(w);
    if (!n.empty()) out.push_back(std::move(n));
  }
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

bool is_blank(std::string_view s) { return trim(s).empty(); }

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace textdiar
