#include "kginfuse/text.hpp"

#include <cctype>
#include <map>

namespace kginfuse {

std::string to_lower(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool is_punct_char(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u) != 0;
}

namespace {

void split_chunk(const std::string& chunk, TokenList& out) {
  std::size_t b = 0;
  std::size_t e = chunk.size();
  while (b < e && is_punct_char(chunk[b])) ++b;
  // Chunk is a bare punctuation run; emit it whole.
  if (b == e) {
    out.push_back(chunk);
    return;
  }
  std::size_t t = e;
  while (t > b && is_punct_char(chunk[t - 1])) --t;
  if (b > 0) out.push_back(chunk.substr(0, b));
  out.push_back(chunk.substr(b, t - b));
  if (t < e) out.push_back(chunk.substr(t));
}

}  // namespace

TokenList tokenize(const std::string& text) {
  const std::string lowered = to_lower(text);
  TokenList tokens;
  std::size_t i = 0;
  const std::size_t n = lowered.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(lowered[i]))) ++i;
    std::size_t start = i;
    while (i < n && !std::isspace(static_cast<unsigned char>(lowered[i]))) ++i;
    if (i > start) split_chunk(lowered.substr(start, i - start), tokens);
  }
  return tokens;
}

std::vector<std::pair<std::string, std::size_t>> ngram_first_positions(
    const TokenList& tokens) {
  std::map<std::string, std::size_t> first;
  for (std::size_t start = 0; start < tokens.size(); ++start) {
    std::string gram;
    for (std::size_t len = 1; len <= 3 && start + len <= tokens.size(); ++len) {
      if (len > 1) gram += ' ';
      gram += tokens[start + len - 1];
      auto it = first.find(gram);
      if (it == first.end()) first.emplace(gram, start);
    }
  }
  return {first.begin(), first.end()};
}

NgramSet extract_ngrams(const TokenList& tokens) {
  NgramSet set;
  for (const auto& [gram, pos] : ngram_first_positions(tokens)) {
    (void)pos;
    set.grams.insert(gram);
  }
  return set;
}

}  // namespace kginfuse
