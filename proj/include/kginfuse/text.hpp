#pragma once

#include <set>
#include <string>
#include <vector>

namespace kginfuse {

using TokenList = std::vector<std::string>;

// All unigrams, bigrams, and trigrams of a token list, space-joined.
// expansion_grams holds strings added later by date/place event expansion;
// extract_ngrams always leaves it empty.
struct NgramSet {
  std::set<std::string> grams;
  std::set<std::string> expansion_grams;

  bool contains(const std::string& g) const {
    return grams.count(g) > 0 || expansion_grams.count(g) > 0;
  }
};

// ASCII lowercase; non-ASCII bytes pass through untouched.
std::string to_lower(const std::string& s);

// Strips ASCII whitespace from both ends.
std::string trim(const std::string& s);

bool is_punct_char(char c);

// Rule-based word tokenizer: lowercase, split on whitespace, then split
// leading and trailing punctuation runs of each chunk into their own
// tokens. Interior punctuation ("don't", "k*ke", "anti-semitism") stays
// attached, which keeps gazetteer keys with inner punctuation matchable.
TokenList tokenize(const std::string& text);

NgramSet extract_ngrams(const TokenList& tokens);

// Space-joined runs of 1..3 tokens with the start index of the earliest
// occurrence of each gram. Infusion orders matches by this position.
std::vector<std::pair<std::string, std::size_t>> ngram_first_positions(
    const TokenList& tokens);

}  // namespace kginfuse
