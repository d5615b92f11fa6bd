#pragma once

#include <string>
#include <vector>

#include "kginfuse/corpus.hpp"
#include "kginfuse/kg.hpp"
#include "kginfuse/text.hpp"

namespace kginfuse {

inline constexpr const char* kSeparator = "[SEP]";

// Result of matching a document against the graph. original is always the
// verbatim input; rendered() is context + " [SEP] " + original, so a
// document with no matches renders as " [SEP] " + original.
struct InfusedDocument {
  std::string context;
  std::string original;
  int label = 0;

  std::string rendered() const {
    return context + " " + kSeparator + " " + original;
  }
};

// Matches graph keys against the document's unigrams/bigrams/trigrams and
// builds a context string of "<type> name: <key>" segments ("<type>: <key>"
// for dates) followed by "<type> description: ..." for described types,
// joined with ", ".
//
// Keys matched in the text are processed in order of the first occurrence
// of their n-gram, ties broken by longer n-gram then lexicographically.
// A matched date or place entry adds its events list to the candidate
// grams; keys that become eligible this way are processed directly after
// the key that introduced them, to a fixed point. Every key contributes at
// most once, and expansion strings that name no graph key are skipped, so
// the walk terminates on any graph, cyclic references included.
InfusedDocument infuse(const KnowledgeGraph& kg, const std::string& text);

// Applies infuse to each document and renders it; labels and order are
// preserved.
LabeledCorpus infuse_corpus(const KnowledgeGraph& kg, const LabeledCorpus& corpus);

// Keys infuse would render for this text, in segment order. Exposed for
// match auditing ("why did this document get this context?").
std::vector<std::string> matched_keys(const KnowledgeGraph& kg, const std::string& text);

}  // namespace kginfuse
