#include "kginfuse/infusion.hpp"

#include <algorithm>
#include <set>

namespace kginfuse {

namespace {

struct Candidate {
  std::string key;
  std::size_t first_pos;
  std::size_t token_len;
};

std::size_t gram_token_count(const std::string& gram) {
  return static_cast<std::size_t>(std::count(gram.begin(), gram.end(), ' ')) + 1;
}

// Text-matched keys ordered by first occurrence, longer gram first on ties,
// then lexicographically.
std::vector<std::string> initial_matches(const KnowledgeGraph& kg,
                                         const TokenList& tokens) {
  std::vector<Candidate> candidates;
  for (const auto& [gram, pos] : ngram_first_positions(tokens)) {
    if (kg.contains(gram)) candidates.push_back({gram, pos, gram_token_count(gram)});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.first_pos != b.first_pos) return a.first_pos < b.first_pos;
              if (a.token_len != b.token_len) return a.token_len > b.token_len;
              return a.key < b.key;
            });
  std::vector<std::string> keys;
  keys.reserve(candidates.size());
  for (auto& c : candidates) keys.push_back(std::move(c.key));
  return keys;
}

bool expands(EntryType type) {
  return type == EntryType::Date || type == EntryType::Place;
}

}  // namespace

std::vector<std::string> matched_keys(const KnowledgeGraph& kg,
                                      const std::string& text) {
  const TokenList tokens = tokenize(text);
  std::vector<std::string> ordered;
  std::set<std::string> visited;

  // Depth-first over event expansions so that keys introduced by a matched
  // date or place come right after it. The visited set bounds the walk by
  // the number of graph keys, which guarantees termination under cycles.
  for (const std::string& root : initial_matches(kg, tokens)) {
    std::vector<std::string> stack{root};
    while (!stack.empty()) {
      std::string key = std::move(stack.back());
      stack.pop_back();
      if (!visited.insert(key).second) continue;
      const Entry& entry = kg.entries.at(key);
      ordered.push_back(key);
      if (expands(entry.type)) {
        for (auto it = entry.events.rbegin(); it != entry.events.rend(); ++it) {
          if (kg.contains(*it) && visited.count(*it) == 0) stack.push_back(*it);
        }
      }
    }
  }
  return ordered;
}

InfusedDocument infuse(const KnowledgeGraph& kg, const std::string& text) {
  InfusedDocument doc;
  doc.original = text;

  std::vector<std::string> segments;
  for (const std::string& key : matched_keys(kg, text)) {
    const Entry& entry = kg.entries.at(key);
    const std::string type_name = to_string(entry.type);
    if (entry.type == EntryType::Date) {
      segments.push_back(type_name + ": " + key);
    } else {
      segments.push_back(type_name + " name: " + key);
    }
    if (has_description_requirement(entry.type)) {
      segments.push_back(type_name + " description: " + entry.description);
    }
  }

  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (i > 0) doc.context += ", ";
    doc.context += segments[i];
  }
  return doc;
}

LabeledCorpus infuse_corpus(const KnowledgeGraph& kg, const LabeledCorpus& corpus) {
  LabeledCorpus out;
  out.docs.reserve(corpus.docs.size());
  for (const Document& doc : corpus.docs) {
    InfusedDocument infused = infuse(kg, doc.text);
    out.docs.push_back({infused.rendered(), doc.label});
  }
  return out;
}

}  // namespace kginfuse
