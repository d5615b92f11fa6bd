#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "kginfuse/error.hpp"

namespace kginfuse {

struct Document {
  std::string text;
  int label = 0;  // 1 = hate speech

  bool operator==(const Document& other) const = default;
};

struct LabeledCorpus {
  std::vector<Document> docs;

  std::size_t size() const { return docs.size(); }
  std::size_t positives() const {
    std::size_t n = 0;
    for (const auto& d : docs) n += d.label == 1 ? 1 : 0;
    return n;
  }

  bool operator==(const LabeledCorpus& other) const = default;
};

enum class CorpusFormat { Tsv, Csv };

CorpusFormat corpus_format_from_string(const std::string& s);

// Reads a delimited file with a header row naming "text" and "label"
// columns (extra columns are ignored). CSV follows RFC 4180 quoting; TSV is
// plain tab-splitting with no quote handling. Labels must be 0 or 1.
LabeledCorpus load_corpus(const std::string& path, CorpusFormat format);
LabeledCorpus load_corpus(std::istream& in, CorpusFormat format,
                          const std::string& source_name = "<stream>");

// Inverse of load_corpus. TSV cannot represent tabs or newlines inside
// text, so such documents are rejected; use CSV for those.
void save_corpus(const LabeledCorpus& corpus, const std::string& path,
                 CorpusFormat format);
std::string emit_corpus(const LabeledCorpus& corpus, CorpusFormat format);

// Tweet normalization ahead of featurization. Steps run in the listed
// order; each is individually toggleable. The echo symbol ((( ))) is plain
// punctuation to every step and always survives.
struct PreprocessConfig {
  bool lowercase = true;
  bool replace_urls = true;      // http(s)://... and www.... become <url>
  bool replace_mentions = true;  // @handle becomes <user>
  bool collapse_whitespace = true;
};

std::string preprocess(const std::string& text, const PreprocessConfig& config = {});
LabeledCorpus preprocess_corpus(const LabeledCorpus& corpus,
                                const PreprocessConfig& config = {});

}  // namespace kginfuse
