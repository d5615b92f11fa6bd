#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kginfuse/error.hpp"

namespace kginfuse {

// word -> vector table; every vector shares one dimension. Plain-text
// pretrained-embedding layout: one word per line followed by its
// whitespace-separated components. A leading "count dim" header line (two
// integer tokens) is tolerated and skipped.
struct EmbeddingTable {
  std::map<std::string, Eigen::VectorXd> vectors;
  int dimension = 0;

  bool contains(const std::string& word) const { return vectors.count(word) > 0; }
};

EmbeddingTable load_embeddings(const std::string& path);
EmbeddingTable load_embeddings_from_string(const std::string& text,
                                           const std::string& source_name = "<string>");

// One stereotype criterion: does the embedding place the attribute words
// closer to the target words than to the baseline words?
struct Criterion {
  int id = 0;
  std::string name;
  std::vector<std::string> target_words;
  std::vector<std::string> baseline_words;
  std::vector<std::string> attribute_words;
};

// The bundled 14-criterion antisemitism scorecard. Word lists are editable
// starting points, not ground truth; dump_criteria writes them back out.
std::vector<Criterion> default_criteria();
std::vector<Criterion> load_criteria(const std::string& path);
std::string dump_criteria(const std::vector<Criterion>& criteria);

// Difference of mean cosine similarities, averaged over attribute words:
//   mean_a [ mean_t cos(a, t) - mean_b cos(a, b) ].
// Words absent from the table (or with zero vectors) are skipped; a list
// with no usable words raises AllWordsMissing.
double association_score(const EmbeddingTable& table, const Criterion& criterion);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool skipped = false;
  std::string skip_reason;
  double score = 0.0;
  double p_value = 1.0;
  bool agrees = false;
  std::vector<std::string> skipped_words;
};

struct ScorecardReport {
  std::vector<CriterionResult> results;
  std::size_t evaluated = 0;
  std::size_t agreed = 0;
  std::size_t skipped = 0;
};

// Evaluates every criterion. p-values come from a permutation test that
// reshuffles the target/baseline partition, with the +1 smoothing that
// keeps them in [1/(permutations+1), 1]; agrees requires score > threshold
// and p < alpha. Per-criterion RNG streams are derived from (seed, id), so
// reports are reproducible and criteria are order-independent.
ScorecardReport evaluate_scorecard(const EmbeddingTable& table,
                                   const std::vector<Criterion>& criteria,
                                   double threshold, double alpha,
                                   int permutations, std::uint64_t seed);

std::string render_scorecard_table(const ScorecardReport& report);
std::string scorecard_csv(const ScorecardReport& report);

}  // namespace kginfuse
