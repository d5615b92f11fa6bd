#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kginfuse/classifier.hpp"
#include "kginfuse/corpus.hpp"
#include "kginfuse/kg.hpp"

namespace kginfuse {

struct SplitConfig {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

struct SplitResult {
  LabeledCorpus train;
  LabeledCorpus test;
};

// Seeded shuffle then prefix split: train gets floor(fraction * N)
// documents, test the rest. Not stratified.
SplitResult split(const LabeledCorpus& corpus, const SplitConfig& config);

// The index permutation behind split, exposed so two corpora can share a
// partition by index.
std::vector<std::size_t> split_permutation(std::size_t n, std::uint64_t seed);
std::size_t train_size(std::size_t n, double fraction);

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
};

ConfusionCounts confusion(const std::vector<int>& labels,
                          const std::vector<int>& predicted);

// Degenerate denominators are reported as 0 (0.5 for AUC with one class)
// with a flag, never NaN, so mean rows stay computable.
enum class DegenerateFlag {
  PrecisionUndefined,
  RecallUndefined,
  F1Undefined,
  SpecificityUndefined,
  AucUndefined,
};

const char* to_string(DegenerateFlag flag);

struct MetricsReport {
  double f1 = 0.0;
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double aucroc = 0.0;
  std::set<DegenerateFlag> degenerate_flags;
};

// Rank-based AUCROC (Mann-Whitney): the probability that a uniformly
// random positive is scored above a uniformly random negative, ties
// credited 0.5. Throws OneClassOnly unless both classes are present.
double auc_roc(const std::vector<int>& labels, const std::vector<double>& scores);

MetricsReport compute_metrics(const std::vector<int>& labels,
                              const std::vector<int>& predicted,
                              const std::vector<double>& scores);

struct ExperimentConfig {
  double train_fraction = 0.8;
  PreprocessConfig preprocess;
  TrainConfig train;
  double threshold = 0.5;
};

struct ExperimentRow {
  std::string arm;  // "base" or "kg"
  std::uint64_t seed = 0;
  bool is_mean = false;
  MetricsReport metrics;
  std::string error;  // non-empty when this arm/seed failed

  bool failed() const { return !error.empty(); }
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
};

// For each seed: split, train the baseline arm on the preprocessed corpus
// and, when a graph is given, the kg arm on the preprocessed infused
// corpus. Infusion happens once, before splitting, and both arms share the
// seed's partition by index. Rows are ordered by (arm, seed) with a mean
// row per arm; classifier errors are recorded per row and excluded from
// the mean.
ExperimentReport run_experiment(const LabeledCorpus& corpus,
                                const KnowledgeGraph* kg,
                                const std::vector<std::uint64_t>& seeds,
                                const ExperimentConfig& config);

// Appendix-style layout: Model | Seed | F1 | Accuracy | Balanced Accuracy |
// Recall | Precision | AUCROC.
std::string render_experiment_table(const ExperimentReport& report);
std::string experiment_csv(const ExperimentReport& report);

std::string metrics_json(const MetricsReport& metrics);

}  // namespace kginfuse
