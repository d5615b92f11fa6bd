#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "kginfuse/evaluation.hpp"
#include "kginfuse/rng.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace kginfuse;

namespace {

LabeledCorpus numbered_corpus(std::size_t n) {
  LabeledCorpus corpus;
  for (std::size_t i = 0; i < n; ++i) {
    corpus.docs.push_back({"doc" + std::to_string(i), static_cast<int>(i % 7 == 0)});
  }
  return corpus;
}

// Labels/scores with both classes present and frequent ties.
void random_scored_labels(Rng& rng, std::size_t max_n, std::vector<int>& labels,
                          std::vector<double>& scores) {
  const std::size_t n = 2 + rng.bounded(max_n - 1);
  labels.assign(n, 0);
  scores.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<int>(rng.bounded(2));
    const double u = rng.uniform01();
    scores[i] = rng.bounded(2) == 0 ? u : std::floor(u * 8.0) / 8.0;
  }
  labels[0] = 1;
  labels[n - 1] = 0;
}

}  // namespace

TEST_CASE("auc_roc matches the four-pair fixture") {
  CHECK(auc_roc({0, 0, 1, 1}, {0.1, 0.4, 0.35, 0.8}) == 0.75);
}

TEST_CASE("auc_roc handles separation and total ties") {
  CHECK(auc_roc({0, 0, 1, 1}, {0.1, 0.2, 0.7, 0.9}) == 1.0);
  CHECK(auc_roc({1, 0, 1, 0}, {0.3, 0.3, 0.3, 0.3}) == 0.5);
}

TEST_CASE("auc_roc rejects degenerate input") {
  try {
    auc_roc({1, 1}, {0.1, 0.2});
    FAIL("expected OneClassOnly");
  } catch (const Error& err) {
    CHECK(err.code() == Error::Code::OneClassOnly);
  }
  try {
    auc_roc({}, {});
    FAIL("expected EmptyInput");
  } catch (const Error& err) {
    CHECK(err.code() == Error::Code::EmptyInput);
  }
  try {
    auc_roc({1, 0}, {0.1});
    FAIL("expected LengthMismatch");
  } catch (const Error& err) {
    CHECK(err.code() == Error::Code::LengthMismatch);
  }
}

TEST_CASE("auc_roc equals the brute-force pairwise oracle") {
  Rng rng(2023);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<int> labels;
    std::vector<double> scores;
    random_scored_labels(rng, 200, labels, scores);
    const double fast = auc_roc(labels, scores);
    const double brute = oracles::brute_force_auc(labels, scores);
    CHECK(std::abs(fast - brute) <= 1e-12);
  }
}

TEST_CASE("auc_roc is invariant under strictly monotone score transforms") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> labels;
    std::vector<double> scores;
    random_scored_labels(rng, 120, labels, scores);
    std::vector<double> warped(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      warped[i] = std::tanh(3.0 * scores[i] - 1.0);
    }
    CHECK(auc_roc(labels, scores) == auc_roc(labels, warped));
  }
}

TEST_CASE("compute_metrics on perfect predictions") {
  const MetricsReport m =
      compute_metrics({1, 0, 1, 0}, {1, 0, 1, 0}, {0.9, 0.1, 0.8, 0.2});
  CHECK(m.f1 == 1.0);
  CHECK(m.accuracy == 1.0);
  CHECK(m.balanced_accuracy == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.precision == 1.0);
  CHECK(m.aucroc == 1.0);
  CHECK(m.degenerate_flags.empty());
}

TEST_CASE("compute_metrics flags degenerate denominators") {
  const MetricsReport m =
      compute_metrics({1, 1, 0, 0}, {0, 0, 0, 0}, {0.4, 0.3, 0.2, 0.1});
  CHECK(m.recall == 0.0);
  CHECK(m.precision == 0.0);
  CHECK(m.f1 == 0.0);
  CHECK(m.balanced_accuracy == 0.5);
  CHECK(m.degenerate_flags.count(DegenerateFlag::PrecisionUndefined) == 1);
  CHECK(m.degenerate_flags.count(DegenerateFlag::F1Undefined) == 1);
}

TEST_CASE("compute_metrics on a balanced confusion square") {
  const MetricsReport m =
      compute_metrics({1, 1, 0, 0}, {1, 0, 1, 0}, {0.9, 0.2, 0.8, 0.1});
  CHECK(m.accuracy == 0.5);
  CHECK(m.precision == 0.5);
  CHECK(m.recall == 0.5);
  CHECK(m.f1 == 0.5);
  CHECK(m.balanced_accuracy == 0.5);
}

TEST_CASE("compute_metrics substitutes 0.5 for one-class AUC") {
  const MetricsReport m = compute_metrics({1, 1}, {1, 0}, {0.6, 0.4});
  CHECK(m.aucroc == 0.5);
  CHECK(m.degenerate_flags.count(DegenerateFlag::AucUndefined) == 1);
  CHECK(m.degenerate_flags.count(DegenerateFlag::SpecificityUndefined) == 1);
}

TEST_CASE("compute_metrics validates its input") {
  try {
    compute_metrics({1}, {1, 0}, {0.5, 0.5});
    FAIL("expected LengthMismatch");
  } catch (const Error& err) {
    CHECK(err.code() == Error::Code::LengthMismatch);
  }
  try {
    compute_metrics({}, {}, {});
    FAIL("expected EmptyInput");
  } catch (const Error& err) {
    CHECK(err.code() == Error::Code::EmptyInput);
  }
  try {
    compute_metrics({2}, {1}, {0.5});
    FAIL("expected BadLabel");
  } catch (const Error& err) {
    CHECK(err.code() == Error::Code::BadLabel);
  }
}

TEST_CASE("balanced accuracy equals the mean of recall and specificity") {
  Rng rng(88);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> labels, predicted;
    std::vector<double> scores;
    const std::size_t n = 2 + rng.bounded(60);
    for (std::size_t i = 0; i < n; ++i) {
      labels.push_back(static_cast<int>(rng.bounded(2)));
      predicted.push_back(static_cast<int>(rng.bounded(2)));
      scores.push_back(rng.uniform01());
    }
    const MetricsReport m = compute_metrics(labels, predicted, scores);
    const oracles::Confusion c = oracles::count_confusion(labels, predicted);
    const double tpr = c.tp + c.fn > 0
                           ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn)
                           : 0.0;
    const double tnr = c.tn + c.fp > 0
                           ? static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp)
                           : 0.0;
    CHECK(m.balanced_accuracy == (tpr + tnr) / 2.0);
    CHECK(m.f1 >= 0.0);
    CHECK(m.f1 <= 1.0);
    CHECK(m.aucroc >= 0.0);
    CHECK(m.aucroc <= 1.0);
  }
}

TEST_CASE("accuracy is invariant under simultaneous permutation") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> labels, predicted;
    std::vector<double> scores;
    random_scored_labels(rng, 40, labels, scores);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      predicted.push_back(static_cast<int>(rng.bounded(2)));
    }
    std::vector<std::size_t> perm = shuffled_indices(labels.size(), rng.next());
    std::vector<int> plabels, ppredicted;
    std::vector<double> pscores;
    for (std::size_t idx : perm) {
      plabels.push_back(labels[idx]);
      ppredicted.push_back(predicted[idx]);
      pscores.push_back(scores[idx]);
    }
    CHECK(compute_metrics(labels, predicted, scores).accuracy ==
          compute_metrics(plabels, ppredicted, pscores).accuracy);
  }
}

TEST_CASE("split sizes follow the floor arithmetic") {
  const LabeledCorpus corpus = numbered_corpus(4630);
  const SplitResult parts = split(corpus, {0.8, 42});
  CHECK(parts.train.size() == 3704);
  CHECK(parts.test.size() == 926);
}

TEST_CASE("split is deterministic and exhaustive") {
  const LabeledCorpus corpus = numbered_corpus(101);
  const SplitResult a = split(corpus, {0.8, 7});
  const SplitResult b = split(corpus, {0.8, 7});
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);

  const SplitResult c = split(corpus, {0.8, 8});
  CHECK(a.train.docs != c.train.docs);  // different seed, different shuffle

  std::set<std::string> seen;
  for (const Document& d : a.train.docs) seen.insert(d.text);
  for (const Document& d : a.test.docs) {
    CHECK(seen.count(d.text) == 0);
    seen.insert(d.text);
  }
  CHECK(seen.size() == corpus.size());
}

TEST_CASE("split handles the full-train edge") {
  const LabeledCorpus corpus = numbered_corpus(10);
  const SplitResult parts = split(corpus, {1.0, 3});
  CHECK(parts.train.size() == 10);
  CHECK(parts.test.size() == 0);
}

TEST_CASE("experiment reports 5+mean rows per arm in order") {
  Rng rng(3);
  LabeledCorpus corpus;
  for (int i = 0; i < 60; ++i) {
    const bool positive = i % 4 == 0;
    std::string text = positive ? "badword alpha" : "benign beta";
    text += " filler" + std::to_string(rng.bounded(5));
    corpus.docs.push_back({text, positive ? 1 : 0});
  }
  const KnowledgeGraph kg = load_graph_from_string(
      R"({"badword": {"type": "slur", "description": "insult marker"}})");

  ExperimentConfig config;
  config.train.folds = 2;
  const ExperimentReport report =
      run_experiment(corpus, &kg, {1, 2, 3, 4, 5}, config);
  REQUIRE(report.rows.size() == 12);
  for (int i = 0; i < 5; ++i) {
    CHECK(report.rows[i].arm == "base");
    CHECK(report.rows[i].seed == static_cast<std::uint64_t>(i + 1));
    CHECK_FALSE(report.rows[i].is_mean);
  }
  CHECK(report.rows[5].arm == "base");
  CHECK(report.rows[5].is_mean);
  CHECK(report.rows[6].arm == "kg");
  CHECK(report.rows[11].is_mean);

  // Mean row aggregates the seed rows.
  double f1_sum = 0.0;
  for (int i = 0; i < 5; ++i) f1_sum += report.rows[i].metrics.f1;
  CHECK(std::abs(report.rows[5].metrics.f1 - f1_sum / 5.0) < 1e-12);

  const std::string table = render_experiment_table(report);
  CHECK(table.find("Model") != std::string::npos);
  CHECK(table.find("mean") != std::string::npos);
  const std::string csv = experiment_csv(report);
  CHECK(csv.find("base,mean,") != std::string::npos);
}

TEST_CASE("a single-seed experiment's mean equals its row") {
  LabeledCorpus corpus;
  for (int i = 0; i < 30; ++i) {
    corpus.docs.push_back({i % 3 == 0 ? "pos marker" : "neg marker",
                           i % 3 == 0 ? 1 : 0});
  }
  ExperimentConfig config;
  config.train.folds = 2;
  const ExperimentReport report = run_experiment(corpus, nullptr, {11}, config);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[1].is_mean);
  CHECK(report.rows[0].metrics.f1 == report.rows[1].metrics.f1);
  CHECK(report.rows[0].metrics.aucroc == report.rows[1].metrics.aucroc);
}
