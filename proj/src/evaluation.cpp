#include "kginfuse/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "kginfuse/infusion.hpp"
#include "kginfuse/rng.hpp"

namespace kginfuse {

std::vector<std::size_t> split_permutation(std::size_t n, std::uint64_t seed) {
  return shuffled_indices(n, seed);
}

std::size_t train_size(std::size_t n, double fraction) {
  return static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(n)));
}

SplitResult split(const LabeledCorpus& corpus, const SplitConfig& config) {
  if (corpus.docs.empty()) {
    throw Error(Error::Code::EmptyInput, "cannot split an empty corpus");
  }
  if (!(config.train_fraction > 0.0) || config.train_fraction > 1.0) {
    throw Error(Error::Code::ParseError,
                "train fraction must be in (0, 1], got " +
                    std::to_string(config.train_fraction));
  }
  const auto perm = split_permutation(corpus.docs.size(), config.seed);
  const std::size_t n_train = train_size(corpus.docs.size(), config.train_fraction);
  SplitResult result;
  result.train.docs.reserve(n_train);
  result.test.docs.reserve(corpus.docs.size() - n_train);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    (i < n_train ? result.train : result.test).docs.push_back(corpus.docs[perm[i]]);
  }
  return result;
}

ConfusionCounts confusion(const std::vector<int>& labels,
                          const std::vector<int>& predicted) {
  ConfusionCounts counts;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      ++(predicted[i] == 1 ? counts.tp : counts.fn);
    } else {
      ++(predicted[i] == 1 ? counts.fp : counts.tn);
    }
  }
  return counts;
}

const char* to_string(DegenerateFlag flag) {
  switch (flag) {
    case DegenerateFlag::PrecisionUndefined: return "PrecisionUndefined";
    case DegenerateFlag::RecallUndefined: return "RecallUndefined";
    case DegenerateFlag::F1Undefined: return "F1Undefined";
    case DegenerateFlag::SpecificityUndefined: return "SpecificityUndefined";
    case DegenerateFlag::AucUndefined: return "AucUndefined";
  }
  return "?";
}

double auc_roc(const std::vector<int>& labels, const std::vector<double>& scores) {
  if (labels.size() != scores.size()) {
    throw Error(Error::Code::LengthMismatch, "labels and scores differ in length");
  }
  if (labels.empty()) {
    throw Error(Error::Code::EmptyInput, "auc_roc needs at least one instance");
  }
  const std::size_t n = labels.size();
  std::size_t positives = 0;
  for (int label : labels) positives += label == 1 ? 1 : 0;
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(Error::Code::OneClassOnly, "auc_roc needs both classes present");
  }

  // Average ranks over tied scores; the rank-sum form equals the pairwise
  // count with ties credited 0.5.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) positive_rank_sum += mean_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

MetricsReport compute_metrics(const std::vector<int>& labels,
                              const std::vector<int>& predicted,
                              const std::vector<double>& scores) {
  if (labels.size() != predicted.size() || labels.size() != scores.size()) {
    throw Error(Error::Code::LengthMismatch,
                "labels, predictions, and scores must have equal length");
  }
  if (labels.empty()) {
    throw Error(Error::Code::EmptyInput, "compute_metrics needs at least one instance");
  }
  for (int label : labels) {
    if (label != 0 && label != 1) {
      throw Error(Error::Code::BadLabel,
                  "labels must be 0 or 1, got " + std::to_string(label));
    }
  }

  const ConfusionCounts c = confusion(labels, predicted);
  MetricsReport report;
  const double n = static_cast<double>(c.total());
  report.accuracy = static_cast<double>(c.tp + c.tn) / n;

  if (c.tp + c.fp > 0) {
    report.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  } else {
    report.degenerate_flags.insert(DegenerateFlag::PrecisionUndefined);
  }
  double tpr = 0.0;
  if (c.tp + c.fn > 0) {
    tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    report.recall = tpr;
  } else {
    report.degenerate_flags.insert(DegenerateFlag::RecallUndefined);
  }
  double tnr = 0.0;
  if (c.tn + c.fp > 0) {
    tnr = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  } else {
    report.degenerate_flags.insert(DegenerateFlag::SpecificityUndefined);
  }
  report.balanced_accuracy = (tpr + tnr) / 2.0;
  if (report.precision + report.recall > 0) {
    report.f1 = 2.0 * report.precision * report.recall /
                (report.precision + report.recall);
  } else {
    report.degenerate_flags.insert(DegenerateFlag::F1Undefined);
  }
  try {
    report.aucroc = auc_roc(labels, scores);
  } catch (const Error& err) {
    if (err.code() != Error::Code::OneClassOnly) throw;
    report.aucroc = 0.5;
    report.degenerate_flags.insert(DegenerateFlag::AucUndefined);
  }
  return report;
}

namespace {

MetricsReport evaluate_model(const LinearModel& model, const LabeledCorpus& test,
                             double threshold) {
  std::vector<int> labels, predicted;
  std::vector<double> scores;
  labels.reserve(test.size());
  predicted.reserve(test.size());
  scores.reserve(test.size());
  for (const Document& doc : test.docs) {
    const Prediction p = predict(model, doc.text, threshold);
    labels.push_back(doc.label);
    predicted.push_back(p.label);
    scores.push_back(p.probability);
  }
  return compute_metrics(labels, predicted, scores);
}

LabeledCorpus select_by_index(const LabeledCorpus& corpus,
                              const std::vector<std::size_t>& perm,
                              std::size_t begin, std::size_t end) {
  LabeledCorpus out;
  out.docs.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) out.docs.push_back(corpus.docs[perm[i]]);
  return out;
}

MetricsReport mean_metrics(const std::vector<const MetricsReport*>& rows) {
  MetricsReport mean;
  if (rows.empty()) return mean;
  const double n = static_cast<double>(rows.size());
  for (const MetricsReport* r : rows) {
    mean.f1 += r->f1 / n;
    mean.accuracy += r->accuracy / n;
    mean.balanced_accuracy += r->balanced_accuracy / n;
    mean.recall += r->recall / n;
    mean.precision += r->precision / n;
    mean.aucroc += r->aucroc / n;
    mean.degenerate_flags.insert(r->degenerate_flags.begin(),
                                 r->degenerate_flags.end());
  }
  return mean;
}

}  // namespace

ExperimentReport run_experiment(const LabeledCorpus& corpus,
                                const KnowledgeGraph* kg,
                                const std::vector<std::uint64_t>& seeds,
                                const ExperimentConfig& config) {
  if (seeds.empty()) {
    throw Error(Error::Code::EmptyInput, "run_experiment needs at least one seed");
  }
  if (!(config.train_fraction > 0.0) || config.train_fraction > 1.0) {
    throw Error(Error::Code::ParseError,
                "train fraction must be in (0, 1], got " +
                    std::to_string(config.train_fraction));
  }
  struct Arm {
    std::string tag;
    LabeledCorpus docs;
  };
  std::vector<Arm> arms;
  arms.push_back({"base", preprocess_corpus(corpus, config.preprocess)});
  if (kg != nullptr) {
    arms.push_back({"kg", preprocess_corpus(infuse_corpus(*kg, corpus),
                                            config.preprocess)});
  }

  ExperimentReport report;
  for (const Arm& arm : arms) {
    std::vector<const MetricsReport*> successes;
    std::vector<ExperimentRow> arm_rows;
    for (std::uint64_t seed : seeds) {
      const auto perm = split_permutation(corpus.docs.size(), seed);
      const std::size_t n_train =
          train_size(corpus.docs.size(), config.train_fraction);
      ExperimentRow row;
      row.arm = arm.tag;
      row.seed = seed;
      try {
        const LabeledCorpus train = select_by_index(arm.docs, perm, 0, n_train);
        const LabeledCorpus test =
            select_by_index(arm.docs, perm, n_train, perm.size());
        const LinearModel model = fit_cv(train, config.train, seed);
        row.metrics = evaluate_model(model, test, config.threshold);
      } catch (const Error& err) {
        row.error = std::string(to_string(err.code())) + ": " + err.what();
      }
      arm_rows.push_back(std::move(row));
    }
    for (const ExperimentRow& row : arm_rows) {
      if (!row.failed()) successes.push_back(&row.metrics);
    }
    ExperimentRow mean_row;
    mean_row.arm = arm.tag;
    mean_row.is_mean = true;
    mean_row.metrics = mean_metrics(successes);
    if (successes.empty()) mean_row.error = "no successful seeds";
    for (auto& row : arm_rows) report.rows.push_back(std::move(row));
    report.rows.push_back(std::move(mean_row));
  }
  return report;
}

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string full_precision(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string flags_string(const std::set<DegenerateFlag>& flags) {
  std::string out;
  for (DegenerateFlag f : flags) {
    if (!out.empty()) out += "|";
    out += to_string(f);
  }
  return out;
}

}  // namespace

std::string render_experiment_table(const ExperimentReport& report) {
  const std::vector<std::string> header = {"Model",  "Seed",      "F1",
                                           "Accuracy", "Balanced Accuracy",
                                           "Recall", "Precision", "AUCROC"};
  std::vector<std::vector<std::string>> cells;
  cells.push_back(header);
  for (const ExperimentRow& row : report.rows) {
    if (row.failed()) {
      cells.push_back({row.arm, row.is_mean ? "mean" : std::to_string(row.seed),
                       "error: " + row.error, "", "", "", "", ""});
      continue;
    }
    const MetricsReport& m = row.metrics;
    cells.push_back({row.arm, row.is_mean ? "mean" : std::to_string(row.seed),
                     fixed3(m.f1), fixed3(m.accuracy), fixed3(m.balanced_accuracy),
                     fixed3(m.recall), fixed3(m.precision), fixed3(m.aucroc)});
  }
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::string out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += "  ";
      out += row[c];
      out.append(widths[c] - row[c].size(), ' ');
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += "\n";
  }
  return out;
}

std::string experiment_csv(const ExperimentReport& report) {
  std::string out =
      "model,seed,f1,accuracy,balanced_accuracy,recall,precision,aucroc,flags,error\n";
  for (const ExperimentRow& row : report.rows) {
    const MetricsReport& m = row.metrics;
    out += row.arm;
    out += ',';
    out += row.is_mean ? "mean" : std::to_string(row.seed);
    out += ',';
    if (row.failed()) {
      out += ",,,,,,,\"" + row.error + "\"";
    } else {
      out += full_precision(m.f1) + "," + full_precision(m.accuracy) + "," +
             full_precision(m.balanced_accuracy) + "," + full_precision(m.recall) +
             "," + full_precision(m.precision) + "," + full_precision(m.aucroc) +
             "," + flags_string(m.degenerate_flags) + ",";
    }
    out += "\n";
  }
  return out;
}

std::string metrics_json(const MetricsReport& metrics) {
  std::ostringstream out;
  out << "{\"f1\": " << full_precision(metrics.f1)
      << ", \"accuracy\": " << full_precision(metrics.accuracy)
      << ", \"balanced_accuracy\": " << full_precision(metrics.balanced_accuracy)
      << ", \"recall\": " << full_precision(metrics.recall)
      << ", \"precision\": " << full_precision(metrics.precision)
      << ", \"aucroc\": " << full_precision(metrics.aucroc) << ", \"flags\": [";
  bool first = true;
  for (DegenerateFlag f : metrics.degenerate_flags) {
    if (!first) out << ", ";
    out << '"' << to_string(f) << '"';
    first = false;
  }
  out << "]}";
  return out.str();
}

}  // namespace kginfuse
