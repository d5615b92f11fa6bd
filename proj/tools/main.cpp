// kginfuse command-line interface: knowledge-graph validation and stats,
// context infusion, seeded splits, logistic-regression training and
// evaluation, multi-seed experiments, and embedding scorecards.
//
// Exit codes: 0 success, 1 runtime/data error, 2 usage error. Diagnostics
// go to stderr, results to stdout.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kginfuse/classifier.hpp"
#include "kginfuse/corpus.hpp"
#include "kginfuse/evaluation.hpp"
#include "kginfuse/infusion.hpp"
#include "kginfuse/kg.hpp"
#include "kginfuse/scorecard.hpp"

namespace {

using namespace kginfuse;

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Error::Code::IoError, "cannot write file: " + path);
  out << data;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      seeds.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw Error(Error::Code::ParseError, "bad seed \"" + item + "\" in --seeds");
    }
  }
  if (seeds.empty()) {
    throw Error(Error::Code::ParseError, "--seeds must name at least one seed");
  }
  return seeds;
}

std::string stats_json(const TypeCounts& counts) {
  std::string out = "{";
  for (EntryType type : kAllEntryTypes) {
    out += "\"" + std::string(to_string(type)) +
           "\": " + std::to_string(counts.count(type)) + ", ";
  }
  out += "\"total\": " + std::to_string(counts.total) + "}";
  return out;
}

void print_findings(const ValidationReport& report) {
  for (const Finding& f : report.errors) {
    std::cout << "error\t" << f.key << "\t" << to_string(f.code) << "\t" << f.message
              << "\n";
  }
  for (const Finding& f : report.warnings) {
    std::cout << "warning\t" << f.key << "\t" << to_string(f.code) << "\t" << f.message
              << "\n";
  }
  std::cout << "summary\terrors=" << report.errors.size()
            << "\twarnings=" << report.warnings.size() << "\n";
}

struct CliOptions {
  std::string kg_path;
  std::string in_path;
  std::string out_path;
  std::string train_out;
  std::string test_out;
  std::string model_path;
  std::string embeddings_path;
  std::string spec_path;
  std::string csv_out;
  std::string format = "tsv";
  std::string seeds = "42,44,46,48,50";
  std::string output = "table";
  std::uint64_t seed = 0;
  double fraction = 0.8;
  double threshold = 0.5;
  double score_threshold = 0.05;
  double alpha = 0.05;
  int permutations = 10000;
  int folds = 5;
  bool no_preprocess = false;
  bool dump_spec = false;
};

int dispatch(const CLI::App& app, CliOptions& opt) {
  const CorpusFormat format = corpus_format_from_string(opt.format);

  if (app.got_subcommand("kg")) {
    const CLI::App* kg_cmd = app.get_subcommand("kg");
    if (kg_cmd->got_subcommand("validate")) {
      const ValidationReport report = validate_graph_file(opt.kg_path);
      print_findings(report);
      if (!report.ok()) {
        std::cerr << "validation failed: " << report.errors.size() << " error(s) in "
                  << opt.kg_path << "\n";
        return 1;
      }
      return 0;
    }
    const TypeCounts counts = graph_stats(load_graph(opt.kg_path));
    std::cout << stats_json(counts) << "\n";
    return 0;
  }

  if (app.got_subcommand("infuse")) {
    const KnowledgeGraph kg = load_graph(opt.kg_path);
    const LabeledCorpus corpus = load_corpus(opt.in_path, format);
    const LabeledCorpus infused = infuse_corpus(kg, corpus);
    save_corpus(infused, opt.out_path, format);
    std::cout << "{\"documents\": " << infused.size()
              << ", \"positives\": " << infused.positives() << ", \"out\": \""
              << opt.out_path << "\"}\n";
    return 0;
  }

  if (app.got_subcommand("split")) {
    const LabeledCorpus corpus = load_corpus(opt.in_path, format);
    const SplitResult parts = split(corpus, {opt.fraction, opt.seed});
    save_corpus(parts.train, opt.train_out, format);
    save_corpus(parts.test, opt.test_out, format);
    std::cout << "{\"train\": " << parts.train.size()
              << ", \"test\": " << parts.test.size() << ", \"seed\": " << opt.seed
              << "}\n";
    return 0;
  }

  if (app.got_subcommand("train")) {
    LabeledCorpus corpus = load_corpus(opt.in_path, format);
    if (!opt.no_preprocess) corpus = preprocess_corpus(corpus, {});
    TrainConfig config;
    config.folds = opt.folds;
    const LinearModel model = fit_cv(corpus, config, opt.seed);
    save_model(model, opt.model_path);
    std::cout << "{\"vocabulary\": " << model.vocabulary.size()
              << ", \"parameters\": " << model.parameter_count()
              << ", \"lambda\": " << model.chosen_regularization
              << ", \"converged\": " << (model.training_meta.converged ? "true" : "false")
              << ", \"model\": \"" << opt.model_path << "\"}\n";
    if (!model.training_meta.converged) {
      std::cerr << "warning: optimizer stopped before reaching tolerance (gradient norm "
                << model.training_meta.final_gradient_norm << ")\n";
    }
    return 0;
  }

  if (app.got_subcommand("evaluate")) {
    LabeledCorpus corpus = load_corpus(opt.in_path, format);
    if (!opt.no_preprocess) corpus = preprocess_corpus(corpus, {});
    const LinearModel model = load_model(opt.model_path);
    std::vector<int> labels, predicted;
    std::vector<double> scores;
    for (const Document& doc : corpus.docs) {
      const Prediction p = predict(model, doc.text, opt.threshold);
      labels.push_back(doc.label);
      predicted.push_back(p.label);
      scores.push_back(p.probability);
    }
    std::cout << metrics_json(compute_metrics(labels, predicted, scores)) << "\n";
    return 0;
  }

  if (app.got_subcommand("experiment")) {
    const LabeledCorpus corpus = load_corpus(opt.in_path, format);
    KnowledgeGraph kg;
    const bool with_kg = !opt.kg_path.empty();
    if (with_kg) kg = load_graph(opt.kg_path);
    ExperimentConfig config;
    config.train_fraction = opt.fraction;
    config.train.folds = opt.folds;
    config.threshold = opt.threshold;
    if (opt.no_preprocess) config.preprocess = {false, false, false, false};
    const ExperimentReport report =
        run_experiment(corpus, with_kg ? &kg : nullptr, parse_seed_list(opt.seeds),
                       config);
    if (opt.output == "csv") {
      std::cout << experiment_csv(report);
    } else {
      std::cout << render_experiment_table(report);
    }
    if (!opt.csv_out.empty()) write_file(opt.csv_out, experiment_csv(report));
    return 0;
  }

  if (app.got_subcommand("scorecard")) {
    const std::vector<Criterion> criteria =
        opt.spec_path.empty() ? default_criteria() : load_criteria(opt.spec_path);
    if (opt.dump_spec) {
      std::cout << dump_criteria(criteria) << "\n";
      return 0;
    }
    const EmbeddingTable table = load_embeddings(opt.embeddings_path);
    const ScorecardReport report =
        evaluate_scorecard(table, criteria, opt.score_threshold, opt.alpha,
                           opt.permutations, opt.seed);
    if (opt.output == "csv") {
      std::cout << scorecard_csv(report);
    } else {
      std::cout << render_scorecard_table(report);
    }
    if (!opt.csv_out.empty()) write_file(opt.csv_out, scorecard_csv(report));
    return 0;
  }

  std::cerr << "no subcommand given; see --help\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-graph context infusion and hate speech classification toolkit"};
  app.require_subcommand(0, 1);
  CliOptions opt;

  CLI::App* kg_cmd = app.add_subcommand("kg", "Knowledge graph utilities");
  kg_cmd->require_subcommand(1);
  CLI::App* kg_validate = kg_cmd->add_subcommand("validate", "Check a graph file");
  kg_validate->add_option("--kg", opt.kg_path, "graph JSON file")->required();
  CLI::App* kg_stats = kg_cmd->add_subcommand("stats", "Per-type entry counts");
  kg_stats->add_option("--kg", opt.kg_path, "graph JSON file")->required();

  CLI::App* infuse_cmd =
      app.add_subcommand("infuse", "Prepend matched graph context to each document");
  infuse_cmd->add_option("--kg", opt.kg_path, "graph JSON file")->required();
  infuse_cmd->add_option("--in", opt.in_path, "input corpus")->required();
  infuse_cmd->add_option("--out", opt.out_path, "output corpus")->required();
  infuse_cmd->add_option("--format", opt.format, "corpus format: tsv or csv");

  CLI::App* split_cmd = app.add_subcommand("split", "Seeded train/test split");
  split_cmd->add_option("--in", opt.in_path, "input corpus")->required();
  split_cmd->add_option("--train-out", opt.train_out, "training output")->required();
  split_cmd->add_option("--test-out", opt.test_out, "test output")->required();
  split_cmd->add_option("--fraction", opt.fraction, "training fraction (default 0.8)");
  split_cmd->add_option("--seed", opt.seed, "shuffle seed")->required();
  split_cmd->add_option("--format", opt.format, "corpus format: tsv or csv");

  CLI::App* train_cmd =
      app.add_subcommand("train", "Cross-validated logistic regression");
  train_cmd->add_option("--in", opt.in_path, "training corpus")->required();
  train_cmd->add_option("--model-out", opt.model_path, "model file")->required();
  train_cmd->add_option("--seed", opt.seed, "fold-assignment seed")->required();
  train_cmd->add_option("--folds", opt.folds, "CV folds (default 5)");
  train_cmd->add_flag("--no-preprocess", opt.no_preprocess,
                      "train on raw text without tweet normalization");
  train_cmd->add_option("--format", opt.format, "corpus format: tsv or csv");

  CLI::App* eval_cmd = app.add_subcommand("evaluate", "Score a model on a corpus");
  eval_cmd->add_option("--model", opt.model_path, "model file")->required();
  eval_cmd->add_option("--in", opt.in_path, "evaluation corpus")->required();
  eval_cmd->add_option("--threshold", opt.threshold, "decision threshold (default 0.5)");
  eval_cmd->add_flag("--no-preprocess", opt.no_preprocess,
                     "evaluate on raw text without tweet normalization");
  eval_cmd->add_option("--format", opt.format, "corpus format: tsv or csv");

  CLI::App* exp_cmd = app.add_subcommand(
      "experiment", "Multi-seed baseline vs. knowledge-infused comparison");
  exp_cmd->add_option("--in", opt.in_path, "corpus")->required();
  exp_cmd->add_option("--kg", opt.kg_path, "graph JSON file (adds the kg arm)");
  exp_cmd->add_option("--seeds", opt.seeds,
                      "comma-separated split seeds (default 42,44,46,48,50)");
  exp_cmd->add_option("--fraction", opt.fraction, "training fraction (default 0.8)");
  exp_cmd->add_option("--folds", opt.folds, "CV folds (default 5)");
  exp_cmd->add_option("--threshold", opt.threshold, "decision threshold (default 0.5)");
  exp_cmd->add_option("--csv-out", opt.csv_out, "also write the report as CSV");
  exp_cmd->add_option("--output", opt.output, "stdout format: table or csv");
  exp_cmd->add_flag("--no-preprocess", opt.no_preprocess,
                    "skip tweet normalization in both arms");
  exp_cmd->add_option("--format", opt.format, "corpus format: tsv or csv");

  CLI::App* score_cmd = app.add_subcommand(
      "scorecard", "Embedding association scores for the stereotype criteria");
  score_cmd->add_option("--embeddings", opt.embeddings_path,
                        "plain-text word vectors");
  score_cmd->add_option("--spec", opt.spec_path,
                        "criteria JSON (default: bundled criteria)");
  score_cmd->add_option("--threshold", opt.score_threshold,
                        "agreement score threshold (default 0.05)");
  score_cmd->add_option("--alpha", opt.alpha, "significance level (default 0.05)");
  score_cmd->add_option("--permutations", opt.permutations,
                        "permutation count (default 10000)");
  score_cmd->add_option("--seed", opt.seed, "permutation seed");
  score_cmd->add_option("--csv-out", opt.csv_out, "also write the report as CSV");
  score_cmd->add_option("--output", opt.output, "stdout format: table or csv");
  score_cmd->add_flag("--dump-spec", opt.dump_spec,
                      "print the criteria JSON and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << "run with --help for usage\n";
    return 2;
  }

  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 2;
  }
  if (app.got_subcommand("scorecard") && !opt.dump_spec &&
      opt.embeddings_path.empty()) {
    std::cerr << "scorecard requires --embeddings (or --dump-spec)\n";
    return 2;
  }

  try {
    return dispatch(app, opt);
  } catch (const kginfuse::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
