#include "kginfuse/classifier.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "kginfuse/rng.hpp"
#include "kginfuse/text.hpp"

namespace kginfuse {

TrainConfig::TrainConfig() {
  candidate_grid.reserve(10);
  for (int i = 0; i < 10; ++i) {
    candidate_grid.push_back(std::pow(10.0, -4.0 + 8.0 * i / 9.0));
  }
}

Vocabulary build_vocabulary(const LabeledCorpus& corpus) {
  std::set<std::string> terms;
  for (const Document& doc : corpus.docs) {
    for (const std::string& token : tokenize(doc.text)) terms.insert(token);
  }
  Vocabulary vocab;
  int next = 0;
  for (const std::string& term : terms) vocab.index.emplace(term, next++);
  return vocab;
}

FeatureVector featurize(const Vocabulary& vocab, const std::string& text) {
  FeatureVector features;
  for (const std::string& token : tokenize(text)) {
    int col = vocab.lookup(token);
    if (col >= 0) ++features[col];
  }
  return features;
}

double sigmoid(double z) {
  double p;
  if (z >= 0) {
    p = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    p = e / (1.0 + e);
  }
  // Keep the result inside the open interval (0, 1).
  p = std::min(p, std::nextafter(1.0, 0.0));
  p = std::max(p, DBL_MIN);
  return p;
}

namespace {

double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

using SparseRow = std::vector<std::pair<int, double>>;

std::vector<SparseRow> compile_rows(const std::vector<FeatureVector>& features) {
  std::vector<SparseRow> rows;
  rows.reserve(features.size());
  for (const FeatureVector& fv : features) {
    SparseRow row;
    row.reserve(fv.size());
    for (const auto& [col, count] : fv) {
      row.emplace_back(col, static_cast<double>(count));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

LogisticObjective::LogisticObjective(std::vector<FeatureVector> features,
                                     std::vector<int> labels, double lambda)
    : lambda_(lambda) {
  if (features.size() != labels.size()) {
    throw Error(Error::Code::LengthMismatch,
                "feature and label counts differ: " + std::to_string(features.size()) +
                    " vs " + std::to_string(labels.size()));
  }
  int max_col = -1;
  for (const FeatureVector& fv : features) {
    if (!fv.empty()) max_col = std::max(max_col, fv.rbegin()->first);
  }
  dim_ = static_cast<std::size_t>(max_col + 1) + 1;
  rows_ = compile_rows(features);
  labels_.assign(labels.begin(), labels.end());
}

double LogisticObjective::value_and_gradient(const Eigen::VectorXd& params,
                                             Eigen::VectorXd& grad) const {
  const std::size_t dim = static_cast<std::size_t>(params.size());
  const std::size_t weight_count = dim - 1;
  const double bias = params[static_cast<Eigen::Index>(dim - 1)];
  grad.setZero(static_cast<Eigen::Index>(dim));

  double loss = 0.0;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    double z = bias;
    for (const auto& [col, count] : rows_[i]) {
      z += params[col] * count;
    }
    const double y = labels_[i];
    loss += softplus(z) - y * z;
    const double residual = sigmoid(z) - y;
    for (const auto& [col, count] : rows_[i]) {
      grad[col] += residual * count;
    }
    grad[static_cast<Eigen::Index>(dim - 1)] += residual;
  }
  const auto weights = params.head(static_cast<Eigen::Index>(weight_count));
  loss += 0.5 * lambda_ * weights.squaredNorm();
  grad.head(static_cast<Eigen::Index>(weight_count)) += lambda_ * weights;
  return loss;
}

double LogisticObjective::value(const Eigen::VectorXd& params) const {
  Eigen::VectorXd grad;
  return value_and_gradient(params, grad);
}

FitResult fit_logistic(const LogisticObjective& objective, int feature_count,
                       double tolerance, int max_iterations, int memory) {
  const Eigen::Index dim = feature_count + 1;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd grad(dim);
  double loss = objective.value_and_gradient(x, grad);

  FitResult result;
  result.loss_trace.push_back(loss);

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  const double c1 = 1e-4;
  int iter = 0;
  while (true) {
    result.final_gradient_norm = grad.lpNorm<Eigen::Infinity>();
    if (result.final_gradient_norm <= tolerance) {
      result.converged = true;
      break;
    }
    if (iter >= max_iterations) break;

    // Two-loop recursion for the L-BFGS direction.
    Eigen::VectorXd q = grad;
    std::vector<double> alphas(s_hist.size());
    for (std::size_t i = s_hist.size(); i-- > 0;) {
      alphas[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alphas[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const double gamma =
          s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
    } else {
      q *= 1.0 / std::max(1.0, grad.norm());
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alphas[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd direction = -q;
    double slope = grad.dot(direction);
    if (slope >= 0) {
      direction = -grad;
      slope = grad.dot(direction);
    }

    // Armijo backtracking keeps the loss trace strictly decreasing.
    double step = 1.0;
    Eigen::VectorXd x_next;
    Eigen::VectorXd grad_next(dim);
    double loss_next = 0.0;
    bool accepted = false;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      x_next = x + step * direction;
      loss_next = objective.value_and_gradient(x_next, grad_next);
      if (loss_next <= loss + c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // stalled at numerical precision

    Eigen::VectorXd s = x_next - x;
    Eigen::VectorXd y = grad_next - grad;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x = std::move(x_next);
    grad = std::move(grad_next);
    loss = loss_next;
    result.loss_trace.push_back(loss);
    ++iter;
  }

  result.iterations = iter;
  result.weights = x.head(feature_count);
  result.bias = x[dim - 1];
  return result;
}

namespace {

double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  const double denom = static_cast<double>(2 * tp + fp + fn);
  return denom > 0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
}

// Stratified fold ids: each class is shuffled separately and dealt
// round-robin, so every fold sees both classes.
std::vector<int> fold_assignment(const std::vector<int>& labels, int folds,
                                 std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] == 1 ? pos : neg).push_back(i);
  }
  Rng pos_rng(derive_stream(seed, 1));
  Rng neg_rng(derive_stream(seed, 2));
  shuffle(pos, pos_rng);
  shuffle(neg, neg_rng);
  std::vector<int> fold(labels.size());
  for (std::size_t i = 0; i < pos.size(); ++i) fold[pos[i]] = static_cast<int>(i % folds);
  for (std::size_t i = 0; i < neg.size(); ++i) fold[neg[i]] = static_cast<int>(i % folds);
  return fold;
}

}  // namespace

LinearModel fit_cv(const LabeledCorpus& corpus, const TrainConfig& config,
                   std::uint64_t seed) {
  const std::size_t positives = corpus.positives();
  const std::size_t negatives = corpus.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(Error::Code::SingleClass,
                "training corpus contains a single class (" +
                    std::to_string(positives) + " positives of " +
                    std::to_string(corpus.size()) + ")");
  }
  if (config.candidate_grid.empty()) {
    throw Error(Error::Code::EmptyInput, "candidate grid is empty");
  }
  std::vector<double> grid = config.candidate_grid;
  std::sort(grid.begin(), grid.end());

  LinearModel model;
  model.vocabulary = build_vocabulary(corpus);
  const int feature_count = static_cast<int>(model.vocabulary.size());

  std::vector<FeatureVector> features;
  std::vector<int> labels;
  features.reserve(corpus.size());
  labels.reserve(corpus.size());
  for (const Document& doc : corpus.docs) {
    features.push_back(featurize(model.vocabulary, doc.text));
    labels.push_back(doc.label);
  }

  const int folds = std::min<int>(
      config.folds, static_cast<int>(std::min(positives, negatives)));
  double chosen = grid.front();
  if (folds >= 2) {
    const std::vector<int> fold = fold_assignment(labels, folds, seed);
    double best_f1 = -1.0;
    for (double lambda : grid) {
      double f1_sum = 0.0;
      for (int held_out = 0; held_out < folds; ++held_out) {
        std::vector<FeatureVector> train_features;
        std::vector<int> train_labels;
        for (std::size_t i = 0; i < features.size(); ++i) {
          if (fold[i] == held_out) continue;
          train_features.push_back(features[i]);
          train_labels.push_back(labels[i]);
        }
        LogisticObjective objective(std::move(train_features),
                                    std::move(train_labels), lambda);
        FitResult fit = fit_logistic(objective, feature_count, config.tolerance,
                                     config.max_iterations, config.lbfgs_memory);
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < features.size(); ++i) {
          if (fold[i] != held_out) continue;
          double z = fit.bias;
          for (const auto& [col, count] : features[i]) z += fit.weights[col] * count;
          const int predicted = sigmoid(z) >= 0.5 ? 1 : 0;
          if (predicted == 1 && labels[i] == 1) ++tp;
          else if (predicted == 1) ++fp;
          else if (labels[i] == 1) ++fn;
        }
        f1_sum += f1_from_counts(tp, fp, fn);
      }
      const double mean_f1 = f1_sum / folds;
      // >= so that ties resolve to the stronger (larger) penalty.
      if (mean_f1 >= best_f1) {
        best_f1 = mean_f1;
        chosen = lambda;
      }
    }
  }

  LogisticObjective objective(std::move(features), std::move(labels), chosen);
  FitResult fit = fit_logistic(objective, feature_count, config.tolerance,
                               config.max_iterations, config.lbfgs_memory);

  model.weights = std::move(fit.weights);
  model.bias = fit.bias;
  model.chosen_regularization = chosen;
  model.training_meta.seed = seed;
  model.training_meta.folds = folds >= 2 ? folds : 0;
  model.training_meta.candidate_grid = grid;
  model.training_meta.converged = fit.converged;
  model.training_meta.iterations = fit.iterations;
  model.training_meta.final_gradient_norm = fit.final_gradient_norm;
  return model;
}

double decision_value(const LinearModel& model, const std::string& text) {
  double z = model.bias;
  for (const auto& [col, count] : featurize(model.vocabulary, text)) {
    z += model.weights[col] * count;
  }
  return z;
}

Prediction predict(const LinearModel& model, const std::string& text,
                   double threshold) {
  const double p = sigmoid(decision_value(model, text));
  return {p, p >= threshold ? 1 : 0};
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void save_model(const LinearModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(Error::Code::IoError, "cannot write model file: " + path);
  }
  out << "kginfuse-model 1\n";
  out << "lambda " << format_double(model.chosen_regularization) << "\n";
  out << "bias " << format_double(model.bias) << "\n";
  out << "seed " << model.training_meta.seed << "\n";
  out << "folds " << model.training_meta.folds << "\n";
  out << "converged " << (model.training_meta.converged ? 1 : 0) << "\n";
  out << "iterations " << model.training_meta.iterations << "\n";
  out << "final_gradient_norm "
      << format_double(model.training_meta.final_gradient_norm) << "\n";
  out << "grid " << model.training_meta.candidate_grid.size();
  for (double g : model.training_meta.candidate_grid) out << " " << format_double(g);
  out << "\n";
  out << "vocabulary " << model.vocabulary.size() << "\n";
  std::vector<const std::string*> terms(model.vocabulary.size());
  for (const auto& [term, col] : model.vocabulary.index) terms[col] = &term;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    out << *terms[i] << "\t"
        << format_double(model.weights[static_cast<Eigen::Index>(i)]) << "\n";
  }
}

namespace {

std::string expect_line(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(Error::Code::ParseError, path + ": truncated model file");
  }
  return line;
}

double parse_keyed_double(const std::string& line, const std::string& key,
                          const std::string& path) {
  std::istringstream ss(line);
  std::string name;
  double value = 0.0;
  if (!(ss >> name >> value) || name != key) {
    throw Error(Error::Code::ParseError,
                path + ": expected \"" + key + " <value>\", got \"" + line + "\"");
  }
  return value;
}

std::uint64_t parse_keyed_u64(const std::string& line, const std::string& key,
                              const std::string& path) {
  std::istringstream ss(line);
  std::string name;
  std::uint64_t value = 0;
  if (!(ss >> name >> value) || name != key) {
    throw Error(Error::Code::ParseError,
                path + ": expected \"" + key + " <value>\", got \"" + line + "\"");
  }
  return value;
}

}  // namespace

LinearModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Error::Code::IoError, "cannot open model file: " + path);
  }
  if (expect_line(in, path) != "kginfuse-model 1") {
    throw Error(Error::Code::ParseError, path + ": not a kginfuse-model v1 file");
  }
  LinearModel model;
  model.chosen_regularization = parse_keyed_double(expect_line(in, path), "lambda", path);
  model.bias = parse_keyed_double(expect_line(in, path), "bias", path);
  model.training_meta.seed = parse_keyed_u64(expect_line(in, path), "seed", path);
  model.training_meta.folds =
      static_cast<int>(parse_keyed_double(expect_line(in, path), "folds", path));
  model.training_meta.converged =
      parse_keyed_double(expect_line(in, path), "converged", path) != 0.0;
  model.training_meta.iterations =
      static_cast<int>(parse_keyed_double(expect_line(in, path), "iterations", path));
  model.training_meta.final_gradient_norm =
      parse_keyed_double(expect_line(in, path), "final_gradient_norm", path);

  {
    std::istringstream ss(expect_line(in, path));
    std::string name;
    std::size_t count = 0;
    if (!(ss >> name >> count) || name != "grid") {
      throw Error(Error::Code::ParseError, path + ": malformed grid line");
    }
    model.training_meta.candidate_grid.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      if (!(ss >> model.training_meta.candidate_grid[i])) {
        throw Error(Error::Code::ParseError, path + ": malformed grid line");
      }
    }
  }

  std::size_t vocab_size = 0;
  {
    std::istringstream ss(expect_line(in, path));
    std::string name;
    if (!(ss >> name >> vocab_size) || name != "vocabulary") {
      throw Error(Error::Code::ParseError, path + ": malformed vocabulary line");
    }
  }
  model.weights.resize(static_cast<Eigen::Index>(vocab_size));
  for (std::size_t i = 0; i < vocab_size; ++i) {
    const std::string line = expect_line(in, path);
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(Error::Code::ParseError,
                  path + ": malformed vocabulary row " + std::to_string(i));
    }
    const std::string term = line.substr(0, tab);
    model.vocabulary.index.emplace(term, static_cast<int>(i));
    try {
      model.weights[static_cast<Eigen::Index>(i)] = std::stod(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw Error(Error::Code::ParseError,
                  path + ": bad weight in vocabulary row " + std::to_string(i));
    }
  }
  if (model.vocabulary.size() != vocab_size) {
    throw Error(Error::Code::ParseError, path + ": duplicate vocabulary terms");
  }
  return model;
}

}  // namespace kginfuse
