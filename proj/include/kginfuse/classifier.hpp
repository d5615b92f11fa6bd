#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kginfuse/corpus.hpp"
#include "kginfuse/error.hpp"

namespace kginfuse {

// Bijective term -> column index map. Indices are dense in [0, size).
// Build it from the training split only; featurize drops terms outside it.
struct Vocabulary {
  std::map<std::string, int> index;

  std::size_t size() const { return index.size(); }
  int lookup(const std::string& term) const {
    auto it = index.find(term);
    return it == index.end() ? -1 : it->second;
  }
};

// Unique tokens of the corpus, indexed in lexicographic order.
Vocabulary build_vocabulary(const LabeledCorpus& corpus);

// Sparse token counts, column index -> count (>= 1).
using FeatureVector = std::map<int, int>;

FeatureVector featurize(const Vocabulary& vocab, const std::string& text);

struct TrainConfig {
  int folds = 5;
  // L2 penalty strengths tried by cross-validation, ascending. Default is
  // 10 points log-spaced over [1e-4, 1e4].
  std::vector<double> candidate_grid;
  double tolerance = 1e-6;  // on the gradient infinity norm
  int max_iterations = 1000;
  int lbfgs_memory = 10;

  TrainConfig();
};

struct TrainingMeta {
  std::uint64_t seed = 0;
  int folds = 0;
  std::vector<double> candidate_grid;
  bool converged = true;
  int iterations = 0;
  double final_gradient_norm = 0.0;
};

struct LinearModel {
  Vocabulary vocabulary;
  Eigen::VectorXd weights;
  double bias = 0.0;
  double chosen_regularization = 0.0;
  TrainingMeta training_meta;

  // Parameter count including the bias term.
  std::size_t parameter_count() const { return vocabulary.size() + 1; }
};

struct Prediction {
  double probability = 0.0;
  int label = 0;
};

// probability = sigmoid(w.x + b); label = 1 iff probability >= threshold.
Prediction predict(const LinearModel& model, const std::string& text,
                   double threshold = 0.5);
double decision_value(const LinearModel& model, const std::string& text);

// Numerically stable logistic sigmoid, clamped to the open interval (0, 1).
double sigmoid(double z);

// Full-batch L2-regularized logistic regression objective over a sparse
// document matrix:
//
//   L(w, b) = sum_i [softplus(z_i) - y_i * z_i] + (lambda / 2) * |w|^2,
//   z_i = w . x_i + b.
//
// The bias is unpenalized. Exposed so tests can check the analytic gradient
// against finite differences.
class LogisticObjective {
 public:
  LogisticObjective(std::vector<FeatureVector> features, std::vector<int> labels,
                    double lambda);

  std::size_t dimension() const { return dim_; }  // weights + bias

  // Evaluates the loss and writes the gradient of [w; b] into grad.
  double value_and_gradient(const Eigen::VectorXd& params,
                            Eigen::VectorXd& grad) const;
  double value(const Eigen::VectorXd& params) const;

 private:
  std::vector<std::vector<std::pair<int, double>>> rows_;
  std::vector<double> labels_;
  double lambda_;
  std::size_t dim_;
};

struct FitResult {
  Eigen::VectorXd weights;
  double bias = 0.0;
  bool converged = false;
  int iterations = 0;
  double final_gradient_norm = 0.0;
  std::vector<double> loss_trace;  // loss after each accepted step
};

// Deterministic L-BFGS with Armijo backtracking; the loss trace is strictly
// non-increasing.
FitResult fit_logistic(const LogisticObjective& objective, int feature_count,
                       double tolerance, int max_iterations, int memory);

// Cross-validated training: builds the vocabulary from the given corpus,
// scores every candidate penalty with stratified k-fold CV on held-out F1,
// picks the best (ties go to the stronger penalty), and refits on the full
// corpus. Deterministic for fixed (corpus, config, seed). Throws
// Error::Code::SingleClass when only one label is present. If a class has
// fewer members than two folds require, CV is skipped and the weakest
// penalty in the grid is used.
LinearModel fit_cv(const LabeledCorpus& corpus, const TrainConfig& config,
                   std::uint64_t seed);

// Versioned flat text file; numbers carry 17 significant digits so the
// round trip is exact.
void save_model(const LinearModel& model, const std::string& path);
LinearModel load_model(const std::string& path);

}  // namespace kginfuse
