#pragma once

// Independent reference implementations used to cross-check the library.
// These stay brute-force on purpose and must not call into the code paths
// they verify.

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Core>

namespace oracles {

// Pairwise AUCROC: fraction of positive/negative pairs where the positive
// outranks the negative, ties credited 0.5.
inline double brute_force_auc(const std::vector<int>& labels,
                              const std::vector<double>& scores) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

inline Confusion count_confusion(const std::vector<int>& labels,
                                 const std::vector<int>& predicted) {
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1 && predicted[i] == 1) ++c.tp;
    if (labels[i] == 0 && predicted[i] == 1) ++c.fp;
    if (labels[i] == 1 && predicted[i] == 0) ++c.fn;
    if (labels[i] == 0 && predicted[i] == 0) ++c.tn;
  }
  return c;
}

// Central-difference gradient of f at x with per-coordinate step h.
inline Eigen::VectorXd central_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double h = 1e-5) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + step;
    const double fp = f(probe);
    probe[i] = x[i] - step;
    const double fm = f(probe);
    probe[i] = x[i];
    grad[i] = (fp - fm) / (2.0 * step);
  }
  return grad;
}

}  // namespace oracles
