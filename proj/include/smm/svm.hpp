#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "smm/types.hpp"

namespace smm {

/// One-vs-rest linear SVM: one hinge-loss head per material class.
struct LinearSvmModel {
  Eigen::MatrixXd weights;  // kNumMaterials x input_dim
  Eigen::VectorXd biases;   // kNumMaterials
  double lambda = 1e-4;
  int epochs = 100;
  std::uint64_t seed = 0;
};

/// Pegasos-style stochastic subgradient training with step size 1/(lambda*t)
/// per head; biases are unregularized. Deterministic per seed.
LinearSvmModel train_svm(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                         double lambda, int epochs, std::uint64_t seed);

/// Argmax class score, ties toward the lowest class code.
Material predict_svm(const LinearSvmModel& model, const Eigen::VectorXd& x);

/// Mean regularized hinge objective of one head over the dataset; used for
/// the objective-decrease property.
double svm_objective(const LinearSvmModel& model, int cls, const Eigen::MatrixXd& features,
                     const std::vector<int>& labels);

}  // namespace smm
