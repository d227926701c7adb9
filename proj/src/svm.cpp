#include "smm/svm.hpp"

#include <numeric>
#include <stdexcept>

#include "smm/rng.hpp"

namespace smm {

LinearSvmModel train_svm(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                         double lambda, int epochs, std::uint64_t seed) {
  const Eigen::Index n = features.rows();
  if (n == 0) throw std::invalid_argument("train_svm: empty dataset");
  if (!(lambda > 0.0)) throw std::invalid_argument("train_svm: lambda must be positive");
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw std::invalid_argument("train_svm: label count mismatch");
  }

  LinearSvmModel model;
  model.weights = Eigen::MatrixXd::Zero(kNumMaterials, features.cols());
  model.biases = Eigen::VectorXd::Zero(kNumMaterials);
  model.lambda = lambda;
  model.epochs = epochs;
  model.seed = seed;

  // The 5 binary problems are independent; each gets its own stream.
  for (int cls = 0; cls < kNumMaterials; ++cls) {
    Rng rng = Rng(seed).fork(cls);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(features.cols());
    double b = 0.0;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::int64_t t = 0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
      rng.shuffle(order);
      for (int i : order) {
        ++t;
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        const double y = labels[i] == cls ? 1.0 : -1.0;
        const double margin = y * (w.dot(features.row(i)) + b);
        w *= (1.0 - eta * lambda);
        if (margin < 1.0) {
          w += eta * y * features.row(i).transpose();
          b += eta * y;
        }
      }
    }
    model.weights.row(cls) = w.transpose();
    model.biases(cls) = b;
  }
  return model;
}

Material predict_svm(const LinearSvmModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.weights.cols()) {
    throw std::invalid_argument("predict_svm: input dim mismatch");
  }
  const Eigen::VectorXd scores = model.weights * x + model.biases;
  int best = 0;
  for (int c = 1; c < kNumMaterials; ++c) {
    if (scores(c) > scores(best)) best = c;
  }
  return static_cast<Material>(best);
}

double svm_objective(const LinearSvmModel& model, int cls, const Eigen::MatrixXd& features,
                     const std::vector<int>& labels) {
  const Eigen::VectorXd w = model.weights.row(cls).transpose();
  const double b = model.biases(cls);
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const double y = labels[i] == cls ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - y * (w.dot(features.row(i)) + b));
  }
  hinge /= static_cast<double>(features.rows());
  return hinge + 0.5 * model.lambda * w.squaredNorm();
}

}  // namespace smm
