#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "smm/mlp.hpp"
#include "smm/report_io.hpp"

using namespace smm;

namespace {

MlpArchitecture tiny_arch(int input_dim, std::vector<int> hidden, double dropout = 0.0) {
  MlpArchitecture arch;
  arch.input_dim = input_dim;
  arch.hidden = std::move(hidden);
  arch.dropout_rate = dropout;
  return arch;
}

/// Two well-separated clusters mapped to labels 0/1 within the 5-way head.
void separable_fixture(Eigen::MatrixXd& features, std::vector<int>& labels) {
  Rng rng(77);
  const int per_class = 100;
  features.resize(2 * per_class, 2);
  labels.resize(2 * per_class);
  for (int i = 0; i < per_class; ++i) {
    features(i, 0) = -2.0 + 0.3 * rng.normal();
    features(i, 1) = 0.3 * rng.normal();
    labels[i] = 0;
    features(per_class + i, 0) = 2.0 + 0.3 * rng.normal();
    features(per_class + i, 1) = 0.3 * rng.normal();
    labels[per_class + i] = 1;
  }
}

}  // namespace

TEST_CASE("glorot init is deterministic, bounded, with zero biases") {
  const auto arch = tiny_arch(288, {64});
  const MlpParams a = init_params(arch, 4);
  const MlpParams b = init_params(arch, 4);
  CHECK(a.weights[0] == b.weights[0]);
  const double limit = std::sqrt(6.0 / (288 + 64));
  CHECK(limit == doctest::Approx(0.1306).epsilon(1e-3));
  CHECK(a.weights[0].cwiseAbs().maxCoeff() <= limit);
  CHECK(a.biases[0].cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.biases[1].cwiseAbs().maxCoeff() == 0.0);
  const MlpParams c = init_params(arch, 5);
  CHECK(a.weights[0] != c.weights[0]);
}

TEST_CASE("forward with zero parameters is the uniform distribution") {
  const auto arch = tiny_arch(3, {4});
  MlpParams params = init_params(arch, 0);
  for (auto& w : params.weights) w.setZero();
  Eigen::MatrixXd x(1, 3);
  x << 0.1, 0.7, -0.2;
  const auto cache = forward(params, arch, x, ForwardMode::eval, nullptr);
  for (int c = 0; c < 5; ++c) CHECK(cache.probabilities(0, c) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("eval forward is deterministic and probabilities form a simplex") {
  const auto arch = tiny_arch(6, {5, 4});
  const MlpParams params = init_params(arch, 12);
  Rng rng(3);
  Eigen::MatrixXd x(4, 6);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 6; ++c) x(r, c) = rng.normal();
  }
  const auto first = forward(params, arch, x, ForwardMode::eval, nullptr);
  const auto second = forward(params, arch, x, ForwardMode::eval, nullptr);
  CHECK(first.probabilities == second.probabilities);
  for (int r = 0; r < 4; ++r) {
    CHECK(first.probabilities.row(r).sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(first.probabilities.row(r).minCoeff() >= 0.0);
  }
}

TEST_CASE("single neuron leaky activation matches the hand computation") {
  auto arch = tiny_arch(1, {1});
  arch.leaky_slope = 0.3;
  MlpParams params = init_params(arch, 0);
  params.weights[0](0, 0) = 2.0;
  Eigen::MatrixXd x(1, 1);
  x << -1.0;
  const auto cache = forward(params, arch, x, ForwardMode::eval, nullptr);
  CHECK(cache.pre_activations[0](0, 0) == doctest::Approx(-2.0));
  CHECK(cache.activations[1](0, 0) == doctest::Approx(-0.6));
}

TEST_CASE("cross-entropy of zero parameters is ln 5") {
  const auto arch = tiny_arch(3, {4});
  MlpParams params = init_params(arch, 0);
  for (auto& w : params.weights) w.setZero();
  Eigen::MatrixXd x(2, 3);
  x.setRandom();
  const double loss =
      loss_and_grads(params, arch, x, {1, 3}, ForwardMode::eval, nullptr, nullptr);
  CHECK(loss == doctest::Approx(std::log(5.0)).epsilon(1e-9));
}

TEST_CASE("loss approaches zero for a confident correct prediction") {
  const auto arch = tiny_arch(1, {1});
  MlpParams params = init_params(arch, 0);
  params.weights[0](0, 0) = 1.0;
  params.biases[1](2) = 50.0;  // push class 2 to near-certainty
  Eigen::MatrixXd x(1, 1);
  x << 1.0;
  const double loss =
      loss_and_grads(params, arch, x, {2}, ForwardMode::eval, nullptr, nullptr);
  CHECK(loss < 1e-9);
  CHECK_THROWS_AS(
      loss_and_grads(params, arch, x, {7}, ForwardMode::eval, nullptr, nullptr),
      std::invalid_argument);
}

TEST_CASE("backprop matches central finite differences on small networks") {
  Rng seeds(2024);
  for (int trial = 0; trial < 5; ++trial) {
    const auto arch = tiny_arch(4, {5, 3});
    MlpParams params = init_params(arch, seeds.next_u64());
    Rng data_rng(seeds.next_u64());
    Eigen::MatrixXd x(6, 4);
    std::vector<int> labels(6);
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 4; ++c) x(r, c) = data_rng.normal();
      labels[r] = static_cast<int>(data_rng.below(5));
    }
    MlpParams grads;
    loss_and_grads(params, arch, x, labels, ForwardMode::eval, nullptr, &grads);

    const double h = 1e-5;
    double max_rel = 0.0;
    auto check_entry = [&](double& theta, double analytic) {
      const double saved = theta;
      theta = saved + h;
      const double up = loss_and_grads(params, arch, x, labels, ForwardMode::eval, nullptr, nullptr);
      theta = saved - h;
      const double down =
          loss_and_grads(params, arch, x, labels, ForwardMode::eval, nullptr, nullptr);
      theta = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double rel =
          std::abs(numeric - analytic) / std::max({std::abs(numeric), std::abs(analytic), 1e-2});
      max_rel = std::max(max_rel, rel);
    };
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
      for (Eigen::Index r = 0; r < params.weights[l].rows(); ++r) {
        for (Eigen::Index c = 0; c < params.weights[l].cols(); ++c) {
          check_entry(params.weights[l](r, c), grads.weights[l](r, c));
        }
        check_entry(params.biases[l](r), grads.biases[l](r));
      }
    }
    CHECK(max_rel < 1e-5);
  }
}

TEST_CASE("adam first step matches the hand-derived scalar update") {
  MlpParams params;
  params.weights.push_back(Eigen::MatrixXd::Zero(1, 1));
  params.biases.push_back(Eigen::VectorXd::Zero(1));
  MlpParams grads;
  grads.weights.push_back(Eigen::MatrixXd::Constant(1, 1, 1.0));
  grads.biases.push_back(Eigen::VectorXd::Zero(1));
  AdamState state = init_adam_state(params);
  TrainConfig cfg;

  adam_step(params, grads, state, cfg);
  CHECK(state.step == 1);
  CHECK(state.m_weights[0](0, 0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(state.v_weights[0](0, 0) == doctest::Approx(0.001).epsilon(1e-15));
  CHECK(std::abs(params.weights[0](0, 0) - (-0.000499999995)) < 1e-12);
  CHECK(params.biases[0](0) == 0.0);  // zero gradient leaves the bias exactly

  MlpParams bad = grads;
  bad.weights[0](0, 0) = std::nan("");
  CHECK_THROWS_AS(adam_step(params, bad, state, cfg), std::invalid_argument);
}

TEST_CASE("training solves the separable fixture deterministically") {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  separable_fixture(features, labels);

  // linear oracle first: a sign threshold on the first coordinate separates
  for (int i = 0; i < features.rows(); ++i) {
    CHECK((features(i, 0) > 0.0 ? 1 : 0) == labels[i]);
  }

  auto arch = tiny_arch(2, {8, 8}, 0.25);
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.learning_rate = 0.005;
  cfg.seed = 5;
  const MlpModel model = train_mlp(features, labels, arch, cfg);

  int correct = 0;
  for (int i = 0; i < features.rows(); ++i) {
    if (static_cast<int>(predict(model, features.row(i).transpose()).first) == labels[i]) {
      ++correct;
    }
  }
  CHECK(correct == features.rows());
  CHECK(model.epoch_losses[9] < model.epoch_losses[0]);

  const MlpModel again = train_mlp(features, labels, arch, cfg);
  for (std::size_t l = 0; l < model.params.weights.size(); ++l) {
    CHECK(model.params.weights[l] == again.params.weights[l]);
    CHECK(model.params.biases[l] == again.params.biases[l]);
  }

  TrainConfig no_epochs = cfg;
  no_epochs.epochs = 0;
  const MlpModel untrained = train_mlp(features, labels, arch, no_epochs);
  const MlpParams fresh = init_params(arch, cfg.seed);
  CHECK(untrained.params.weights[0] == fresh.weights[0]);
}

TEST_CASE("argmax prediction breaks ties toward the lowest class code") {
  const auto arch = tiny_arch(3, {4});
  MlpModel model;
  model.architecture = arch;
  model.params = init_params(arch, 0);
  for (auto& w : model.params.weights) w.setZero();
  Eigen::VectorXd x(3);
  x << 1.0, 2.0, 3.0;
  const auto [cls, probs] = predict(model, x);
  CHECK(cls == Material::metal);
  CHECK(probs.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("inverted dropout preserves the expected activation") {
  const auto arch = tiny_arch(8, {16}, 0.25);
  const MlpParams params = init_params(arch, 21);
  Eigen::MatrixXd x(1, 8);
  Rng data_rng(4);
  for (int c = 0; c < 8; ++c) x(0, c) = data_rng.normal();

  const auto eval_cache = forward(params, arch, x, ForwardMode::eval, nullptr);
  const Eigen::MatrixXd eval_hidden = eval_cache.activations[1];

  Rng dropout_rng(99);
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(1, 16);
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) {
    const auto cache = forward(params, arch, x, ForwardMode::train, &dropout_rng);
    mean += cache.activations[1];
  }
  mean /= draws;
  CHECK((mean - eval_hidden).norm() / eval_hidden.norm() < 0.02);
}

TEST_CASE("saved models reproduce predictions bit for bit") {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  separable_fixture(features, labels);
  auto arch = tiny_arch(2, {6}, 0.25);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 3;
  const MlpModel model = train_mlp(features, labels, arch, cfg);

  const auto path = std::filesystem::temp_directory_path() / "smm_test_model.json";
  save_mlp_model(model, path);
  const MlpModel loaded = load_mlp_model(path);
  for (int i = 0; i < 10; ++i) {
    const auto a = predict(model, features.row(i).transpose());
    const auto b = predict(loaded, features.row(i).transpose());
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
  }
}
