#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "smm/rng.hpp"
#include "smm/types.hpp"

namespace smm {

struct MlpArchitecture {
  int input_dim = 331;
  std::vector<int> hidden = {64, 64, 32, 32};
  int output_dim = kNumMaterials;
  double leaky_slope = 0.3;
  double dropout_rate = 0.25;
};

/// Per-layer weight (fan_out x fan_in) and bias (fan_out).
struct MlpParams {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

struct TrainConfig {
  int epochs = 300;
  int batch_size = 32;
  double learning_rate = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  bool shuffle_each_epoch = true;
};

struct AdamState {
  std::vector<Eigen::MatrixXd> m_weights, v_weights;
  std::vector<Eigen::VectorXd> m_biases, v_biases;
  std::int64_t step = 0;
};

struct MlpModel {
  MlpArchitecture architecture;
  MlpParams params;
  TrainConfig config;
  std::vector<double> epoch_losses;
};

enum class ForwardMode { train, eval };

/// Cached intermediates for backprop. activations[0] is the input batch;
/// dropout_masks hold the inverted-dropout scaling applied in train mode.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> activations;
  std::vector<Eigen::MatrixXd> pre_activations;
  std::vector<Eigen::MatrixXd> dropout_masks;
  Eigen::MatrixXd probabilities;  // batch x output_dim
};

/// Uniform Glorot weights, zero biases; deterministic per seed.
MlpParams init_params(const MlpArchitecture& arch, std::uint64_t seed);

AdamState init_adam_state(const MlpParams& params);

/// Batched forward pass; rows of x are samples. In train mode one dropout
/// mask per layer is drawn from rng for the whole batch call.
ForwardCache forward(const MlpParams& params, const MlpArchitecture& arch,
                     const Eigen::MatrixXd& x, ForwardMode mode, Rng* rng);

/// Mean cross-entropy over the batch with probabilities clamped at 1e-12,
/// plus backprop gradients matching MlpParams shapes.
double loss_and_grads(const MlpParams& params, const MlpArchitecture& arch,
                      const Eigen::MatrixXd& features, const std::vector<int>& labels,
                      ForwardMode mode, Rng* rng, MlpParams* grads);

/// Bias-corrected Adam update; returns updated params in place.
void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state,
               const TrainConfig& cfg);

/// Full training loop: epochs x ceil(N/batch) Adam steps over seeded
/// shuffled minibatches (final short batch kept). Deterministic per seed.
MlpModel train_mlp(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                   const MlpArchitecture& arch, const TrainConfig& cfg);

/// Eval-mode forward; argmax class with ties toward the lowest code.
std::pair<Material, Eigen::VectorXd> predict(const MlpModel& model, const Eigen::VectorXd& x);

}  // namespace smm
