#include "smm/mlp.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace smm {
namespace {

std::vector<int> layer_dims(const MlpArchitecture& arch) {
  if (arch.hidden.empty()) throw std::invalid_argument("mlp: hidden layer list is empty");
  if (arch.dropout_rate < 0.0 || arch.dropout_rate >= 1.0) {
    throw std::invalid_argument("mlp: dropout_rate must be in [0, 1)");
  }
  if (arch.leaky_slope < 0.0) throw std::invalid_argument("mlp: leaky_slope must be >= 0");
  std::vector<int> dims = {arch.input_dim};
  dims.insert(dims.end(), arch.hidden.begin(), arch.hidden.end());
  dims.push_back(arch.output_dim);
  return dims;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    Eigen::ArrayXd e = (logits.row(r).array() - mx).exp();
    p.row(r) = (e / e.sum()).matrix();
  }
  return p;
}

}  // namespace

MlpParams init_params(const MlpArchitecture& arch, std::uint64_t seed) {
  const auto dims = layer_dims(arch);
  Rng rng(seed);
  MlpParams params;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l], fan_out = dims[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-limit, limit);
    }
    params.weights.push_back(std::move(w));
    params.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return params;
}

AdamState init_adam_state(const MlpParams& params) {
  AdamState state;
  for (const auto& w : params.weights) {
    state.m_weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    state.v_weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  }
  for (const auto& b : params.biases) {
    state.m_biases.push_back(Eigen::VectorXd::Zero(b.size()));
    state.v_biases.push_back(Eigen::VectorXd::Zero(b.size()));
  }
  return state;
}

ForwardCache forward(const MlpParams& params, const MlpArchitecture& arch,
                     const Eigen::MatrixXd& x, ForwardMode mode, Rng* rng) {
  if (x.cols() != arch.input_dim) throw std::invalid_argument("forward: input dim mismatch");
  if (mode == ForwardMode::train && arch.dropout_rate > 0.0 && rng == nullptr) {
    throw std::invalid_argument("forward: train mode needs an rng");
  }
  const std::size_t num_layers = params.weights.size();
  ForwardCache cache;
  cache.activations.push_back(x);
  for (std::size_t l = 0; l < num_layers; ++l) {
    Eigen::MatrixXd z =
        (cache.activations.back() * params.weights[l].transpose()).rowwise() +
        params.biases[l].transpose();
    cache.pre_activations.push_back(z);
    if (l + 1 == num_layers) {
      cache.probabilities = softmax_rows(z);
      break;
    }
    Eigen::MatrixXd a = z.unaryExpr([&](double v) {
      return v >= 0.0 ? v : arch.leaky_slope * v;
    });
    Eigen::MatrixXd mask = Eigen::MatrixXd::Ones(a.rows(), a.cols());
    if (mode == ForwardMode::train && arch.dropout_rate > 0.0) {
      const double keep = 1.0 - arch.dropout_rate;
      for (Eigen::Index r = 0; r < mask.rows(); ++r) {
        for (Eigen::Index c = 0; c < mask.cols(); ++c) {
          mask(r, c) = rng->uniform() < arch.dropout_rate ? 0.0 : 1.0 / keep;
        }
      }
      a = a.cwiseProduct(mask);
    }
    cache.dropout_masks.push_back(std::move(mask));
    cache.activations.push_back(std::move(a));
  }
  return cache;
}

double loss_and_grads(const MlpParams& params, const MlpArchitecture& arch,
                      const Eigen::MatrixXd& features, const std::vector<int>& labels,
                      ForwardMode mode, Rng* rng, MlpParams* grads) {
  const Eigen::Index batch = features.rows();
  if (batch == 0) throw std::invalid_argument("loss_and_grads: empty batch");
  if (static_cast<Eigen::Index>(labels.size()) != batch) {
    throw std::invalid_argument("loss_and_grads: label count mismatch");
  }
  for (int y : labels) {
    if (y < 0 || y >= arch.output_dim) {
      throw std::invalid_argument("loss_and_grads: label out of range");
    }
  }

  ForwardCache cache = forward(params, arch, features, mode, rng);

  double loss = 0.0;
  for (Eigen::Index r = 0; r < batch; ++r) {
    loss -= std::log(std::max(cache.probabilities(r, labels[r]), 1e-12));
  }
  loss /= static_cast<double>(batch);
  if (grads == nullptr) return loss;

  const std::size_t num_layers = params.weights.size();
  grads->weights.assign(num_layers, {});
  grads->biases.assign(num_layers, {});

  // d(loss)/d(logits) for softmax cross-entropy
  Eigen::MatrixXd delta = cache.probabilities;
  for (Eigen::Index r = 0; r < batch; ++r) delta(r, labels[r]) -= 1.0;
  delta /= static_cast<double>(batch);

  for (int l = static_cast<int>(num_layers) - 1; l >= 0; --l) {
    grads->weights[l] = delta.transpose() * cache.activations[l];
    grads->biases[l] = delta.colwise().sum().transpose();
    if (l == 0) break;
    Eigen::MatrixXd da = delta * params.weights[l];
    da = da.cwiseProduct(cache.dropout_masks[l - 1]);
    const Eigen::MatrixXd& z = cache.pre_activations[l - 1];
    delta = da.binaryExpr(z, [&](double g, double zv) {
      return zv >= 0.0 ? g : arch.leaky_slope * g;
    });
  }
  return loss;
}

void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state,
               const TrainConfig& cfg) {
  for (const auto& g : grads.weights) {
    if (!g.allFinite()) throw std::invalid_argument("adam_step: non-finite gradient");
  }
  for (const auto& g : grads.biases) {
    if (!g.allFinite()) throw std::invalid_argument("adam_step: non-finite gradient");
  }
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);

  auto update = [&](auto& theta, const auto& g, auto& m, auto& v) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = (cfg.beta2 * v.array() + (1.0 - cfg.beta2) * g.array().square()).matrix();
    const auto m_hat = m.array() / bc1;
    const auto v_hat = v.array() / bc2;
    theta = (theta.array() - cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.adam_epsilon))
                .matrix();
  };
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    update(params.weights[l], grads.weights[l], state.m_weights[l], state.v_weights[l]);
    update(params.biases[l], grads.biases[l], state.m_biases[l], state.v_biases[l]);
  }
}

MlpModel train_mlp(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                   const MlpArchitecture& arch, const TrainConfig& cfg) {
  const Eigen::Index n = features.rows();
  if (n == 0) throw std::invalid_argument("train_mlp: empty dataset");
  if (features.cols() != arch.input_dim) {
    throw std::invalid_argument("train_mlp: feature dim mismatch");
  }
  if (cfg.batch_size < 1 || !(cfg.learning_rate > 0.0)) {
    throw std::invalid_argument("train_mlp: bad config");
  }

  MlpModel model;
  model.architecture = arch;
  model.config = cfg;
  model.params = init_params(arch, cfg.seed);
  AdamState state = init_adam_state(model.params);

  Rng shuffle_rng = Rng(cfg.seed).fork(1);
  Rng dropout_rng = Rng(cfg.seed).fork(2);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle_each_epoch) shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
      const Eigen::Index size = std::min<Eigen::Index>(cfg.batch_size, n - start);
      Eigen::MatrixXd batch(size, features.cols());
      std::vector<int> batch_labels(size);
      for (Eigen::Index i = 0; i < size; ++i) {
        batch.row(i) = features.row(order[start + i]);
        batch_labels[i] = labels[order[start + i]];
      }
      MlpParams grads;
      const double loss = loss_and_grads(model.params, arch, batch, batch_labels,
                                         ForwardMode::train, &dropout_rng, &grads);
      adam_step(model.params, grads, state, cfg);
      epoch_loss += loss * static_cast<double>(size);
    }
    model.epoch_losses.push_back(epoch_loss / static_cast<double>(n));
  }
  return model;
}

std::pair<Material, Eigen::VectorXd> predict(const MlpModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.architecture.input_dim) {
    throw std::invalid_argument("predict: input dim mismatch");
  }
  ForwardCache cache =
      forward(model.params, model.architecture, x.transpose(), ForwardMode::eval, nullptr);
  const Eigen::VectorXd probs = cache.probabilities.row(0).transpose();
  int best = 0;
  for (int c = 1; c < probs.size(); ++c) {
    if (probs(c) > probs(best)) best = c;
  }
  return {static_cast<Material>(best), probs};
}

}  // namespace smm
