#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "jccra/error.hpp"

namespace jccra {

enum class Activation { relu, sigmoid, identity };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct MlpSpec {
  int input_dim = 1;
  std::vector<int> hidden_dims{128, 64, 64};
  int output_dim = 1;
  Activation hidden_activation = Activation::relu;
  Activation output_activation = Activation::identity;

  void validate() const;
  bool operator==(const MlpSpec&) const = default;
};

/// y = act(W x + b); W is (out x in).
struct DenseLayer {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
};

/// Pre- and post-activation values of a batched forward pass. Column j of
/// every matrix belongs to sample j.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> pre;
  Eigen::MatrixXd output;
};

struct MlpGradients {
  std::vector<DenseLayer> layers;

  double squared_norm() const;
  bool all_finite() const;
  void scale(double factor);
};

/// Dense feed-forward network operating on column batches.
class Mlp {
 public:
  Mlp() = default;
  /// Uniform +-1/sqrt(fan_in) initialisation; the final layer is further
  /// multiplied by `final_layer_scale`.
  Mlp(MlpSpec spec, Rng& rng, double final_layer_scale = 1.0);

  const MlpSpec& spec() const { return spec_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  std::size_t parameter_count() const;

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& batch) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& batch, ForwardCache& cache) const;

  /// Reverse pass for dL/d(output) given as `grad_output` (out x B). Writes
  /// dL/d(input) into `grad_input` when non-null.
  MlpGradients backward(const ForwardCache& cache, const Eigen::MatrixXd& grad_output,
                        Eigen::MatrixXd* grad_input = nullptr) const;

  /// dL/d(input) only; skips the parameter gradients.
  Eigen::MatrixXd input_gradient(const ForwardCache& cache, const Eigen::MatrixXd& grad_output) const;

  std::vector<double> flatten() const;
  void assign(const std::vector<double>& flat);
  bool all_finite() const;

 private:
  MlpSpec spec_;
  std::vector<DenseLayer> layers_;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Global gradient-norm clip; 0 disables.
  double max_grad_norm = 0.0;
};

/// Bias-corrected Adam over an Mlp's parameters.
class Adam {
 public:
  Adam() = default;
  Adam(const Mlp& net, AdamConfig cfg);

  /// Throws TrainingDiverged on a non-finite gradient.
  void step(Mlp& net, MlpGradients grads);

  const AdamConfig& config() const { return cfg_; }
  long long steps() const { return t_; }
  const std::vector<DenseLayer>& first_moment() const { return m_; }
  const std::vector<DenseLayer>& second_moment() const { return v_; }

  nlohmann::json to_json() const;
  static Adam from_json(const nlohmann::json& j, const Mlp& net);

 private:
  AdamConfig cfg_;
  long long t_ = 0;
  std::vector<DenseLayer> m_;
  std::vector<DenseLayer> v_;
};

/// target <- tau * online + (1 - tau) * target.
void soft_update(Mlp& target, const Mlp& online, double tau);

nlohmann::json spec_to_json(const MlpSpec& spec);
MlpSpec spec_from_json(const nlohmann::json& j);

/// Versioned container with the spec and the flattened parameters.
nlohmann::json mlp_to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);

}  // namespace jccra
