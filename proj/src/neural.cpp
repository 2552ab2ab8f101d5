#include "jccra/neural.hpp"

#include <cmath>

namespace jccra {

namespace {

constexpr int kCheckpointVersion = 1;

Eigen::MatrixXd activate(const Eigen::MatrixXd& z, Activation a) {
  switch (a) {
    case Activation::relu:
      return z.cwiseMax(0.0);
    case Activation::sigmoid:
      return (1.0 + (-z.array()).exp()).inverse().matrix();
    case Activation::identity:
      return z;
  }
  return z;
}

// dL/dz from dL/dy, using the cached pre-activation z.
Eigen::MatrixXd activation_backward(const Eigen::MatrixXd& z, const Eigen::MatrixXd& grad,
                                    Activation a) {
  switch (a) {
    case Activation::relu:
      return (z.array() > 0.0).select(grad, 0.0);
    case Activation::sigmoid: {
      const Eigen::ArrayXXd s = (1.0 + (-z.array()).exp()).inverse();
      return (grad.array() * s * (1.0 - s)).matrix();
    }
    case Activation::identity:
      return grad;
  }
  return grad;
}

std::vector<DenseLayer> zeros_like(const std::vector<DenseLayer>& layers) {
  std::vector<DenseLayer> out(layers.size());
  for (std::size_t i = 0; i < layers.size(); ++i) {
    out[i].weight = Eigen::MatrixXd::Zero(layers[i].weight.rows(), layers[i].weight.cols());
    out[i].bias = Eigen::VectorXd::Zero(layers[i].bias.size());
  }
  return out;
}

std::vector<double> flatten_layers(const std::vector<DenseLayer>& layers) {
  std::vector<double> flat;
  for (const auto& l : layers) {
    flat.insert(flat.end(), l.weight.data(), l.weight.data() + l.weight.size());
    flat.insert(flat.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return flat;
}

void assign_layers(std::vector<DenseLayer>& layers, const std::vector<double>& flat) {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  require(flat.size() == n, "assign: parameter count mismatch");
  std::size_t pos = 0;
  for (auto& l : layers) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), l.weight.size(), l.weight.data());
    pos += static_cast<std::size_t>(l.weight.size());
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), l.bias.size(), l.bias.data());
    pos += static_cast<std::size_t>(l.bias.size());
  }
}

}  // namespace

const char* to_string(Activation a) {
  switch (a) {
    case Activation::relu:
      return "relu";
    case Activation::sigmoid:
      return "sigmoid";
    case Activation::identity:
      return "identity";
  }
  return "identity";
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "identity") return Activation::identity;
  throw InvalidInput("unknown activation '" + name + "'");
}

void MlpSpec::validate() const {
  require(input_dim >= 1 && output_dim >= 1, "MlpSpec: dimensions must be >= 1");
  for (int h : hidden_dims) require(h >= 1, "MlpSpec: hidden dimensions must be >= 1");
}

double MlpGradients::squared_norm() const {
  double s = 0.0;
  for (const auto& l : layers) s += l.weight.squaredNorm() + l.bias.squaredNorm();
  return s;
}

bool MlpGradients::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

void MlpGradients::scale(double factor) {
  for (auto& l : layers) {
    l.weight *= factor;
    l.bias *= factor;
  }
}

Mlp::Mlp(MlpSpec spec, Rng& rng, double final_layer_scale) : spec_(std::move(spec)) {
  spec_.validate();
  std::vector<int> dims;
  dims.push_back(spec_.input_dim);
  dims.insert(dims.end(), spec_.hidden_dims.begin(), spec_.hidden_dims.end());
  dims.push_back(spec_.output_dim);

  layers_.resize(dims.size() - 1);
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const int fan_in = dims[i];
    const int fan_out = dims[i + 1];
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    if (i + 2 == dims.size()) bound *= final_layer_scale;
    std::uniform_real_distribution<double> u(-bound, bound);
    auto& layer = layers_[i];
    layer.weight.resize(fan_out, fan_in);
    layer.bias.resize(fan_out);
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) layer.weight(r, c) = u(rng);
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = u(rng);
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  const Eigen::MatrixXd out = forward(Eigen::MatrixXd(x));
  return out.col(0);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& batch) const {
  require(batch.rows() == spec_.input_dim, "Mlp::forward: input dimension mismatch");
  Eigen::MatrixXd a = batch;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Eigen::MatrixXd z = layers_[i].weight * a;
    z.colwise() += layers_[i].bias;
    const bool last = i + 1 == layers_.size();
    a = activate(z, last ? spec_.output_activation : spec_.hidden_activation);
  }
  return a;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& batch, ForwardCache& cache) const {
  require(batch.rows() == spec_.input_dim, "Mlp::forward: input dimension mismatch");
  cache.inputs.resize(layers_.size());
  cache.pre.resize(layers_.size());
  Eigen::MatrixXd a = batch;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    cache.inputs[i] = a;
    Eigen::MatrixXd z = layers_[i].weight * a;
    z.colwise() += layers_[i].bias;
    const bool last = i + 1 == layers_.size();
    a = activate(z, last ? spec_.output_activation : spec_.hidden_activation);
    cache.pre[i] = std::move(z);
  }
  cache.output = a;
  return a;
}

MlpGradients Mlp::backward(const ForwardCache& cache, const Eigen::MatrixXd& grad_output,
                           Eigen::MatrixXd* grad_input) const {
  require(cache.pre.size() == layers_.size(), "Mlp::backward: cache does not match network");
  require(grad_output.rows() == spec_.output_dim && grad_output.cols() == cache.output.cols(),
          "Mlp::backward: output gradient shape mismatch");
  MlpGradients grads;
  grads.layers.resize(layers_.size());
  Eigen::MatrixXd grad = grad_output;
  for (std::size_t idx = layers_.size(); idx-- > 0;) {
    const bool last = idx + 1 == layers_.size();
    const Eigen::MatrixXd dz =
        activation_backward(cache.pre[idx], grad, last ? spec_.output_activation : spec_.hidden_activation);
    grads.layers[idx].weight.noalias() = dz * cache.inputs[idx].transpose();
    grads.layers[idx].bias = dz.rowwise().sum();
    if (idx > 0 || grad_input != nullptr) grad.noalias() = layers_[idx].weight.transpose() * dz;
  }
  if (grad_input != nullptr) *grad_input = std::move(grad);
  return grads;
}

Eigen::MatrixXd Mlp::input_gradient(const ForwardCache& cache, const Eigen::MatrixXd& grad_output) const {
  require(cache.pre.size() == layers_.size(), "Mlp::input_gradient: cache does not match network");
  Eigen::MatrixXd grad = grad_output;
  for (std::size_t idx = layers_.size(); idx-- > 0;) {
    const bool last = idx + 1 == layers_.size();
    const Eigen::MatrixXd dz =
        activation_backward(cache.pre[idx], grad, last ? spec_.output_activation : spec_.hidden_activation);
    grad.noalias() = layers_[idx].weight.transpose() * dz;
  }
  return grad;
}

std::vector<double> Mlp::flatten() const { return flatten_layers(layers_); }

void Mlp::assign(const std::vector<double>& flat) { assign_layers(layers_, flat); }

bool Mlp::all_finite() const {
  for (const auto& l : layers_) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

Adam::Adam(const Mlp& net, AdamConfig cfg)
    : cfg_(cfg), m_(zeros_like(net.layers())), v_(zeros_like(net.layers())) {
  require(cfg_.learning_rate > 0.0, "Adam: learning rate must be positive");
  require(cfg_.beta1 >= 0.0 && cfg_.beta1 < 1.0 && cfg_.beta2 >= 0.0 && cfg_.beta2 < 1.0,
          "Adam: betas must lie in [0, 1)");
}

void Adam::step(Mlp& net, MlpGradients grads) {
  require(grads.layers.size() == m_.size(), "Adam::step: gradient does not match optimizer state");
  if (!grads.all_finite()) throw TrainingDiverged("Adam::step: non-finite gradient");
  if (cfg_.max_grad_norm > 0.0) {
    const double norm = std::sqrt(grads.squared_norm());
    if (norm > cfg_.max_grad_norm) grads.scale(cfg_.max_grad_norm / norm);
  }
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const double lr = cfg_.learning_rate;
  const double eps = cfg_.epsilon;
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
    v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  auto& layers = net.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    update(layers[i].weight, m_[i].weight, v_[i].weight, grads.layers[i].weight);
    update(layers[i].bias, m_[i].bias, v_[i].bias, grads.layers[i].bias);
  }
}

nlohmann::json Adam::to_json() const {
  return {{"learning_rate", cfg_.learning_rate}, {"beta1", cfg_.beta1},
          {"beta2", cfg_.beta2},                 {"epsilon", cfg_.epsilon},
          {"max_grad_norm", cfg_.max_grad_norm}, {"step", t_},
          {"m", flatten_layers(m_)},             {"v", flatten_layers(v_)}};
}

Adam Adam::from_json(const nlohmann::json& j, const Mlp& net) {
  AdamConfig cfg;
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.beta1 = j.at("beta1").get<double>();
  cfg.beta2 = j.at("beta2").get<double>();
  cfg.epsilon = j.at("epsilon").get<double>();
  cfg.max_grad_norm = j.at("max_grad_norm").get<double>();
  Adam adam(net, cfg);
  adam.t_ = j.at("step").get<long long>();
  assign_layers(adam.m_, j.at("m").get<std::vector<double>>());
  assign_layers(adam.v_, j.at("v").get<std::vector<double>>());
  return adam;
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  require(tau > 0.0 && tau <= 1.0, "soft_update: tau must lie in (0, 1]");
  require(target.spec() == online.spec(), "soft_update: network shapes differ");
  auto& t = target.layers();
  const auto& o = online.layers();
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i].weight = tau * o[i].weight + (1.0 - tau) * t[i].weight;
    t[i].bias = tau * o[i].bias + (1.0 - tau) * t[i].bias;
  }
}

nlohmann::json spec_to_json(const MlpSpec& spec) {
  return {{"input_dim", spec.input_dim},
          {"hidden_dims", spec.hidden_dims},
          {"output_dim", spec.output_dim},
          {"hidden_activation", to_string(spec.hidden_activation)},
          {"output_activation", to_string(spec.output_activation)}};
}

MlpSpec spec_from_json(const nlohmann::json& j) {
  MlpSpec spec;
  spec.input_dim = j.at("input_dim").get<int>();
  spec.hidden_dims = j.at("hidden_dims").get<std::vector<int>>();
  spec.output_dim = j.at("output_dim").get<int>();
  spec.hidden_activation = activation_from_string(j.at("hidden_activation").get<std::string>());
  spec.output_activation = activation_from_string(j.at("output_activation").get<std::string>());
  spec.validate();
  return spec;
}

nlohmann::json mlp_to_json(const Mlp& net) {
  return {{"format", "jccra-mlp"},
          {"version", kCheckpointVersion},
          {"spec", spec_to_json(net.spec())},
          {"params", net.flatten()}};
}

Mlp mlp_from_json(const nlohmann::json& j) {
  require(j.value("format", "") == "jccra-mlp", "mlp checkpoint: unexpected format tag");
  require(j.value("version", 0) == kCheckpointVersion, "mlp checkpoint: unsupported version");
  Rng dummy(0);
  Mlp net(spec_from_json(j.at("spec")), dummy);
  net.assign(j.at("params").get<std::vector<double>>());
  return net;
}

}  // namespace jccra
