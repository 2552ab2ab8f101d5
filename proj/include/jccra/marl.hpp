#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "jccra/env.hpp"
#include "jccra/neural.hpp"

namespace jccra {

/// Which learner family drives the users.
enum class Scheme {
  maddpg,          // one agent per user, joint (alpha, eta)
  ddpg,            // one central agent, full state in, all actions out
  maddpg_cra_fpc,  // per-user agents learn alpha; eta from power control
  maddpg_cra_max,  // per-user agents learn alpha; eta = 1
};

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);
bool is_centralized(Scheme s);
bool learns_power(Scheme s);

struct NoiseConfig {
  double sigma_start = 0.2;
  double sigma_end = 0.01;
};

struct TrainConfig {
  double discount = 0.99;
  double tau = 0.005;
  double critic_lr = 1e-3;
  double actor_lr = 1e-4;
  int batch_size = 128;
  int buffer_capacity = 10000;
  int episodes = 1500;
  NoiseConfig noise;
  std::uint64_t seed = 1;
  std::vector<int> hidden_dims{128, 64, 64};
  double actor_final_layer_scale = 1e-3;
  double max_grad_norm = 0.0;
  /// Multiplies the environment reward before it enters the critic target.
  double reward_scale = 1.0;

  void validate() const;
  /// Gaussian exploration std for a given episode (exponential decay).
  double noise_sigma(int episode) const;
};

/// Maps raw observations into network inputs: task by task_max, deadline by
/// the step length. The rate becomes the SINR it implies, as log10 / 5 with a
/// floor at -100 dB, so low-power steps still carry channel information and
/// the mapping never drifts during training.
struct ObservationScaler {
  double task_scale = 1.0;
  double deadline_scale = 1.0;
  double bandwidth_hz = 1.0;

  static ObservationScaler for_env(const EnvConfig& cfg);
  double rate_feature(double rate_bps) const;
  /// Rescales every observation triple of a (3n x B) matrix in place.
  void apply(Eigen::MatrixXd& states) const;
  Eigen::Vector3d scaled(const Observation& o) const;
};

struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;
};

/// Column-per-sample view of B transitions.
struct Batch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  Eigen::VectorXd rewards;
  Eigen::MatrixXd next_states;

  int size() const { return static_cast<int>(rewards.size()); }
};

/// Fixed-capacity ring of transitions; oldest entries are overwritten first.
class ReplayBuffer {
 public:
  ReplayBuffer(int capacity, int state_dim, int action_dim);

  void push(std::span<const double> state, std::span<const double> action, double reward,
            std::span<const double> next_state);

  int size() const { return size_; }
  int capacity() const { return capacity_; }
  /// Logical index 0 is the oldest stored transition.
  Transition at(int index) const;

  /// `count` distinct logical indices, uniformly at random.
  std::vector<int> sample_indices(int count, Rng& rng) const;
  Batch gather(std::span<const int> indices) const;
  Batch sample(int count, Rng& rng) const;

 private:
  int physical(int logical) const;

  int capacity_;
  int size_ = 0;
  int head_ = 0;
  Eigen::MatrixXd states_;
  Eigen::MatrixXd actions_;
  Eigen::VectorXd rewards_;
  Eigen::MatrixXd next_states_;
};

/// Online and target actor/critic pairs of one learner plus their optimizers.
struct AgentNets {
  Mlp actor;
  Mlp critic;
  Mlp actor_target;
  Mlp critic_target;
  Adam actor_opt;
  Adam critic_opt;
};

nlohmann::json agent_to_json(const AgentNets& a);
AgentNets agent_from_json(const nlohmann::json& j);

/// Per-user decision maker at execution time. It only ever receives its own
/// observation.
class DecentralizedActor {
 public:
  DecentralizedActor(const Mlp& actor, const ObservationScaler& scaler, bool learns_power)
      : actor_(actor), scaler_(scaler), learns_power_(learns_power) {}

  /// `fixed_eta` is used when the agent only learns alpha.
  Action act(const Observation& own, double fixed_eta) const;

 private:
  const Mlp& actor_;
  const ObservationScaler& scaler_;
  bool learns_power_;
};

struct EpisodeMetrics {
  int episode = 0;
  double total_reward = 0.0;
  double success_rate = 0.0;
  double mean_energy_j = 0.0;
  double mean_delay_s = 0.0;
  double wall_seconds = 0.0;
};

nlohmann::json metrics_to_json(const EpisodeMetrics& m);

/// One update's diagnostics.
struct UpdateStats {
  double critic_loss = 0.0;
  double actor_objective = 0.0;
};

/// Actor-critic trainer shared by MADDPG (one learner per user), the
/// centralized DDPG benchmark (a single learner) and the alpha-only variants.
///
/// Learner g keeps its own replay buffer of (s_g, a, r, s_g'), where s_g is
/// agent g's full training state and a the joint action in user order
/// (alpha_0, eta_0, alpha_1, ...). Critics take [scaled s_g; a].
class ActorCriticTrainer {
 public:
  ActorCriticTrainer(Scheme scheme, const EnvConfig& env_cfg, TrainConfig cfg);

  Scheme scheme() const { return scheme_; }
  int num_users() const { return num_users_; }
  int num_learners() const { return static_cast<int>(agents_.size()); }
  const TrainConfig& config() const { return cfg_; }

  const AgentNets& agent(int g) const { return agents_.at(g); }
  AgentNets& agent(int g) { return agents_.at(g); }
  const ReplayBuffer& buffer(int g) const { return buffers_.at(g); }
  const ObservationScaler& scaler() const { return scaler_; }
  ObservationScaler& scaler() { return scaler_; }

  int actor_input_dim() const;
  int actor_output_dim() const;
  int critic_input_dim() const;
  /// Users whose actions learner g emits.
  std::vector<int> controlled_users(int g) const;

  /// Training state of learner g.
  std::vector<double> learner_state(std::span<const Observation> obs, int g) const;

  /// Joint action. `fixed_eta` supplies eta for alpha-only schemes. With
  /// `sigma > 0` Gaussian noise is added and the result clamped to [0, 1].
  std::vector<Action> act(std::span<const Observation> obs, std::span<const double> fixed_eta,
                          double sigma, Rng& rng) const;

  /// y = reward_scale * r + discount * Q'_g(s', mu'(o')).
  Eigen::VectorXd critic_target(int g, const Batch& batch) const;
  /// One Adam step on critic g; returns the pre-update mean squared TD error.
  double update_critic(int g, const Batch& batch);
  /// One Adam ascent step on actor g; returns the pre-update batch-mean Q.
  double update_actor(int g, const Batch& batch);
  /// Actor-parameter gradient of -mean Q (what update_actor descends).
  MlpGradients actor_gradient(int g, const Batch& batch, double* mean_q = nullptr) const;
  void soft_update_targets(int g);

  /// Stores the transition for every learner and, once buffers hold a full
  /// batch, runs critic, actor and target updates for each learner in turn.
  void observe_step(std::span<const Observation> obs, std::span<const Action> actions,
                    const StepResult& result, Rng& rng);

  /// Runs one exploratory training episode.
  EpisodeMetrics train_episode(Environment& env, int episode, Rng& env_rng, Rng& agent_rng);

  /// Full training loop; `on_episode` sees every record as it is produced.
  std::vector<EpisodeMetrics> train(Environment& env,
                                    const std::function<void(const EpisodeMetrics&)>& on_episode = {});

  /// Actions with exploration off. Per-user learners see only their own
  /// observation.
  std::vector<Action> policy_actions(std::span<const Observation> obs,
                                     std::span<const double> fixed_eta) const;

  /// Per-episode eta for alpha-only schemes (empty otherwise).
  std::vector<double> fixed_eta_for(const Environment& env) const;

  nlohmann::json to_json() const;
  static ActorCriticTrainer from_json(const nlohmann::json& j, const EnvConfig& env_cfg,
                                      const TrainConfig& cfg);

 private:
  Eigen::MatrixXd critic_input(const Eigen::MatrixXd& scaled_states, const Eigen::MatrixXd& actions) const;
  /// Row offset of user j's observation inside learner g's state.
  int obs_offset(int g, int j) const;
  /// Writes learner j's actor outputs into the joint-action rows it controls.
  void write_actions(int j, const Eigen::MatrixXd& out, Eigen::MatrixXd& actions) const;
  /// Indices (within the joint action) of the components learner g outputs.
  std::vector<int> action_rows(int g) const;
  Eigen::MatrixXd actor_inputs(int g, int j, const Eigen::MatrixXd& scaled_states) const;

  Scheme scheme_;
  int num_users_;
  TrainConfig cfg_;
  ObservationScaler scaler_;
  std::vector<AgentNets> agents_;
  std::vector<ReplayBuffer> buffers_;
};

enum class HeuristicKind { offloading_first, local_first };

const char* to_string(HeuristicKind h);

/// Heuristic joint action: alpha = 0 (offloading first) or 1 (local first),
/// eta from fractional power control.
std::vector<Action> heuristic_actions(HeuristicKind kind, const Environment& env);

}  // namespace jccra
