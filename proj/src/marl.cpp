#include "jccra/marl.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

namespace jccra {

namespace {

constexpr int kAgentsVersion = 1;
constexpr int kObs = Observation::kDim;
constexpr int kAct = Action::kDim;

// Saturated sigmoids and Adam's second moments can drift into subnormal range,
// which is slow on x86. Training episodes flush them to zero; evaluation runs
// with the default floating-point state.
class FlushSubnormals {
 public:
#if defined(__SSE2__)
  FlushSubnormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }
  ~FlushSubnormals() { _mm_setcsr(saved_); }

 private:
  unsigned saved_;
#endif
};

Rng derived_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

}  // namespace

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::maddpg:
      return "maddpg";
    case Scheme::ddpg:
      return "ddpg";
    case Scheme::maddpg_cra_fpc:
      return "maddpg_cra_fpc";
    case Scheme::maddpg_cra_max:
      return "maddpg_cra_max";
  }
  return "maddpg";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "maddpg") return Scheme::maddpg;
  if (name == "ddpg") return Scheme::ddpg;
  if (name == "maddpg_cra_fpc") return Scheme::maddpg_cra_fpc;
  if (name == "maddpg_cra_max") return Scheme::maddpg_cra_max;
  throw InvalidInput("unknown scheme '" + name + "'");
}

bool is_centralized(Scheme s) { return s == Scheme::ddpg; }

bool learns_power(Scheme s) { return s == Scheme::maddpg || s == Scheme::ddpg; }

void TrainConfig::validate() const {
  require(discount >= 0.0 && discount <= 1.0, "train: discount must lie in [0, 1]");
  require(tau > 0.0 && tau <= 1.0, "train: tau must lie in (0, 1]");
  require(critic_lr > 0.0 && actor_lr > 0.0, "train: learning rates must be positive");
  require(batch_size >= 1 && batch_size <= buffer_capacity,
          "train: batch size must be in [1, buffer capacity]");
  require(episodes >= 1, "train: episodes must be >= 1");
  require(noise.sigma_start >= 0.0 && noise.sigma_end >= 0.0, "train: noise sigmas must be >= 0");
  require(reward_scale > 0.0, "train: reward_scale must be positive");
  require(max_grad_norm >= 0.0, "train: max_grad_norm must be >= 0");
  for (int h : hidden_dims) require(h >= 1, "train: hidden dims must be >= 1");
}

double TrainConfig::noise_sigma(int episode) const {
  if (episodes <= 1 || noise.sigma_start <= 0.0 || noise.sigma_end <= 0.0) return noise.sigma_start;
  const double frac = std::clamp(static_cast<double>(episode) / (episodes - 1), 0.0, 1.0);
  return noise.sigma_start * std::pow(noise.sigma_end / noise.sigma_start, frac);
}

ObservationScaler ObservationScaler::for_env(const EnvConfig& cfg) {
  ObservationScaler s;
  s.task_scale = cfg.compute.task_max_bits;
  s.deadline_scale = cfg.compute.step_s;
  s.bandwidth_hz = cfg.channel.bandwidth_hz;
  return s;
}

double ObservationScaler::rate_feature(double rate_bps) const {
  const double sinr = std::expm1(rate_bps / bandwidth_hz * std::numbers::ln2);
  return std::log10(std::max(sinr, 1e-10)) / 5.0;
}

void ObservationScaler::apply(Eigen::MatrixXd& states) const {
  for (Eigen::Index r = 0; r < states.rows(); r += kObs) {
    states.row(r) /= task_scale;
    states.row(r + 1) /= deadline_scale;
    states.row(r + 2) = states.row(r + 2).unaryExpr([this](double v) { return rate_feature(v); });
  }
}

Eigen::Vector3d ObservationScaler::scaled(const Observation& o) const {
  return {o.task_bits / task_scale, o.deadline_s / deadline_scale, rate_feature(o.prev_rate_bps)};
}

ReplayBuffer::ReplayBuffer(int capacity, int state_dim, int action_dim)
    : capacity_(capacity),
      states_(state_dim, capacity),
      actions_(action_dim, capacity),
      rewards_(capacity),
      next_states_(state_dim, capacity) {
  require(capacity >= 1, "ReplayBuffer: capacity must be >= 1");
}

void ReplayBuffer::push(std::span<const double> state, std::span<const double> action, double reward,
                        std::span<const double> next_state) {
  require(static_cast<Eigen::Index>(state.size()) == states_.rows() &&
              static_cast<Eigen::Index>(next_state.size()) == states_.rows() &&
              static_cast<Eigen::Index>(action.size()) == actions_.rows(),
          "ReplayBuffer::push: transition dimensions do not match");
  const int slot = (head_ + size_) % capacity_;
  for (std::size_t i = 0; i < state.size(); ++i) {
    states_(static_cast<Eigen::Index>(i), slot) = state[i];
    next_states_(static_cast<Eigen::Index>(i), slot) = next_state[i];
  }
  for (std::size_t i = 0; i < action.size(); ++i) actions_(static_cast<Eigen::Index>(i), slot) = action[i];
  rewards_(slot) = reward;
  if (size_ < capacity_) {
    ++size_;
  } else {
    head_ = (head_ + 1) % capacity_;
  }
}

int ReplayBuffer::physical(int logical) const {
  require(logical >= 0 && logical < size_, "ReplayBuffer: index out of range");
  return (head_ + logical) % capacity_;
}

Transition ReplayBuffer::at(int index) const {
  const int p = physical(index);
  Transition t;
  t.state.assign(states_.col(p).data(), states_.col(p).data() + states_.rows());
  t.action.assign(actions_.col(p).data(), actions_.col(p).data() + actions_.rows());
  t.reward = rewards_(p);
  t.next_state.assign(next_states_.col(p).data(), next_states_.col(p).data() + next_states_.rows());
  return t;
}

std::vector<int> ReplayBuffer::sample_indices(int count, Rng& rng) const {
  require(count >= 1 && count <= size_, "ReplayBuffer::sample: batch larger than buffer");
  // Floyd's subset sampling.
  std::vector<char> taken(static_cast<std::size_t>(size_), 0);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int j = size_ - count; j < size_; ++j) {
    std::uniform_int_distribution<int> pick(0, j);
    int t = pick(rng);
    if (taken[static_cast<std::size_t>(t)]) t = j;
    taken[static_cast<std::size_t>(t)] = 1;
    out.push_back(t);
  }
  return out;
}

Batch ReplayBuffer::gather(std::span<const int> indices) const {
  const auto B = static_cast<Eigen::Index>(indices.size());
  Batch b;
  b.states.resize(states_.rows(), B);
  b.actions.resize(actions_.rows(), B);
  b.rewards.resize(B);
  b.next_states.resize(states_.rows(), B);
  for (Eigen::Index i = 0; i < B; ++i) {
    const int p = physical(indices[static_cast<std::size_t>(i)]);
    b.states.col(i) = states_.col(p);
    b.actions.col(i) = actions_.col(p);
    b.rewards(i) = rewards_(p);
    b.next_states.col(i) = next_states_.col(p);
  }
  return b;
}

Batch ReplayBuffer::sample(int count, Rng& rng) const {
  const auto idx = sample_indices(count, rng);
  return gather(idx);
}

nlohmann::json agent_to_json(const AgentNets& a) {
  return {{"actor", mlp_to_json(a.actor)},
          {"critic", mlp_to_json(a.critic)},
          {"actor_target", mlp_to_json(a.actor_target)},
          {"critic_target", mlp_to_json(a.critic_target)},
          {"actor_opt", a.actor_opt.to_json()},
          {"critic_opt", a.critic_opt.to_json()}};
}

AgentNets agent_from_json(const nlohmann::json& j) {
  AgentNets a;
  a.actor = mlp_from_json(j.at("actor"));
  a.critic = mlp_from_json(j.at("critic"));
  a.actor_target = mlp_from_json(j.at("actor_target"));
  a.critic_target = mlp_from_json(j.at("critic_target"));
  a.actor_opt = Adam::from_json(j.at("actor_opt"), a.actor);
  a.critic_opt = Adam::from_json(j.at("critic_opt"), a.critic);
  return a;
}

Action DecentralizedActor::act(const Observation& own, double fixed_eta) const {
  const Eigen::VectorXd out = actor_.forward(Eigen::VectorXd(scaler_.scaled(own)));
  Action a;
  a.alpha = std::clamp(out(0), 0.0, 1.0);
  a.eta = learns_power_ ? std::clamp(out(1), 0.0, 1.0) : fixed_eta;
  return a;
}

nlohmann::json metrics_to_json(const EpisodeMetrics& m) {
  return {{"episode", m.episode},
          {"total_reward", m.total_reward},
          {"success_rate", m.success_rate},
          {"mean_energy_j", m.mean_energy_j},
          {"mean_delay_s", m.mean_delay_s}};
}

ActorCriticTrainer::ActorCriticTrainer(Scheme scheme, const EnvConfig& env_cfg, TrainConfig cfg)
    : scheme_(scheme), num_users_(env_cfg.num_users()), cfg_(std::move(cfg)) {
  cfg_.validate();
  require(num_users_ >= 1, "trainer: need at least one user");
  scaler_ = ObservationScaler::for_env(env_cfg);

  Rng init = derived_rng(cfg_.seed, 0);
  const int learners = is_centralized(scheme_) ? 1 : num_users_;
  MlpSpec actor_spec{actor_input_dim(), cfg_.hidden_dims, actor_output_dim(), Activation::relu,
                     Activation::sigmoid};
  MlpSpec critic_spec{critic_input_dim(), cfg_.hidden_dims, 1, Activation::relu, Activation::identity};
  AdamConfig actor_adam{cfg_.actor_lr, 0.9, 0.999, 1e-8, cfg_.max_grad_norm};
  AdamConfig critic_adam{cfg_.critic_lr, 0.9, 0.999, 1e-8, cfg_.max_grad_norm};
  agents_.reserve(static_cast<std::size_t>(learners));
  for (int g = 0; g < learners; ++g) {
    AgentNets a;
    a.actor = Mlp(actor_spec, init, cfg_.actor_final_layer_scale);
    a.critic = Mlp(critic_spec, init);
    a.actor_target = a.actor;
    a.critic_target = a.critic;
    a.actor_opt = Adam(a.actor, actor_adam);
    a.critic_opt = Adam(a.critic, critic_adam);
    agents_.push_back(std::move(a));
    buffers_.emplace_back(cfg_.buffer_capacity, kObs * num_users_, kAct * num_users_);
  }
}

int ActorCriticTrainer::actor_input_dim() const {
  return is_centralized(scheme_) ? kObs * num_users_ : kObs;
}

int ActorCriticTrainer::actor_output_dim() const {
  const int per_user = learns_power(scheme_) ? kAct : 1;
  return is_centralized(scheme_) ? per_user * num_users_ : per_user;
}

int ActorCriticTrainer::critic_input_dim() const { return (kObs + kAct) * num_users_; }

std::vector<int> ActorCriticTrainer::controlled_users(int g) const {
  if (!is_centralized(scheme_)) return {g};
  std::vector<int> all(static_cast<std::size_t>(num_users_));
  for (int k = 0; k < num_users_; ++k) all[static_cast<std::size_t>(k)] = k;
  return all;
}

std::vector<int> ActorCriticTrainer::action_rows(int g) const {
  std::vector<int> rows;
  for (int u : controlled_users(g)) {
    rows.push_back(kAct * u);
    if (learns_power(scheme_)) rows.push_back(kAct * u + 1);
  }
  return rows;
}

int ActorCriticTrainer::obs_offset(int g, int j) const {
  if (is_centralized(scheme_)) return kObs * j;
  if (j == g) return 0;
  return kObs * (j < g ? j + 1 : j);
}

std::vector<double> ActorCriticTrainer::learner_state(std::span<const Observation> obs, int g) const {
  return full_state(obs, is_centralized(scheme_) ? 0 : g);
}

Eigen::MatrixXd ActorCriticTrainer::actor_inputs(int g, int j, const Eigen::MatrixXd& scaled_states) const {
  if (is_centralized(scheme_)) return scaled_states;
  return scaled_states.middleRows(obs_offset(g, j), kObs);
}

void ActorCriticTrainer::write_actions(int j, const Eigen::MatrixXd& out, Eigen::MatrixXd& actions) const {
  const auto rows = action_rows(j);
  for (std::size_t r = 0; r < rows.size(); ++r) actions.row(rows[r]) = out.row(static_cast<Eigen::Index>(r));
}

Eigen::MatrixXd ActorCriticTrainer::critic_input(const Eigen::MatrixXd& scaled_states,
                                                 const Eigen::MatrixXd& actions) const {
  Eigen::MatrixXd x(scaled_states.rows() + actions.rows(), scaled_states.cols());
  x << scaled_states, actions;
  return x;
}

std::vector<Action> ActorCriticTrainer::act(std::span<const Observation> obs,
                                            std::span<const double> fixed_eta, double sigma,
                                            Rng& rng) const {
  require(static_cast<int>(obs.size()) == num_users_, "act: one observation per user required");
  if (!learns_power(scheme_)) {
    require(static_cast<int>(fixed_eta.size()) == num_users_, "act: fixed eta required for alpha-only schemes");
  }
  std::vector<double> joint(static_cast<std::size_t>(kAct * num_users_), 0.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int g = 0; g < num_learners(); ++g) {
    Eigen::VectorXd input(actor_input_dim());
    if (is_centralized(scheme_)) {
      for (int k = 0; k < num_users_; ++k) input.segment<kObs>(kObs * k) = scaler_.scaled(obs[k]);
    } else {
      input = scaler_.scaled(obs[g]);
    }
    const Eigen::VectorXd out = agents_[g].actor.forward(input);
    const auto rows = action_rows(g);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      double v = out(static_cast<Eigen::Index>(r));
      if (sigma > 0.0) v += sigma * noise(rng);
      joint[static_cast<std::size_t>(rows[r])] = std::clamp(v, 0.0, 1.0);
    }
  }
  std::vector<Action> actions(static_cast<std::size_t>(num_users_));
  for (int k = 0; k < num_users_; ++k) {
    actions[k].alpha = joint[kAct * k];
    actions[k].eta = learns_power(scheme_) ? joint[kAct * k + 1] : fixed_eta[k];
  }
  return actions;
}

std::vector<Action> ActorCriticTrainer::policy_actions(std::span<const Observation> obs,
                                                       std::span<const double> fixed_eta) const {
  if (is_centralized(scheme_)) {
    Rng unused(0);
    return act(obs, fixed_eta, 0.0, unused);
  }
  require(static_cast<int>(obs.size()) == num_users_, "policy_actions: one observation per user required");
  std::vector<Action> out;
  out.reserve(obs.size());
  for (int k = 0; k < num_users_; ++k) {
    const DecentralizedActor actor(agents_[k].actor, scaler_, learns_power(scheme_));
    out.push_back(actor.act(obs[k], fixed_eta.empty() ? 1.0 : fixed_eta[k]));
  }
  return out;
}

std::vector<double> ActorCriticTrainer::fixed_eta_for(const Environment& env) const {
  switch (scheme_) {
    case Scheme::maddpg_cra_fpc:
      return env.fpc_eta();
    case Scheme::maddpg_cra_max:
      return std::vector<double>(static_cast<std::size_t>(num_users_), 1.0);
    default:
      return {};
  }
}

Eigen::VectorXd ActorCriticTrainer::critic_target(int g, const Batch& batch) const {
  Eigen::MatrixXd next = batch.next_states;
  scaler_.apply(next);
  // Alpha-only schemes keep the stored (episode-constant) eta.
  Eigen::MatrixXd next_actions = batch.actions;
  for (int j = 0; j < num_learners(); ++j) {
    write_actions(j, agents_[j].actor_target.forward(actor_inputs(g, j, next)), next_actions);
  }
  const Eigen::MatrixXd q_next = agents_[g].critic_target.forward(critic_input(next, next_actions));
  return cfg_.reward_scale * batch.rewards + cfg_.discount * q_next.row(0).transpose();
}

double ActorCriticTrainer::update_critic(int g, const Batch& batch) {
  const Eigen::VectorXd y = critic_target(g, batch);
  Eigen::MatrixXd states = batch.states;
  scaler_.apply(states);
  auto& agent = agents_[g];
  ForwardCache cache;
  const Eigen::MatrixXd q = agent.critic.forward(critic_input(states, batch.actions), cache);
  const Eigen::VectorXd residual = q.row(0).transpose() - y;
  const double B = static_cast<double>(batch.size());
  const double loss = residual.squaredNorm() / B;
  if (!std::isfinite(loss)) throw TrainingDiverged("critic loss is not finite");
  const Eigen::MatrixXd grad = (2.0 / B) * residual.transpose();
  agent.critic_opt.step(agent.critic, agent.critic.backward(cache, grad));
  return loss;
}

MlpGradients ActorCriticTrainer::actor_gradient(int g, const Batch& batch, double* mean_q) const {
  Eigen::MatrixXd states = batch.states;
  scaler_.apply(states);
  Eigen::MatrixXd actions = batch.actions;
  ForwardCache own_cache;
  for (int j = 0; j < num_learners(); ++j) {
    const Eigen::MatrixXd in = actor_inputs(g, j, states);
    if (j == g) {
      write_actions(j, agents_[j].actor.forward(in, own_cache), actions);
    } else {
      write_actions(j, agents_[j].actor.forward(in), actions);
    }
  }
  ForwardCache critic_cache;
  const Eigen::MatrixXd q = agents_[g].critic.forward(critic_input(states, actions), critic_cache);
  if (mean_q != nullptr) *mean_q = q.mean();
  const double B = static_cast<double>(batch.size());
  // Descend on -mean(Q).
  const Eigen::MatrixXd dq = Eigen::MatrixXd::Constant(1, batch.size(), -1.0 / B);
  const Eigen::MatrixXd d_input = agents_[g].critic.input_gradient(critic_cache, dq);
  const auto rows = action_rows(g);
  Eigen::MatrixXd d_out(static_cast<Eigen::Index>(rows.size()), batch.size());
  const Eigen::Index action_base = states.rows();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    d_out.row(static_cast<Eigen::Index>(r)) = d_input.row(action_base + rows[r]);
  }
  return agents_[g].actor.backward(own_cache, d_out);
}

double ActorCriticTrainer::update_actor(int g, const Batch& batch) {
  double mean_q = 0.0;
  auto grads = actor_gradient(g, batch, &mean_q);
  if (!std::isfinite(mean_q)) throw TrainingDiverged("actor objective is not finite");
  agents_[g].actor_opt.step(agents_[g].actor, std::move(grads));
  return mean_q;
}

void ActorCriticTrainer::soft_update_targets(int g) {
  soft_update(agents_[g].actor_target, agents_[g].actor, cfg_.tau);
  soft_update(agents_[g].critic_target, agents_[g].critic, cfg_.tau);
}

void ActorCriticTrainer::observe_step(std::span<const Observation> obs, std::span<const Action> actions,
                                      const StepResult& result, Rng& rng) {
  std::vector<double> joint;
  joint.reserve(static_cast<std::size_t>(kAct * num_users_));
  for (const auto& a : actions) {
    joint.push_back(a.alpha);
    joint.push_back(a.eta);
  }
  for (int g = 0; g < num_learners(); ++g) {
    buffers_[g].push(learner_state(obs, g), joint, result.rewards[controlled_users(g).front()],
                     learner_state(result.next, g));
  }
  if (buffers_.front().size() < cfg_.batch_size) return;
  for (int g = 0; g < num_learners(); ++g) {
    const Batch batch = buffers_[g].sample(cfg_.batch_size, rng);
    update_critic(g, batch);
    update_actor(g, batch);
    soft_update_targets(g);
  }
}

EpisodeMetrics ActorCriticTrainer::train_episode(Environment& env, int episode, Rng& env_rng,
                                                 Rng& agent_rng) {
  require(env.num_users() == num_users_, "train_episode: environment user count mismatch");
  const FlushSubnormals ftz;
  const auto start = std::chrono::steady_clock::now();
  const double sigma = cfg_.noise_sigma(episode);
  auto obs = env.reset(env_rng);
  const auto fixed_eta = fixed_eta_for(env);

  EpisodeMetrics m;
  m.episode = episode;
  double energy = 0.0;
  double delay = 0.0;
  long long delay_count = 0;
  long long met = 0;
  long long total = 0;
  bool done = false;
  while (!done) {
    const auto actions = act(obs, fixed_eta, sigma, agent_rng);
    const StepResult res = env.step(actions, env_rng);
    observe_step(obs, actions, res, agent_rng);
    m.total_reward += res.outcome.reward;
    for (const auto& u : res.outcome.users) {
      energy += u.e_total;
      met += u.deadline_met ? 1 : 0;
      ++total;
      if (std::isfinite(u.t_total)) {
        delay += u.t_total;
        ++delay_count;
      }
    }
    obs = res.next;
    done = res.done;
  }
  if (!std::isfinite(m.total_reward)) {
    throw TrainingDiverged("non-finite episode reward in episode " + std::to_string(episode));
  }
  m.success_rate = static_cast<double>(met) / static_cast<double>(total);
  m.mean_energy_j = energy / static_cast<double>(total);
  m.mean_delay_s = delay_count > 0 ? delay / static_cast<double>(delay_count)
                                   : std::numeric_limits<double>::infinity();
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return m;
}

std::vector<EpisodeMetrics> ActorCriticTrainer::train(
    Environment& env, const std::function<void(const EpisodeMetrics&)>& on_episode) {
  Rng env_rng = derived_rng(cfg_.seed, 1);
  Rng agent_rng = derived_rng(cfg_.seed, 2);
  std::vector<EpisodeMetrics> history;
  history.reserve(static_cast<std::size_t>(cfg_.episodes));
  for (int e = 0; e < cfg_.episodes; ++e) {
    try {
      history.push_back(train_episode(env, e, env_rng, agent_rng));
    } catch (const TrainingDiverged& err) {
      throw TrainingDiverged("episode " + std::to_string(e) + ": " + err.what());
    }
    if (on_episode) on_episode(history.back());
  }
  return history;
}

nlohmann::json ActorCriticTrainer::to_json() const {
  nlohmann::json agents = nlohmann::json::array();
  for (const auto& a : agents_) agents.push_back(agent_to_json(a));
  return {{"format", "jccra-agents"},
          {"version", kAgentsVersion},
          {"scheme", to_string(scheme_)},
          {"num_users", num_users_},
          {"scaler",
           {{"task_scale", scaler_.task_scale},
            {"deadline_scale", scaler_.deadline_scale},
            {"bandwidth_hz", scaler_.bandwidth_hz}}},
          {"agents", agents}};
}

ActorCriticTrainer ActorCriticTrainer::from_json(const nlohmann::json& j, const EnvConfig& env_cfg,
                                                 const TrainConfig& cfg) {
  require(j.value("format", "") == "jccra-agents", "checkpoint: unexpected format tag");
  require(j.value("version", 0) == kAgentsVersion, "checkpoint: unsupported version");
  const Scheme scheme = scheme_from_string(j.at("scheme").get<std::string>());
  require(j.at("num_users").get<int>() == env_cfg.num_users(),
          "checkpoint: user count does not match configuration");
  ActorCriticTrainer t(scheme, env_cfg, cfg);
  const auto& agents = j.at("agents");
  require(static_cast<int>(agents.size()) == t.num_learners(), "checkpoint: learner count mismatch");
  for (int g = 0; g < t.num_learners(); ++g) {
    AgentNets a = agent_from_json(agents[static_cast<std::size_t>(g)]);
    require(a.actor.spec() == t.agents_[g].actor.spec() && a.critic.spec() == t.agents_[g].critic.spec(),
            "checkpoint: network dimensions do not match configuration");
    t.agents_[g] = std::move(a);
  }
  const auto& s = j.at("scaler");
  t.scaler_.task_scale = s.at("task_scale").get<double>();
  t.scaler_.deadline_scale = s.at("deadline_scale").get<double>();
  t.scaler_.bandwidth_hz = s.at("bandwidth_hz").get<double>();
  return t;
}

const char* to_string(HeuristicKind h) {
  return h == HeuristicKind::offloading_first ? "offloading_first_fpc" : "local_first_fpc";
}

std::vector<Action> heuristic_actions(HeuristicKind kind, const Environment& env) {
  const auto eta = env.fpc_eta();
  const double alpha = kind == HeuristicKind::local_first ? 1.0 : 0.0;
  std::vector<Action> out(eta.size());
  for (std::size_t k = 0; k < eta.size(); ++k) out[k] = {alpha, eta[k]};
  return out;
}

}  // namespace jccra
