#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "jccra/access.hpp"
#include "jccra/channel.hpp"
#include "jccra/compute.hpp"

namespace jccra {

struct EpisodeConfig {
  int steps = 100;
  double discount = 0.99;
  bool redraw_placement = true;

  void validate() const;
};

struct EnvConfig {
  ChannelConfig channel;
  ComputeConfig compute;
  EpisodeConfig episode;
  int cluster_size = 30;
  double p_max_w = 0.1;
  FpcParams fpc;

  int num_users() const { return channel.num_users; }
  void validate() const;
};

/// What agent k sees at the start of a step: its task, its deadline and the
/// rate it achieved on the previous step.
struct Observation {
  double task_bits = 0.0;
  double deadline_s = 0.0;
  double prev_rate_bps = 0.0;

  static constexpr int kDim = 3;
  std::array<double, kDim> values() const { return {task_bits, deadline_s, prev_rate_bps}; }
};

struct Action {
  double alpha = 0.0;
  double eta = 0.0;

  static constexpr int kDim = 2;
};

struct StepResult {
  std::vector<Observation> next;
  std::vector<double> rewards;
  StepOutcome outcome;
  bool done = false;
};

/// Multi-user decision environment. Each step draws one coherence block and
/// one task per user; actions set the local clock and the uplink power.
class Environment {
 public:
  explicit Environment(EnvConfig cfg);

  std::vector<Observation> reset(Rng& rng);
  StepResult step(std::span<const Action> actions, Rng& rng);

  /// Out-of-range actions are clamped by default; strict mode rejects them.
  void set_strict_actions(bool strict) { strict_ = strict; }
  bool strict_actions() const { return strict_; }

  const EnvConfig& config() const { return cfg_; }
  int num_users() const { return cfg_.num_users(); }
  int step_index() const { return t_; }
  const NetworkRealization& network() const { return net_; }
  const ClusterAssignment& clusters() const { return clusters_; }
  const std::vector<Observation>& observations() const { return obs_; }
  double noise_w() const { return noise_w_; }

  /// Fractional power control coefficient p_fpc / p_max per user.
  std::vector<double> fpc_eta() const;

  /// Rates every user would get under the given powers on the current block.
  std::vector<double> rates_for(std::span<const double> powers_w) const;

 private:
  void draw_tasks(Rng& rng);
  std::vector<Observation> make_observations() const;

  EnvConfig cfg_;
  PilotBook pilots_;
  double noise_w_ = 0.0;
  NetworkRealization net_;
  ClusterAssignment clusters_;
  bool placed_ = false;
  bool strict_ = false;
  int t_ = 0;
  std::vector<double> tasks_;
  std::vector<double> prev_rate_;
  std::vector<Observation> obs_;
};

/// Training state of agent k: o_k followed by the other agents' observations
/// in ascending index order.
std::vector<double> full_state(std::span<const Observation> obs, int k);

/// Fraction of (step, user) pairs that met the deadline.
double success_rate(std::span<const StepOutcome> outcomes);

/// Writes one JSON object per step (observations, actions, per-user outcome).
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out) : out_(out) {}
  void write(int episode, int step, std::span<const Observation> obs,
             std::span<const Action> actions, const StepOutcome& outcome);

 private:
  std::ostream& out_;
};

}  // namespace jccra
