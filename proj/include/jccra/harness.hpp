#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "jccra/env.hpp"
#include "jccra/marl.hpp"

namespace jccra {

enum class SweepAxis { none, cluster_fraction, num_users };

struct SweepConfig {
  SweepAxis axis = SweepAxis::none;
  std::vector<double> values;
};

struct EvalConfig {
  int episodes = 20;
  std::uint64_t seed = 1000;
};

/// Everything needed to reproduce one run. `scheme` names either a learner
/// (maddpg, ddpg, maddpg_cra_fpc, maddpg_cra_max) or a heuristic
/// (offloading_first_fpc, local_first_fpc).
struct ExperimentConfig {
  std::string scenario = "desk";
  std::uint64_t seed = 1;
  std::string output_dir = "runs/desk";
  std::string scheme = "maddpg";
  int checkpoint_every = 100;
  EnvConfig env;
  TrainConfig train;
  EvalConfig eval;
  SweepConfig sweep;

  /// M=25, K=4, N_k=8, W=2 MHz, f_cpu=40 GHz, 1500 episodes.
  static ExperimentConfig desk();
  /// Full-size network: M=100, K=10, N_k=0.3M, W=5 MHz, f_cpu=100 GHz.
  static ExperimentConfig full();
  /// Preset by scenario name ("desk" or "full").
  static ExperimentConfig preset(const std::string& name);

  void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Missing keys keep their defaults; unknown keys raise InvalidInput.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path);

bool is_heuristic_scheme(const std::string& scheme);
HeuristicKind heuristic_from_string(const std::string& scheme);

using PolicyFn = std::function<std::vector<Action>(const Environment&, std::span<const Observation>)>;

struct EvalReport {
  std::string scheme;
  int episodes = 0;
  int num_users = 0;
  double mean_energy_j = 0.0;  // per user per step
  double success_rate = 0.0;
  double mean_episode_reward = 0.0;
  double mean_delay_s = 0.0;  // over finite delays
  double p50_delay_s = 0.0;
  double p95_delay_s = 0.0;
  double max_delay_s = 0.0;
  long long infinite_delays = 0;
};

nlohmann::json report_to_json(const EvalReport& r);

/// Exploration-free rollouts on environment draws seeded by `seed`; every
/// policy evaluated with the same seed sees the same placements, tasks and
/// fades. Actions are validated strictly. Optional per-step JSON-lines trace.
EvalReport evaluate_policy(const std::string& name, const PolicyFn& policy, const EnvConfig& env_cfg,
                           int episodes, std::uint64_t seed, std::ostream* trace = nullptr);

EvalReport evaluate_heuristic(HeuristicKind kind, const EnvConfig& env_cfg, int episodes,
                              std::uint64_t seed, std::ostream* trace = nullptr);

EvalReport evaluate_trainer(const ActorCriticTrainer& trainer, const EnvConfig& env_cfg, int episodes,
                            std::uint64_t seed, std::ostream* trace = nullptr);

ActorCriticTrainer load_checkpoint(const std::filesystem::path& path, const ExperimentConfig& cfg);
void save_checkpoint(const ActorCriticTrainer& trainer, const std::filesystem::path& path);

struct TrainArtifacts {
  std::filesystem::path directory;
  std::filesystem::path final_checkpoint;
  std::filesystem::path metrics;
  std::vector<EpisodeMetrics> history;
};

/// Trains `cfg.scheme` and writes into cfg.output_dir:
///   config.json       normalised configuration snapshot
///   metrics.jsonl     one record per episode (deterministic)
///   timing.jsonl      wall-clock seconds per episode
///   reward_curve.csv, success_curve.csv
///   checkpoints/episode_NNNNN.json and checkpoints/final.json
TrainArtifacts run_train(const ExperimentConfig& cfg);

EvalReport run_eval(const std::filesystem::path& checkpoint, const ExperimentConfig& cfg, int episodes,
                    std::ostream* trace = nullptr);

struct SweepRow {
  double value = 0.0;
  int num_users = 0;
  int cluster_size = 0;
  EvalReport report;
  double reward_per_user = 0.0;
};

/// Cluster size for a fraction of the AP count (rounded, at least 1).
int cluster_size_for_fraction(double fraction, int num_aps);

/// One evaluation (after training, for learned schemes) per sweep value,
/// all with the run's seeds. Writes sweep.csv into cfg.output_dir.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

struct BaselineRow {
  std::string scheme;
  bool available = false;
  EvalReport report;
};

/// Fixed row order: maddpg, ddpg, offloading_first_fpc, local_first_fpc,
/// maddpg_cra_fpc, maddpg_cra_max. Learned rows need a checkpoint in
/// `checkpoints` (keyed by scheme name); otherwise they are unavailable.
std::vector<BaselineRow> baseline_table(const ExperimentConfig& cfg,
                                        const std::map<std::string, std::filesystem::path>& checkpoints);

std::string baseline_csv(const std::vector<BaselineRow>& rows);
std::string baseline_summary(const std::vector<BaselineRow>& rows);
std::string sweep_csv(SweepAxis axis, const std::vector<SweepRow>& rows);

const char* to_string(SweepAxis axis);

// Keeps freed heap pages mapped. Training churns through many small Eigen
// temporaries and the default trim policy turns that into syscalls.
void retain_heap();

}  // namespace jccra
