#pragma once

#include <span>
#include <vector>

namespace jccra {

/// Local and edge processing parameters (Hz, cycles/bit, seconds, bits).
struct ComputeConfig {
  double f_max_hz = 1e9;
  double f_cpu_hz = 100e9;
  double cycles_per_bit = 500.0;
  double switched_capacitance = 1e-27;
  double deadline_s = 1e-3;
  double task_min_bits = 2500.0;
  double task_max_bits = 7500.0;
  double step_s = 1e-3;

  void validate() const;
};

struct TaskSplit {
  double total_bits = 0.0;
  double local_bits = 0.0;
  double offload_bits = 0.0;
};

struct LocalCost {
  double time_s = 0.0;
  double energy_j = 0.0;
};

struct OffloadCost {
  double transmit_s = 0.0;
  double compute_s = 0.0;
  double total_s = 0.0;
  double energy_j = 0.0;
};

struct UserOutcome {
  double t_local = 0.0;
  double t_transmit = 0.0;
  double t_edge = 0.0;
  double t_offload = 0.0;
  double t_total = 0.0;
  double e_local = 0.0;
  double e_offload = 0.0;
  double e_total = 0.0;
  double rate_bps = 0.0;
  bool deadline_met = false;
};

struct StepOutcome {
  std::vector<UserOutcome> users;
  double reward = 0.0;

  double total_energy() const;
  int met_count() const;
};

/// Bits processed locally at clock alpha * f_max within the deadline; the
/// rest is offloaded. Bits are real-valued.
TaskSplit split_task(double bits, double alpha, const ComputeConfig& cfg);

LocalCost local_exec(const TaskSplit& task, double alpha, const ComputeConfig& cfg);

/// Edge clock shares proportional to offloaded bits; all zero if nobody
/// offloads.
std::vector<double> edge_share(std::span<const double> offload_bits, const ComputeConfig& cfg);

/// Transmission plus edge execution. With rate 0 and bits left to send the
/// delay is +inf and the transmitter burns `power_w` for one full step.
OffloadCost offload_exec(const TaskSplit& task, double rate_bps, double power_w,
                         double cpu_share_hz, const ComputeConfig& cfg);

UserOutcome combine(const LocalCost& local, const OffloadCost& offload, double rate_bps,
                    double deadline_s);

/// Joint reward -sum_k xi_k E_k with xi_k = 1 on a met deadline, 10 otherwise.
double joint_reward(std::span<const UserOutcome> users);

/// Runs the full per-step pipeline for every user.
StepOutcome total_outcome(std::span<const double> task_bits, std::span<const double> alpha,
                          std::span<const double> rates_bps, std::span<const double> powers_w,
                          const ComputeConfig& cfg);

}  // namespace jccra
