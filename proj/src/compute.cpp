#include "jccra/compute.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "jccra/error.hpp"

namespace jccra {

void ComputeConfig::validate() const {
  require(f_max_hz > 0.0 && f_cpu_hz > 0.0, "compute: clock speeds must be positive");
  require(cycles_per_bit > 0.0, "compute: cycles_per_bit must be positive");
  require(switched_capacitance > 0.0, "compute: switched capacitance must be positive");
  require(deadline_s > 0.0 && step_s > 0.0, "compute: deadline and step must be positive");
  require(deadline_s <= step_s, "compute: deadline must not exceed the step duration");
  require(task_min_bits > 0.0 && task_min_bits <= task_max_bits,
          "compute: require 0 < task_min <= task_max");
}

double StepOutcome::total_energy() const {
  double e = 0.0;
  for (const auto& u : users) e += u.e_total;
  return e;
}

int StepOutcome::met_count() const {
  return static_cast<int>(
      std::count_if(users.begin(), users.end(), [](const UserOutcome& u) { return u.deadline_met; }));
}

TaskSplit split_task(double bits, double alpha, const ComputeConfig& cfg) {
  require(alpha >= 0.0 && alpha <= 1.0, "split_task: alpha must lie in [0, 1]");
  require(bits >= 0.0, "split_task: task size must be non-negative");
  const double f_local = alpha * cfg.f_max_hz;
  TaskSplit out;
  out.total_bits = bits;
  const double local = std::min(bits, cfg.deadline_s * f_local / cfg.cycles_per_bit);
  // Recovering local from the rounded remainder makes the two parts sum to
  // exactly `bits`; both subtractions are then exact.
  out.offload_bits = bits - local;
  out.local_bits = bits - out.offload_bits;
  return out;
}

LocalCost local_exec(const TaskSplit& task, double alpha, const ComputeConfig& cfg) {
  const double f_local = alpha * cfg.f_max_hz;
  LocalCost out;
  if (task.local_bits <= 0.0 || f_local <= 0.0) return out;
  const double cycles = task.local_bits * cfg.cycles_per_bit;
  out.time_s = std::min(cycles / f_local, cfg.deadline_s);
  out.energy_j = cfg.switched_capacitance * cycles * f_local * f_local;
  return out;
}

std::vector<double> edge_share(std::span<const double> offload_bits, const ComputeConfig& cfg) {
  std::vector<double> out(offload_bits.size(), 0.0);
  const double total = std::accumulate(offload_bits.begin(), offload_bits.end(), 0.0);
  if (total <= 0.0) return out;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = offload_bits[k] / total * cfg.f_cpu_hz;
  return out;
}

OffloadCost offload_exec(const TaskSplit& task, double rate_bps, double power_w,
                         double cpu_share_hz, const ComputeConfig& cfg) {
  OffloadCost out;
  if (task.offload_bits <= 0.0) return out;
  if (rate_bps <= 0.0) {
    out.transmit_s = std::numeric_limits<double>::infinity();
    out.energy_j = power_w * cfg.step_s;
  } else {
    out.transmit_s = task.offload_bits / rate_bps;
    out.energy_j = power_w * out.transmit_s;
  }
  out.compute_s = cpu_share_hz > 0.0 ? task.offload_bits * cfg.cycles_per_bit / cpu_share_hz
                                     : std::numeric_limits<double>::infinity();
  out.total_s = out.transmit_s + out.compute_s;
  return out;
}

UserOutcome combine(const LocalCost& local, const OffloadCost& offload, double rate_bps,
                    double deadline_s) {
  UserOutcome u;
  u.t_local = local.time_s;
  u.t_transmit = offload.transmit_s;
  u.t_edge = offload.compute_s;
  u.t_offload = offload.total_s;
  u.t_total = std::max(local.time_s, offload.total_s);
  u.e_local = local.energy_j;
  u.e_offload = offload.energy_j;
  u.e_total = local.energy_j + offload.energy_j;
  u.rate_bps = rate_bps;
  u.deadline_met = u.t_total <= deadline_s;
  return u;
}

double joint_reward(std::span<const UserOutcome> users) {
  double r = 0.0;
  for (const auto& u : users) r -= (u.deadline_met ? 1.0 : 10.0) * u.e_total;
  return r;
}

StepOutcome total_outcome(std::span<const double> task_bits, std::span<const double> alpha,
                          std::span<const double> rates_bps, std::span<const double> powers_w,
                          const ComputeConfig& cfg) {
  const std::size_t K = task_bits.size();
  require(alpha.size() == K && rates_bps.size() == K && powers_w.size() == K,
          "total_outcome: per-user inputs must have equal length");
  std::vector<TaskSplit> splits(K);
  std::vector<double> offloads(K);
  for (std::size_t k = 0; k < K; ++k) {
    splits[k] = split_task(task_bits[k], alpha[k], cfg);
    offloads[k] = splits[k].offload_bits;
  }
  const auto shares = edge_share(offloads, cfg);
  StepOutcome out;
  out.users.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto local = local_exec(splits[k], alpha[k], cfg);
    const auto off = offload_exec(splits[k], rates_bps[k], powers_w[k], shares[k], cfg);
    out.users[k] = combine(local, off, rates_bps[k], cfg.deadline_s);
  }
  out.reward = joint_reward(out.users);
  return out;
}

}  // namespace jccra
