#include "jccra/env.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

namespace jccra {

void EpisodeConfig::validate() const {
  require(steps >= 1, "episode: steps must be >= 1");
  require(discount >= 0.0 && discount <= 1.0, "episode: discount must lie in [0, 1]");
}

void EnvConfig::validate() const {
  channel.validate();
  compute.validate();
  episode.validate();
  require(cluster_size >= 1 && cluster_size <= channel.num_aps,
          "env: cluster_size must be in [1, num_aps]");
  require(p_max_w > 0.0, "env: p_max must be positive");
  require(fpc.p0_w > 0.0, "env: fpc p0 must be positive");
}

Environment::Environment(EnvConfig cfg)
    : cfg_(std::move(cfg)), pilots_((cfg_.validate(), cfg_.num_users())) {
  noise_w_ = noise_power(cfg_.channel);
}

void Environment::draw_tasks(Rng& rng) {
  std::uniform_real_distribution<double> size(cfg_.compute.task_min_bits, cfg_.compute.task_max_bits);
  tasks_.resize(num_users());
  for (auto& t : tasks_) t = size(rng);
}

std::vector<Observation> Environment::make_observations() const {
  std::vector<Observation> obs(num_users());
  for (int k = 0; k < num_users(); ++k) {
    obs[k] = {tasks_[k], cfg_.compute.deadline_s, prev_rate_[k]};
  }
  return obs;
}

std::vector<double> Environment::rates_for(std::span<const double> powers_w) const {
  const auto gammas = sinr_all(net_, clusters_, powers_w, noise_w_);
  std::vector<double> rates(gammas.size());
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    rates[k] = uplink_rate(gammas[k], cfg_.channel.bandwidth_hz);
  }
  return rates;
}

std::vector<Observation> Environment::reset(Rng& rng) {
  if (!placed_ || cfg_.episode.redraw_placement) {
    net_ = realize_network(cfg_.channel, rng);
    clusters_ = form_clusters(net_.beta, cfg_.cluster_size);
    placed_ = true;
  } else {
    redraw_small_scale(net_, cfg_.channel, pilots_, rng);
  }
  t_ = 0;
  draw_tasks(rng);
  const std::vector<double> full_power(num_users(), cfg_.p_max_w);
  prev_rate_ = rates_for(full_power);
  obs_ = make_observations();
  return obs_;
}

StepResult Environment::step(std::span<const Action> actions, Rng& rng) {
  const int K = num_users();
  require(static_cast<int>(actions.size()) == K, "step: exactly one action per user required");
  require(t_ < cfg_.episode.steps, "step: episode is over, call reset()");

  std::vector<double> alpha(K), powers(K);
  for (int k = 0; k < K; ++k) {
    double a = actions[k].alpha;
    double e = actions[k].eta;
    if (strict_) {
      require(a >= 0.0 && a <= 1.0 && e >= 0.0 && e <= 1.0, "step: action outside [0, 1]");
    }
    require(std::isfinite(a) && std::isfinite(e), "step: non-finite action");
    alpha[k] = std::clamp(a, 0.0, 1.0);
    powers[k] = std::clamp(e, 0.0, 1.0) * cfg_.p_max_w;
  }

  const auto rates = rates_for(powers);
  StepResult res;
  res.outcome = total_outcome(tasks_, alpha, rates, powers, cfg_.compute);
  res.rewards.assign(K, res.outcome.reward);
  prev_rate_ = rates;

  ++t_;
  res.done = t_ >= cfg_.episode.steps;
  if (t_ % cfg_.channel.coherence_steps == 0) redraw_small_scale(net_, cfg_.channel, pilots_, rng);
  draw_tasks(rng);
  obs_ = make_observations();
  res.next = obs_;
  return res;
}

std::vector<double> Environment::fpc_eta() const {
  std::vector<double> out(num_users());
  for (int k = 0; k < num_users(); ++k) {
    const double lambda = cluster_gain(net_.beta, clusters_, k);
    out[k] = fpc_power(lambda, cfg_.fpc, cfg_.p_max_w) / cfg_.p_max_w;
  }
  return out;
}

std::vector<double> full_state(std::span<const Observation> obs, int k) {
  const int K = static_cast<int>(obs.size());
  require(k >= 0 && k < K, "full_state: agent index out of range");
  std::vector<double> s;
  s.reserve(Observation::kDim * K);
  auto append = [&](const Observation& o) {
    for (double v : o.values()) s.push_back(v);
  };
  append(obs[k]);
  for (int j = 0; j < K; ++j) {
    if (j != k) append(obs[j]);
  }
  return s;
}

double success_rate(std::span<const StepOutcome> outcomes) {
  require(!outcomes.empty(), "success_rate: need at least one outcome");
  std::size_t met = 0;
  std::size_t total = 0;
  for (const auto& o : outcomes) {
    met += static_cast<std::size_t>(o.met_count());
    total += o.users.size();
  }
  require(total > 0, "success_rate: outcomes carry no users");
  return static_cast<double>(met) / static_cast<double>(total);
}

namespace {

nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

void TraceWriter::write(int episode, int step, std::span<const Observation> obs,
                        std::span<const Action> actions, const StepOutcome& outcome) {
  nlohmann::json rec;
  rec["episode"] = episode;
  rec["step"] = step;
  rec["reward"] = outcome.reward;
  auto& o = rec["observations"] = nlohmann::json::array();
  for (const auto& ob : obs) o.push_back({ob.task_bits, ob.deadline_s, ob.prev_rate_bps});
  auto& a = rec["actions"] = nlohmann::json::array();
  for (const auto& ac : actions) a.push_back({ac.alpha, ac.eta});
  auto& u = rec["users"] = nlohmann::json::array();
  for (const auto& us : outcome.users) {
    u.push_back({{"t_local", finite_or_null(us.t_local)},
                 {"t_transmit", finite_or_null(us.t_transmit)},
                 {"t_edge", finite_or_null(us.t_edge)},
                 {"t_offload", finite_or_null(us.t_offload)},
                 {"t_total", finite_or_null(us.t_total)},
                 {"e_local", us.e_local},
                 {"e_offload", us.e_offload},
                 {"e_total", us.e_total},
                 {"rate_bps", us.rate_bps},
                 {"deadline_met", us.deadline_met}});
  }
  out_ << rec.dump() << '\n';
  out_.flush();
}

}  // namespace jccra
