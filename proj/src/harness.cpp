#include "jccra/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace jccra {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Reads known keys out of a JSON object and rejects anything else.
class StrictObject {
 public:
  StrictObject(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    require(j_.is_object(), "config: '" + where_ + "' must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw InvalidInput("config: bad value for '" + where_ + "." + key + "': " + e.what());
    }
  }

  const json* child(const char* key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    return &j_.at(key);
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        throw InvalidInput("config: unknown key '" + where_ + "." + item.key() + "'");
      }
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

SweepAxis axis_from_string(const std::string& s) {
  if (s == "none") return SweepAxis::none;
  if (s == "cluster_fraction") return SweepAxis::cluster_fraction;
  if (s == "num_users") return SweepAxis::num_users;
  throw InvalidInput("config: unknown sweep axis '" + s + "'");
}

struct DelayStats {
  std::vector<double> finite;
  long long infinite = 0;
};

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - w) + v[hi] * w;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

Rng eval_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 7u};
  return Rng(seq);
}

}  // namespace

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::none:
      return "none";
    case SweepAxis::cluster_fraction:
      return "cluster_fraction";
    case SweepAxis::num_users:
      return "num_users";
  }
  return "none";
}

ExperimentConfig ExperimentConfig::desk() {
  ExperimentConfig c;
  c.scenario = "desk";
  c.env.channel.num_aps = 25;
  c.env.channel.num_users = 4;
  c.env.channel.bandwidth_hz = 2e6;
  c.env.compute.f_cpu_hz = 40e9;
  c.env.cluster_size = 8;
  c.train.episodes = 1500;
  return c;
}

ExperimentConfig ExperimentConfig::full() {
  ExperimentConfig c;
  c.scenario = "full";
  c.output_dir = "runs/full";
  c.env.channel.num_aps = 100;
  c.env.channel.num_users = 10;
  c.env.cluster_size = 30;
  return c;
}

ExperimentConfig ExperimentConfig::preset(const std::string& name) {
  if (name == "desk") return desk();
  if (name == "full") return full();
  throw InvalidInput("config: unknown scenario '" + name + "' (expected desk or full)");
}

void ExperimentConfig::validate() const {
  env.validate();
  train.validate();
  require(eval.episodes >= 1, "config: eval.episodes must be >= 1");
  require(checkpoint_every >= 0, "config: checkpoint_every must be >= 0");
  require(is_heuristic_scheme(scheme) || (scheme_from_string(scheme), true), "config: bad scheme");
  if (sweep.axis == SweepAxis::cluster_fraction) {
    for (double f : sweep.values) require(f > 0.0 && f <= 1.0, "config: cluster fractions must lie in (0, 1]");
  }
  if (sweep.axis == SweepAxis::num_users) {
    for (double k : sweep.values) {
      require(k >= 1.0 && k <= env.channel.num_aps && k == std::floor(k),
              "config: swept user counts must be integers in [1, M]");
    }
  }
  if (sweep.axis != SweepAxis::none) require(!sweep.values.empty(), "config: sweep values missing");
}

json config_to_json(const ExperimentConfig& c) {
  const auto& ch = c.env.channel;
  const auto& co = c.env.compute;
  json j;
  j["scenario"] = c.scenario;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["scheme"] = c.scheme;
  j["checkpoint_every"] = c.checkpoint_every;
  j["channel"] = {{"num_aps", ch.num_aps},
                  {"num_users", ch.num_users},
                  {"area_side_m", ch.area_side_m},
                  {"carrier_mhz", ch.carrier_mhz},
                  {"ap_height_m", ch.ap_height_m},
                  {"user_height_m", ch.user_height_m},
                  {"shadow_std_db", ch.shadow_std_db},
                  {"d0_km", ch.d0_km},
                  {"d1_km", ch.d1_km},
                  {"bandwidth_hz", ch.bandwidth_hz},
                  {"noise_temp_k", ch.noise_temp_k},
                  {"noise_figure_db", ch.noise_figure_db},
                  {"boltzmann", ch.boltzmann},
                  {"pilot_power_w", ch.pilot_power_w},
                  {"coherence_steps", ch.coherence_steps}};
  j["access"] = {{"cluster_size", c.env.cluster_size},
                 {"p_max_w", c.env.p_max_w},
                 {"fpc_p0_w", c.env.fpc.p0_w},
                 {"fpc_nu", c.env.fpc.nu}};
  j["compute"] = {{"f_max_hz", co.f_max_hz},
                  {"f_cpu_hz", co.f_cpu_hz},
                  {"cycles_per_bit", co.cycles_per_bit},
                  {"switched_capacitance", co.switched_capacitance},
                  {"deadline_s", co.deadline_s},
                  {"task_min_bits", co.task_min_bits},
                  {"task_max_bits", co.task_max_bits},
                  {"step_s", co.step_s}};
  j["episode"] = {{"steps", c.env.episode.steps},
                  {"discount", c.env.episode.discount},
                  {"redraw_placement", c.env.episode.redraw_placement}};
  const auto& t = c.train;
  j["train"] = {{"discount", t.discount},
                {"tau", t.tau},
                {"critic_lr", t.critic_lr},
                {"actor_lr", t.actor_lr},
                {"batch_size", t.batch_size},
                {"buffer_capacity", t.buffer_capacity},
                {"episodes", t.episodes},
                {"noise_sigma_start", t.noise.sigma_start},
                {"noise_sigma_end", t.noise.sigma_end},
                {"hidden_dims", t.hidden_dims},
                {"actor_final_layer_scale", t.actor_final_layer_scale},
                {"max_grad_norm", t.max_grad_norm},
                {"reward_scale", t.reward_scale}};
  j["eval"] = {{"episodes", c.eval.episodes}, {"seed", c.eval.seed}};
  j["sweep"] = {{"axis", to_string(c.sweep.axis)}, {"values", c.sweep.values}};
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  // Keys override the named preset, so a partial file stays at its scale.
  std::string scenario = "desk";
  StrictObject root(j, "root");
  root.get("scenario", scenario);
  ExperimentConfig c = ExperimentConfig::preset(scenario);
  root.get("seed", c.seed);
  root.get("output_dir", c.output_dir);
  root.get("scheme", c.scheme);
  root.get("checkpoint_every", c.checkpoint_every);

  if (const json* s = root.child("channel")) {
    auto& ch = c.env.channel;
    StrictObject o(*s, "channel");
    o.get("num_aps", ch.num_aps);
    o.get("num_users", ch.num_users);
    o.get("area_side_m", ch.area_side_m);
    o.get("carrier_mhz", ch.carrier_mhz);
    o.get("ap_height_m", ch.ap_height_m);
    o.get("user_height_m", ch.user_height_m);
    o.get("shadow_std_db", ch.shadow_std_db);
    o.get("d0_km", ch.d0_km);
    o.get("d1_km", ch.d1_km);
    o.get("bandwidth_hz", ch.bandwidth_hz);
    o.get("noise_temp_k", ch.noise_temp_k);
    o.get("noise_figure_db", ch.noise_figure_db);
    o.get("boltzmann", ch.boltzmann);
    o.get("pilot_power_w", ch.pilot_power_w);
    o.get("coherence_steps", ch.coherence_steps);
    o.finish();
  }
  if (const json* s = root.child("access")) {
    StrictObject o(*s, "access");
    o.get("cluster_size", c.env.cluster_size);
    o.get("p_max_w", c.env.p_max_w);
    o.get("fpc_p0_w", c.env.fpc.p0_w);
    o.get("fpc_nu", c.env.fpc.nu);
    o.finish();
  }
  if (const json* s = root.child("compute")) {
    auto& co = c.env.compute;
    StrictObject o(*s, "compute");
    o.get("f_max_hz", co.f_max_hz);
    o.get("f_cpu_hz", co.f_cpu_hz);
    o.get("cycles_per_bit", co.cycles_per_bit);
    o.get("switched_capacitance", co.switched_capacitance);
    o.get("deadline_s", co.deadline_s);
    o.get("task_min_bits", co.task_min_bits);
    o.get("task_max_bits", co.task_max_bits);
    o.get("step_s", co.step_s);
    o.finish();
  }
  if (const json* s = root.child("episode")) {
    StrictObject o(*s, "episode");
    o.get("steps", c.env.episode.steps);
    o.get("discount", c.env.episode.discount);
    o.get("redraw_placement", c.env.episode.redraw_placement);
    o.finish();
  }
  if (const json* s = root.child("train")) {
    auto& t = c.train;
    StrictObject o(*s, "train");
    o.get("discount", t.discount);
    o.get("tau", t.tau);
    o.get("critic_lr", t.critic_lr);
    o.get("actor_lr", t.actor_lr);
    o.get("batch_size", t.batch_size);
    o.get("buffer_capacity", t.buffer_capacity);
    o.get("episodes", t.episodes);
    o.get("noise_sigma_start", t.noise.sigma_start);
    o.get("noise_sigma_end", t.noise.sigma_end);
    o.get("hidden_dims", t.hidden_dims);
    o.get("actor_final_layer_scale", t.actor_final_layer_scale);
    o.get("max_grad_norm", t.max_grad_norm);
    o.get("reward_scale", t.reward_scale);
    o.finish();
  }
  if (const json* s = root.child("eval")) {
    StrictObject o(*s, "eval");
    o.get("episodes", c.eval.episodes);
    o.get("seed", c.eval.seed);
    o.finish();
  }
  if (const json* s = root.child("sweep")) {
    StrictObject o(*s, "sweep");
    std::string axis = to_string(c.sweep.axis);
    o.get("axis", axis);
    c.sweep.axis = axis_from_string(axis);
    o.get("values", c.sweep.values);
    o.finish();
  }
  root.finish();
  c.train.seed = c.seed;
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void save_config(const ExperimentConfig& cfg, const fs::path& path) {
  write_text(path, config_to_json(cfg).dump(2) + "\n");
}

bool is_heuristic_scheme(const std::string& scheme) {
  return scheme == "offloading_first_fpc" || scheme == "local_first_fpc";
}

HeuristicKind heuristic_from_string(const std::string& scheme) {
  if (scheme == "offloading_first_fpc") return HeuristicKind::offloading_first;
  if (scheme == "local_first_fpc") return HeuristicKind::local_first;
  throw InvalidInput("unknown heuristic '" + scheme + "'");
}

json report_to_json(const EvalReport& r) {
  return {{"scheme", r.scheme},
          {"episodes", r.episodes},
          {"num_users", r.num_users},
          {"mean_energy_j", r.mean_energy_j},
          {"success_rate", r.success_rate},
          {"mean_episode_reward", r.mean_episode_reward},
          {"mean_delay_s", r.mean_delay_s},
          {"p50_delay_s", r.p50_delay_s},
          {"p95_delay_s", r.p95_delay_s},
          {"max_delay_s", r.max_delay_s},
          {"infinite_delays", r.infinite_delays}};
}

EvalReport evaluate_policy(const std::string& name, const PolicyFn& policy, const EnvConfig& env_cfg,
                           int episodes, std::uint64_t seed, std::ostream* trace) {
  require(episodes >= 1, "evaluate: episodes must be >= 1");
  Environment env(env_cfg);
  env.set_strict_actions(true);
  Rng rng = eval_rng(seed);
  std::optional<TraceWriter> writer;
  if (trace != nullptr) writer.emplace(*trace);

  EvalReport r;
  r.scheme = name;
  r.episodes = episodes;
  r.num_users = env.num_users();
  DelayStats delays;
  double energy = 0.0;
  double reward = 0.0;
  long long met = 0;
  long long total = 0;
  for (int e = 0; e < episodes; ++e) {
    auto obs = env.reset(rng);
    bool done = false;
    while (!done) {
      const int t = env.step_index();
      const auto actions = policy(env, obs);
      StepResult res = env.step(actions, rng);
      if (writer) writer->write(e, t, obs, actions, res.outcome);
      reward += res.outcome.reward;
      for (const auto& u : res.outcome.users) {
        energy += u.e_total;
        met += u.deadline_met ? 1 : 0;
        ++total;
        if (std::isfinite(u.t_total)) {
          delays.finite.push_back(u.t_total);
        } else {
          ++delays.infinite;
        }
      }
      obs = std::move(res.next);
      done = res.done;
    }
  }
  r.mean_energy_j = energy / static_cast<double>(total);
  r.success_rate = static_cast<double>(met) / static_cast<double>(total);
  r.mean_episode_reward = reward / episodes;
  r.infinite_delays = delays.infinite;
  if (!delays.finite.empty()) {
    double s = 0.0;
    for (double d : delays.finite) s += d;
    r.mean_delay_s = s / static_cast<double>(delays.finite.size());
    r.p50_delay_s = percentile(delays.finite, 0.5);
    r.p95_delay_s = percentile(delays.finite, 0.95);
    r.max_delay_s = *std::max_element(delays.finite.begin(), delays.finite.end());
  }
  return r;
}

EvalReport evaluate_heuristic(HeuristicKind kind, const EnvConfig& env_cfg, int episodes,
                              std::uint64_t seed, std::ostream* trace) {
  return evaluate_policy(
      to_string(kind),
      [kind](const Environment& env, std::span<const Observation>) { return heuristic_actions(kind, env); },
      env_cfg, episodes, seed, trace);
}

EvalReport evaluate_trainer(const ActorCriticTrainer& trainer, const EnvConfig& env_cfg, int episodes,
                            std::uint64_t seed, std::ostream* trace) {
  return evaluate_policy(
      to_string(trainer.scheme()),
      [&trainer](const Environment& env, std::span<const Observation> obs) {
        return trainer.policy_actions(obs, trainer.fixed_eta_for(env));
      },
      env_cfg, episodes, seed, trace);
}

ActorCriticTrainer load_checkpoint(const fs::path& path, const ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open checkpoint " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("checkpoint " + path.string() + ": " + e.what());
  }
  return ActorCriticTrainer::from_json(j, cfg.env, cfg.train);
}

void save_checkpoint(const ActorCriticTrainer& trainer, const fs::path& path) {
  // Write-then-rename so an interrupted save never clobbers a good file.
  const fs::path tmp = path.string() + ".tmp";
  write_text(tmp, trainer.to_json().dump());
  fs::rename(tmp, path);
}

TrainArtifacts run_train(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.train.seed = cfg.seed;
  cfg.validate();
  require(!is_heuristic_scheme(cfg.scheme), "train: heuristic schemes have nothing to train");

  TrainArtifacts art;
  art.directory = cfg.output_dir;
  std::error_code ec;
  fs::create_directories(art.directory / "checkpoints", ec);
  if (ec) throw std::runtime_error("cannot create output directory " + cfg.output_dir + ": " + ec.message());
  save_config(cfg, art.directory / "config.json");

  art.metrics = art.directory / "metrics.jsonl";
  std::ofstream metrics(art.metrics, std::ios::binary | std::ios::trunc);
  std::ofstream timing(art.directory / "timing.jsonl", std::ios::binary | std::ios::trunc);
  if (!metrics || !timing) throw std::runtime_error("cannot write metrics into " + cfg.output_dir);

  ActorCriticTrainer trainer(scheme_from_string(cfg.scheme), cfg.env, cfg.train);
  Environment env(cfg.env);
  auto on_episode = [&](const EpisodeMetrics& m) {
    metrics << metrics_to_json(m).dump() << '\n';
    metrics.flush();
    timing << json{{"episode", m.episode}, {"wall_seconds", m.wall_seconds}}.dump() << '\n';
    timing.flush();
    if (cfg.checkpoint_every > 0 && (m.episode + 1) % cfg.checkpoint_every == 0) {
      std::ostringstream name;
      name << "episode_" << std::setw(5) << std::setfill('0') << (m.episode + 1) << ".json";
      save_checkpoint(trainer, art.directory / "checkpoints" / name.str());
    }
  };
  try {
    art.history = trainer.train(env, on_episode);
  } catch (const TrainingDiverged& e) {
    write_text(art.directory / "error.txt", std::string(e.what()) + "\n");
    throw;
  }
  art.final_checkpoint = art.directory / "checkpoints" / "final.json";
  save_checkpoint(trainer, art.final_checkpoint);

  std::ostringstream reward_csv;
  std::ostringstream success_csv;
  reward_csv << "episode,total_reward\n" << std::setprecision(17);
  success_csv << "episode,success_rate\n" << std::setprecision(17);
  for (const auto& m : art.history) {
    reward_csv << m.episode << ',' << m.total_reward << '\n';
    success_csv << m.episode << ',' << m.success_rate << '\n';
  }
  write_text(art.directory / "reward_curve.csv", reward_csv.str());
  write_text(art.directory / "success_curve.csv", success_csv.str());
  return art;
}

EvalReport run_eval(const fs::path& checkpoint, const ExperimentConfig& cfg, int episodes, std::ostream* trace) {
  const ActorCriticTrainer trainer = load_checkpoint(checkpoint, cfg);
  return evaluate_trainer(trainer, cfg.env, episodes, cfg.eval.seed, trace);
}

int cluster_size_for_fraction(double fraction, int num_aps) {
  require(fraction > 0.0 && fraction <= 1.0, "cluster fraction must lie in (0, 1]");
  const long n = std::lround(fraction * num_aps);
  return static_cast<int>(std::clamp<long>(n, 1, num_aps));
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  require(cfg.sweep.axis != SweepAxis::none, "sweep: no sweep axis configured");
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < cfg.sweep.values.size(); ++i) {
    const double value = cfg.sweep.values[i];
    ExperimentConfig point = cfg;
    if (cfg.sweep.axis == SweepAxis::cluster_fraction) {
      point.env.cluster_size = cluster_size_for_fraction(value, cfg.env.channel.num_aps);
    } else {
      point.env.channel.num_users = static_cast<int>(value);
    }
    std::ostringstream dir;
    dir << "point_" << i;
    point.output_dir = (fs::path(cfg.output_dir) / ("sweep_" + std::string(to_string(cfg.sweep.axis))) / dir.str())
                           .string();
    point.sweep = {};

    SweepRow row;
    row.value = value;
    row.num_users = point.env.num_users();
    row.cluster_size = point.env.cluster_size;
    if (is_heuristic_scheme(point.scheme)) {
      row.report = evaluate_heuristic(heuristic_from_string(point.scheme), point.env, point.eval.episodes,
                                      point.eval.seed);
    } else {
      const auto art = run_train(point);
      row.report = run_eval(art.final_checkpoint, point, point.eval.episodes);
    }
    row.reward_per_user = row.report.mean_episode_reward / row.num_users;
    rows.push_back(row);
  }
  fs::create_directories(cfg.output_dir);
  write_text(fs::path(cfg.output_dir) / "sweep.csv", sweep_csv(cfg.sweep.axis, rows));
  return rows;
}

std::vector<BaselineRow> baseline_table(const ExperimentConfig& cfg,
                                        const std::map<std::string, fs::path>& checkpoints) {
  static const std::vector<std::string> kOrder = {"maddpg",          "ddpg",           "offloading_first_fpc",
                                                  "local_first_fpc", "maddpg_cra_fpc", "maddpg_cra_max"};
  std::vector<BaselineRow> rows;
  for (const auto& scheme : kOrder) {
    BaselineRow row;
    row.scheme = scheme;
    if (is_heuristic_scheme(scheme)) {
      row.report = evaluate_heuristic(heuristic_from_string(scheme), cfg.env, cfg.eval.episodes, cfg.eval.seed);
      row.available = true;
    } else if (auto it = checkpoints.find(scheme); it != checkpoints.end() && fs::exists(it->second)) {
      row.report = run_eval(it->second, cfg, cfg.eval.episodes);
      row.available = true;
    } else {
      row.report.scheme = scheme;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string baseline_csv(const std::vector<BaselineRow>& rows) {
  std::ostringstream out;
  out << "scheme,available,mean_energy_j,success_rate,mean_delay_s\n" << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.scheme << ',' << (r.available ? "yes" : "no");
    if (r.available) {
      out << ',' << r.report.mean_energy_j << ',' << r.report.success_rate << ',' << r.report.mean_delay_s;
    } else {
      out << ",,,";
    }
    out << '\n';
  }
  return out.str();
}

std::string baseline_summary(const std::vector<BaselineRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(22) << "scheme" << std::setw(18) << "energy/user (J)" << "success\n";
  for (const auto& r : rows) {
    out << std::setw(22) << r.scheme;
    if (r.available) {
      std::ostringstream e;
      e << std::scientific << std::setprecision(4) << r.report.mean_energy_j;
      out << std::setw(18) << e.str() << std::fixed << std::setprecision(4) << r.report.success_rate;
    } else {
      out << "unavailable";
    }
    out << '\n';
  }
  return out.str();
}

std::string sweep_csv(SweepAxis axis, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << to_string(axis) << ",num_users,cluster_size,mean_energy_j,success_rate,reward_per_user\n"
      << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.value << ',' << r.num_users << ',' << r.cluster_size << ',' << r.report.mean_energy_j << ','
        << r.report.success_rate << ',' << r.reward_per_user << '\n';
  }
  return out.str();
}

void retain_heap() {
#if defined(__GLIBC__)
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TOP_PAD, 64 << 20);
#endif
}

}  // namespace jccra
