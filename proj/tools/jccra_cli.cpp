#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jccra/harness.hpp"

namespace fs = std::filesystem;

namespace {

jccra::ExperimentConfig resolve_config(const std::string& path, const std::optional<std::uint64_t>& seed,
                                       const std::string& out_dir, const std::string& scheme) {
  jccra::ExperimentConfig cfg = path.empty() ? jccra::ExperimentConfig::desk() : jccra::load_config(path);
  if (seed) {
    cfg.seed = *seed;
    cfg.train.seed = *seed;
  }
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (!scheme.empty()) cfg.scheme = scheme;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  jccra::retain_heap();
  CLI::App app{"Cell-free MEC joint resource allocation: training and evaluation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string scheme;
  std::optional<std::uint64_t> seed;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "Experiment config (JSON); desk-scale defaults if omitted");
    sub->add_option("-s,--seed", seed, "Override the run seed");
    sub->add_option("-o,--out", out_dir, "Override the output directory");
    sub->add_option("--scheme", scheme, "Override the scheme");
  };

  auto* train = app.add_subcommand("train", "Train a learned scheme");
  add_common(train);

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint or a heuristic");
  add_common(eval);
  std::string checkpoint;
  std::string trace_path;
  int episodes = 0;
  eval->add_option("-k,--checkpoint", checkpoint, "Checkpoint to evaluate (learned schemes)");
  eval->add_option("-n,--episodes", episodes, "Evaluation episodes (default from config)");
  eval->add_option("-t,--trace", trace_path, "Write a per-step JSON-lines trace");

  auto* baseline = app.add_subcommand("baseline", "Compare all schemes on common evaluation seeds");
  add_common(baseline);
  std::vector<std::string> ckpt_args;
  baseline->add_option("-k,--checkpoint", ckpt_args, "scheme=path pairs for learned rows");

  auto* sweep = app.add_subcommand("sweep", "Cluster-size or user-count sweep");
  add_common(sweep);

  auto* show = app.add_subcommand("config", "Print a normalised config");
  add_common(show);
  bool full_scale = false;
  show->add_flag("--full", full_scale, "Start from the full-size network instead of desk scale");

  CLI11_PARSE(app, argc, argv);

  try {
    if (show->parsed()) {
      auto cfg = full_scale && config_path.empty() ? jccra::ExperimentConfig::full()
                                                    : resolve_config(config_path, seed, out_dir, scheme);
      std::cout << jccra::config_to_json(cfg).dump(2) << '\n';
      return 0;
    }
    if (train->parsed()) {
      const auto cfg = resolve_config(config_path, seed, out_dir, scheme);
      std::cerr << "training " << cfg.scheme << " for " << cfg.train.episodes << " episodes into "
                << cfg.output_dir << '\n';
      const auto art = jccra::run_train(cfg);
      const auto& last = art.history.back();
      std::cout << "final episode reward " << last.total_reward << ", success " << last.success_rate << '\n'
                << "checkpoint " << art.final_checkpoint.string() << '\n';
      return 0;
    }
    if (eval->parsed()) {
      const auto cfg = resolve_config(config_path, seed, out_dir, scheme);
      const int n = episodes > 0 ? episodes : cfg.eval.episodes;
      std::ofstream trace_file;
      std::ostream* trace = nullptr;
      if (!trace_path.empty()) {
        trace_file.open(trace_path);
        trace = &trace_file;
      }
      jccra::EvalReport report;
      if (jccra::is_heuristic_scheme(cfg.scheme)) {
        report = jccra::evaluate_heuristic(jccra::heuristic_from_string(cfg.scheme), cfg.env, n, cfg.eval.seed, trace);
      } else {
        if (checkpoint.empty()) throw jccra::InvalidInput("eval: --checkpoint is required for learned schemes");
        report = jccra::run_eval(checkpoint, cfg, n, trace);
      }
      std::cout << jccra::report_to_json(report).dump(2) << '\n';
      return 0;
    }
    if (baseline->parsed()) {
      const auto cfg = resolve_config(config_path, seed, out_dir, scheme);
      std::map<std::string, fs::path> ckpts;
      for (const auto& arg : ckpt_args) {
        const auto eq = arg.find('=');
        if (eq == std::string::npos) throw jccra::InvalidInput("baseline: expected scheme=path, got " + arg);
        ckpts[arg.substr(0, eq)] = arg.substr(eq + 1);
      }
      const auto rows = jccra::baseline_table(cfg, ckpts);
      fs::create_directories(cfg.output_dir);
      std::ofstream(fs::path(cfg.output_dir) / "baseline.csv") << jccra::baseline_csv(rows);
      std::ofstream(fs::path(cfg.output_dir) / "baseline.txt") << jccra::baseline_summary(rows);
      std::cout << jccra::baseline_summary(rows);
      return 0;
    }
    if (sweep->parsed()) {
      const auto cfg = resolve_config(config_path, seed, out_dir, scheme);
      const auto rows = jccra::run_sweep(cfg);
      std::cout << jccra::sweep_csv(cfg.sweep.axis, rows);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
