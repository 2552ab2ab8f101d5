#include <doctest.h>

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "jccra/env.hpp"

using namespace jccra;

namespace {

EnvConfig small_env(int aps = 9, int users = 3, int cluster = 4) {
  EnvConfig cfg;
  cfg.channel.num_aps = aps;
  cfg.channel.num_users = users;
  cfg.cluster_size = cluster;
  cfg.episode.steps = 10;
  return cfg;
}

std::vector<Action> uniform_actions(int k, double alpha, double eta) {
  return std::vector<Action>(k, Action{alpha, eta});
}

}  // namespace

TEST_SUITE("formula") {

TEST_CASE("reset draws tasks in range and is reproducible") {
  Environment env(small_env());
  Rng a(5), b(5);
  const auto oa = env.reset(a);
  Environment other(small_env());
  const auto ob = other.reset(b);
  REQUIRE(oa.size() == 3);
  for (std::size_t k = 0; k < oa.size(); ++k) {
    CHECK(oa[k].task_bits >= 2500.0);
    CHECK(oa[k].task_bits <= 7500.0);
    CHECK(oa[k].task_bits == ob[k].task_bits);
    CHECK(oa[k].prev_rate_bps == ob[k].prev_rate_bps);
    CHECK(oa[k].values().size() == 3);
  }
  Rng c(6);
  for (int e = 0; e < 20; ++e) {
    for (const auto& o : env.reset(c)) {
      CHECK(o.task_bits >= 2500.0);
      CHECK(o.task_bits <= 7500.0);
    }
  }
}

TEST_CASE("initial rate is the full-power rate") {
  Environment env(small_env());
  Rng rng(9);
  const auto obs = env.reset(rng);
  const std::vector<double> full(3, env.config().p_max_w);
  const auto rates = env.rates_for(full);
  for (int k = 0; k < 3; ++k) CHECK(obs[k].prev_rate_bps == rates[k]);
}

TEST_CASE("local-only step reward") {
  EnvConfig cfg = small_env(9, 2, 4);
  cfg.compute.task_min_bits = 2000.0;
  cfg.compute.task_max_bits = 2000.0;
  Environment env(cfg);
  Rng rng(1);
  env.reset(rng);
  const StepResult r = env.step(uniform_actions(2, 1.0, 0.3), rng);
  for (const auto& u : r.outcome.users) {
    CHECK(u.e_total == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(u.deadline_met);
  }
  CHECK(r.rewards == std::vector<double>(2, r.outcome.reward));
  CHECK(r.outcome.reward == doctest::Approx(-2e-3).epsilon(1e-12));
}

TEST_CASE("all-zero actions: no energy, every deadline missed, zero reward") {
  Environment env(small_env());
  Rng rng(2);
  env.reset(rng);
  const StepResult r = env.step(uniform_actions(3, 0.0, 0.0), rng);
  CHECK(r.outcome.reward == 0.0);
  CHECK(r.outcome.met_count() == 0);
  for (const auto& u : r.outcome.users) CHECK(u.e_total == 0.0);
}

TEST_CASE("full state ordering") {
  const std::vector<Observation> one{{1, 2, 3}};
  CHECK(full_state(one, 0) == std::vector<double>{1, 2, 3});
  const std::vector<Observation> three{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  CHECK(full_state(three, 1) == std::vector<double>{4, 5, 6, 1, 2, 3, 7, 8, 9});
  auto base = full_state(three, 0);
  std::sort(base.begin(), base.end());
  for (int k = 0; k < 3; ++k) {
    auto s = full_state(three, k);
    CHECK(s.size() == 9);
    std::sort(s.begin(), s.end());
    CHECK(s == base);
  }
}

TEST_CASE("success rate") {
  StepOutcome all;
  all.users.resize(2);
  for (auto& u : all.users) u.deadline_met = true;
  std::vector<StepOutcome> v{all, all};
  CHECK(success_rate(v) == 1.0);
  v[1].users[0].deadline_met = false;
  v[1].users[1].deadline_met = false;
  CHECK(success_rate(v) == 0.5);
  CHECK_THROWS_AS(success_rate(std::vector<StepOutcome>{}), InvalidInput);
}

TEST_CASE("success rate matches a recount of a recorded trace") {
  Environment env(small_env());
  Rng rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::ostringstream trace;
  TraceWriter writer(trace);
  auto obs = env.reset(rng);
  std::vector<StepOutcome> outcomes;
  for (int t = 0; t < 10; ++t) {
    std::vector<Action> a(3);
    for (auto& x : a) x = {unit(rng), unit(rng)};
    const StepResult r = env.step(a, rng);
    writer.write(0, t, obs, a, r.outcome);
    outcomes.push_back(r.outcome);
    obs = r.next;
  }
  std::istringstream in(trace.str());
  std::string line;
  int met = 0, total = 0, lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    const nlohmann::json rec = nlohmann::json::parse(line);
    for (const auto& u : rec.at("users")) {
      ++total;
      met += u.at("deadline_met").get<bool>() ? 1 : 0;
    }
  }
  CHECK(lines == 10);
  CHECK(total == 30);
  CHECK(success_rate(outcomes) == static_cast<double>(met) / total);
}

}  // TEST_SUITE

TEST_CASE("next observation carries this step's rate") {
  Environment env(small_env());
  Rng rng(4);
  env.reset(rng);
  for (int t = 0; t < 10; ++t) {
    const StepResult r = env.step(uniform_actions(3, 0.4, 0.6), rng);
    for (int k = 0; k < 3; ++k) CHECK(r.next[k].prev_rate_bps == r.outcome.users[k].rate_bps);
    CHECK(r.outcome.reward <= 0.0);
    CHECK(r.done == (t == 9));
  }
  CHECK_THROWS_AS(env.step(uniform_actions(3, 0.4, 0.6), rng), InvalidInput);
}

TEST_CASE("actions are clamped in training mode and rejected in strict mode") {
  Environment env(small_env());
  Rng a(8), b(8);
  env.reset(a);
  const StepResult clamped = env.step(uniform_actions(3, 1.7, -0.2), a);
  Environment ref(small_env());
  ref.reset(b);
  const StepResult exact = ref.step(uniform_actions(3, 1.0, 0.0), b);
  CHECK(clamped.outcome.reward == exact.outcome.reward);

  env.set_strict_actions(true);
  CHECK_THROWS_AS(env.step(uniform_actions(3, 1.2, 0.5), a), InvalidInput);
  CHECK_THROWS_AS(env.step(uniform_actions(2, 0.5, 0.5), a), InvalidInput);
}

TEST_CASE("fixed placement survives resets") {
  EnvConfig cfg = small_env();
  cfg.episode.redraw_placement = false;
  Environment env(cfg);
  Rng rng(3);
  env.reset(rng);
  const Eigen::MatrixXd beta = env.network().beta;
  const Eigen::MatrixXcd g = env.network().g;
  env.reset(rng);
  CHECK(env.network().beta == beta);
  CHECK(env.network().g != g);

  Environment moving(small_env());
  moving.reset(rng);
  const Eigen::MatrixXd first = moving.network().beta;
  moving.reset(rng);
  CHECK(moving.network().beta != first);
}

TEST_CASE("fpc coefficients lie in (0, 1]") {
  Environment env(small_env());
  Rng rng(10);
  for (int e = 0; e < 20; ++e) {
    env.reset(rng);
    for (double eta : env.fpc_eta()) {
      CHECK(eta > 0.0);
      CHECK(eta <= 1.0);
    }
  }
}

TEST_CASE("environment config validation") {
  EnvConfig cfg = small_env();
  cfg.cluster_size = 10;
  CHECK_THROWS_AS(Environment{cfg}, InvalidInput);
  cfg = small_env();
  cfg.episode.steps = 0;
  CHECK_THROWS_AS(Environment{cfg}, InvalidInput);
}
