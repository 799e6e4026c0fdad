#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "amod/exp/presets.hpp"
#include "amod/ppo/advantages.hpp"
#include "amod/ppo/agent.hpp"
#include "amod/ppo/checkpoint.hpp"
#include "amod/ppo/rollout.hpp"
#include "amod/ppo/trainer.hpp"
#include "amod/ppo/update.hpp"

using namespace amod;
namespace fs = std::filesystem;

namespace {

std::shared_ptr<const model::Scenario> electric() {
  return std::make_shared<const model::Scenario>(exp::make_preset("two-node-electric"));
}

ppo::PpoConfig small_config() {
  ppo::PpoConfig c;
  c.num_envs = 2;
  c.horizon = 32;
  c.minibatch = 16;
  c.epochs = 2;
  c.hidden = {16, 16};
  c.episode_length = 20;
  return c;
}

struct Collected {
  std::shared_ptr<ppo::ActorCritic> agent;
  ppo::RolloutBatch batch;
  ppo::AdvantageResult adv;
};

Collected collect(const ppo::PpoConfig& cfg) {
  auto scn = electric();
  Rng rng(cfg.seed);
  Collected c;
  c.agent = std::make_shared<ppo::ActorCritic>(*scn, cfg.hidden, cfg.init_log_std, rng);
  auto actors = ppo::make_actors(scn, cfg.num_envs, cfg.episode_length, cfg.gamma, cfg.seed);
  c.batch = ppo::collect_rollouts(*c.agent, actors, cfg.horizon, {true, 1, cfg.seed});
  c.adv = ppo::compute_advantages(c.batch, cfg.gamma, cfg.lambda_gae);
  return c;
}

std::vector<int> all_indices(int n) {
  std::vector<int> idx(n);
  for (int k = 0; k < n; ++k) idx[k] = k;
  return idx;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("amod_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("gae with lambda 0 is the one-step TD error") {
  Eigen::VectorXd r(4), v(4), nv(4);
  r << 1, 2, 3, 4;
  v << 0.5, 0.1, -0.2, 0.3;
  nv << 0.1, -0.2, 0.9, 0.7;
  const std::vector<std::uint8_t> dones{0, 1, 0, 0};
  const auto res = ppo::compute_advantages(r, v, nv, dones, 1, 4, 0.9, 0.0);
  for (int t = 0; t < 4; ++t) CHECK(res.raw[t] == doctest::Approx(r[t] + 0.9 * nv[t] - v[t]));
  CHECK((res.returns - (res.raw + v)).norm() < 1e-12);
  CHECK(res.advantages.mean() == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("gae with lambda 1 is the bootstrapped discounted return minus the value") {
  const int T = 6;
  const double g = 0.8;
  Eigen::VectorXd r = Eigen::VectorXd::LinSpaced(T, -1.0, 2.0);
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(T, 0.3, -0.4);
  Eigen::VectorXd nv(T);
  for (int t = 0; t + 1 < T; ++t) nv[t] = v[t + 1];
  nv[T - 1] = 1.7;
  // Two actors stacked; the second copy must not leak into the first.
  Eigen::VectorXd r2(2 * T), v2(2 * T), nv2(2 * T);
  r2 << r, r * 10.0;
  v2 << v, v;
  nv2 << nv, nv;
  const auto res = ppo::compute_advantages(r2, v2, nv2, std::vector<std::uint8_t>(2 * T, 0), 2, T,
                                           g, 1.0);
  for (int t = 0; t < T; ++t) {
    double ret = 0.0, disc = 1.0;
    for (int k = t; k < T; ++k, disc *= g) ret += disc * r[k];
    ret += disc * nv[T - 1];
    CHECK(res.raw[t] == doctest::Approx(ret - v[t]));
  }
}

TEST_CASE("gae stops accumulating at episode boundaries") {
  Eigen::VectorXd r = Eigen::VectorXd::Ones(4), v = Eigen::VectorXd::Zero(4);
  Eigen::VectorXd nv = Eigen::VectorXd::Zero(4);
  const auto cut = ppo::compute_advantages(r, v, nv, {0, 1, 0, 0}, 1, 4, 1.0, 1.0);
  CHECK(cut.raw[0] == doctest::Approx(2.0));
  CHECK(cut.raw[1] == doctest::Approx(1.0));
  CHECK(cut.raw[2] == doctest::Approx(2.0));
}

TEST_CASE("fresh batch: ratios are one and the loss gradient matches finite differences") {
  auto cfg = small_config();
  auto c = collect(cfg);
  const auto idx = all_indices(c.batch.size());
  const auto l = ppo::minibatch_loss(*c.agent, c.batch, c.adv, idx, cfg, 1.0);
  CHECK(std::abs(l.mean_ratio - 1.0) < 1e-10);
  CHECK(l.max_ratio_deviation < 1e-10);
  CHECK(l.clip_fraction == 0.0);
  CHECK(l.kl == doctest::Approx(0.0).scale(1e-10));

  for (auto obj : {ppo::Objective::kClip, ppo::Objective::kKlPen}) {
    cfg.objective = obj;
    cfg.clip_eps = 50.0;  // keep the clip kink out of the difference stencil
    // Move away from the collection point so the KL terms are active too.
    Rng rng(5);
    std::normal_distribution<double> N(0.0, 0.05);
    Eigen::VectorXd p = c.agent->params();
    for (auto& x : p) x += N(rng);
    c.agent->set_params(p);
    const auto base = ppo::minibatch_loss(*c.agent, c.batch, c.adv, idx, cfg, 0.7);
    const double h = 1e-6;
    double worst = 0.0;
    for (Eigen::Index k = 0; k < p.size(); k += 7) {
      Eigen::VectorXd a = p, b = p;
      a[k] += h;
      b[k] -= h;
      c.agent->set_params(a);
      const double fa = ppo::minibatch_loss(*c.agent, c.batch, c.adv, idx, cfg, 0.7).total;
      c.agent->set_params(b);
      const double fb = ppo::minibatch_loss(*c.agent, c.batch, c.adv, idx, cfg, 0.7).total;
      const double num = (fa - fb) / (2 * h);
      worst = std::max(worst, std::abs(num - base.grad[k]) /
                                  std::max(1e-3, std::abs(num) + std::abs(base.grad[k])));
    }
    c.agent->set_params(p);
    CHECK(worst <= 1e-4);
  }
}

TEST_CASE("pinned clip: every sample beyond the range gives no policy gradient") {
  auto cfg = small_config();
  cfg.vf_coef = 0.0;
  cfg.ent_coef = 0.0;
  auto c = collect(cfg);
  c.batch.log_probs.array() -= 0.5;  // ratio e^0.5 > 1 + eps everywhere
  c.adv.advantages.setOnes();
  const auto l = ppo::minibatch_loss(*c.agent, c.batch, c.adv, all_indices(c.batch.size()), cfg, 1.0);
  CHECK(l.clip_fraction == doctest::Approx(1.0));
  CHECK(l.grad.norm() == 0.0);
  CHECK(l.policy == doctest::Approx(-(1.0 + cfg.clip_eps)));
}

TEST_CASE("kl coefficient adapts by factors of two") {
  CHECK(ppo::adapt_kl_beta(1.0, 0.1, 0.01) == 2.0);
  CHECK(ppo::adapt_kl_beta(1.0, 0.001, 0.01) == 0.5);
  CHECK(ppo::adapt_kl_beta(1.0, 0.012, 0.01) == 1.0);
}

TEST_CASE("update with zero learning rate leaves every parameter alone") {
  auto cfg = small_config();
  cfg.lr = 0.0;
  auto c = collect(cfg);
  const Eigen::VectorXd before = c.agent->params();
  auto state = ppo::make_update_state(*c.agent, cfg);
  const auto d = ppo::ppo_update(*c.agent, c.batch, c.adv, cfg, state);
  CHECK(c.agent->params() == before);
  CHECK(d.minibatches == cfg.epochs * 4);
  CHECK(d.first_ratio_deviation < 1e-10);
}

TEST_CASE("update raises the surrogate on its own batch") {
  auto cfg = small_config();
  cfg.lr = 1e-3;
  auto c = collect(cfg);
  const auto idx = all_indices(c.batch.size());
  auto state = ppo::make_update_state(*c.agent, cfg);
  const double before = ppo::minibatch_loss(*c.agent, c.batch, c.adv, idx, cfg, 1.0).policy;
  ppo::ppo_update(*c.agent, c.batch, c.adv, cfg, state);
  const auto after = ppo::minibatch_loss(*c.agent, c.batch, c.adv, idx, cfg, 1.0);
  CHECK(after.policy < before);
  CHECK(after.kl > 0.0);
}

TEST_CASE("non-finite parameters are reported") {
  auto cfg = small_config();
  auto c = collect(cfg);
  Eigen::VectorXd p = c.agent->params();
  p[0] = std::nan("");
  c.agent->set_params(p);
  CHECK_THROWS_AS(ppo::minibatch_loss(*c.agent, c.batch, c.adv, all_indices(8), cfg, 1.0),
                  ppo::NonFiniteLossError);
}

TEST_CASE("action map: zero output is the middle price and uniform routing") {
  auto scn = electric();
  Rng rng(1);
  ppo::ActorCritic agent(*scn, {8}, -0.5, rng);
  const auto a = agent.to_action(*scn, Eigen::VectorXd::Zero(agent.act_dim()));
  CHECK(a.ell[0] == doctest::Approx(15.0));
  CHECK_NOTHROW(env::validate_action(*scn, a));
  const auto big = agent.to_action(*scn, Eigen::VectorXd::Constant(agent.act_dim(), 5.0));
  CHECK(big.ell[1] == 30.0);
}

TEST_CASE("checkpoint round trip and dimension guard") {
  const auto dir = scratch_dir("ckpt");
  auto cfg = small_config();
  ppo::TrainOptions opts;
  opts.total_steps = 64;
  opts.out_dir = dir;
  const auto res = ppo::train(electric(), cfg, opts);
  const auto ck = ppo::load_checkpoint(res.final_checkpoint);
  CHECK(ck.agent.params() == res.agent->params());
  CHECK(ck.agent.obs_stats.mean == res.agent->obs_stats.mean);
  REQUIRE(ck.trainer);
  CHECK(ck.trainer->env_steps == 64);
  auto other = std::make_shared<const model::Scenario>(exp::make_preset("sf-like"));
  CHECK_THROWS_AS(ppo::NeuralPolicy(std::make_shared<const ppo::ActorCritic>(ck.agent), other),
                  DimensionError);
  {
    std::ofstream f(dir / "bad.ckpt", std::ios::binary);
    f << "NOTACKPT";
  }
  CHECK_THROWS(ppo::load_checkpoint(dir / "bad.ckpt"));
  CHECK_THROWS_AS(ppo::load_checkpoint(dir / "missing.ckpt"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("zero steps writes the untrained agent") {
  const auto dir = scratch_dir("zero");
  auto cfg = small_config();
  ppo::TrainOptions opts;
  opts.out_dir = dir;
  const auto res = ppo::train(electric(), cfg, opts);
  CHECK(res.history.empty());
  const ppo::Trainer fresh(electric(), cfg);
  CHECK(ppo::load_checkpoint(res.final_checkpoint).agent.params() == fresh.agent().params());
  fs::remove_all(dir);
}

TEST_CASE("training is deterministic and resuming is bit-identical") {
  auto cfg = small_config();
  const auto a = scratch_dir("straight"), b = scratch_dir("split");
  ppo::TrainOptions o;
  o.out_dir = a;
  o.total_steps = 4 * 64;
  const auto straight = ppo::train(electric(), cfg, o);

  ppo::TrainOptions first = o;
  first.out_dir = b;
  first.total_steps = 2 * 64;
  const auto half = ppo::train(electric(), cfg, first);
  ppo::TrainOptions second = first;
  second.resume = half.final_checkpoint;
  const auto rest = ppo::train(electric(), cfg, second);

  CHECK(rest.agent->params() == straight.agent->params());
  CHECK(rest.agent->head.log_std == straight.agent->head.log_std);
  CHECK(slurp(a / "metrics.csv") == slurp(b / "metrics.csv"));

  const auto again = scratch_dir("again");
  o.out_dir = again;
  ppo::train(electric(), cfg, o);
  CHECK(slurp(a / "metrics.csv") == slurp(again / "metrics.csv"));
  for (const auto& d : {a, b, again}) fs::remove_all(d);
}

TEST_CASE("threaded rollouts match the single-threaded ones") {
  auto cfg = small_config();
  cfg.num_envs = 4;
  auto scn = electric();
  Rng r1(cfg.seed), r2(cfg.seed);
  ppo::ActorCritic a1(*scn, cfg.hidden, cfg.init_log_std, r1);
  auto act1 = ppo::make_actors(scn, 4, 20, cfg.gamma, 1);
  auto act2 = ppo::make_actors(scn, 4, 20, cfg.gamma, 1);
  const auto b1 = ppo::collect_rollouts(a1, act1, 32, {true, 1, 1});
  const auto b2 = ppo::collect_rollouts(a1, act2, 32, {true, 3, 1});
  CHECK(b1.raw_rewards == b2.raw_rewards);
  CHECK(b1.actions == b2.actions);
}

TEST_CASE("config validation") {
  ppo::PpoConfig c;
  CHECK_NOTHROW(c.validate());
  auto bad = [](auto mutate) {
    ppo::PpoConfig x;
    mutate(x);
    CHECK_THROWS_AS(x.validate(), ValidationError);
  };
  bad([](ppo::PpoConfig& x) { x.gamma = 1.5; });
  bad([](ppo::PpoConfig& x) { x.num_envs = 0; });
  bad([](ppo::PpoConfig& x) { x.clip_eps = 0.0; });
  bad([](ppo::PpoConfig& x) { x.lr = -1.0; });
  CHECK_THROWS_AS(ppo::objective_from_string("adam"), ValidationError);
}
