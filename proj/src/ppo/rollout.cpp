#include "amod/ppo/rollout.hpp"

#include <thread>

#include "amod/nn/gaussian.hpp"

namespace amod::ppo {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (int k = 0; k < n; ++k) fn(k);
    return;
  }
  const int workers = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int k = w; k < n; k += workers) fn(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

ActorSet make_actors(std::shared_ptr<const model::Scenario> scn, int num_envs,
                     int episode_length, double gamma, std::uint64_t seed) {
  ActorSet set;
  env::EnvOptions opts;
  opts.episode_length = episode_length;
  for (int n = 0; n < num_envs; ++n) {
    set.envs.emplace_back(scn, opts);
    set.envs.back().reset(splitmix64(seed * 1000003ULL + static_cast<std::uint64_t>(n)));
    set.action_rngs.emplace_back(splitmix64(~seed + 7919ULL * static_cast<std::uint64_t>(n)));
  }
  set.reward_scaler = nn::RewardScaler(num_envs, gamma);
  return set;
}

RolloutBatch collect_rollouts(const ActorCritic& agent, ActorSet& actors, int horizon,
                              const RolloutOptions& opts) {
  const int N = static_cast<int>(actors.envs.size());
  const int T = horizon;
  const int od = agent.obs_dim(), ad = agent.act_dim();
  RolloutBatch b;
  b.num_envs = N;
  b.horizon = T;
  b.obs.resize(od, N * T);
  b.raw_obs.resize(od, N * T);
  b.actions.resize(ad, N * T);
  b.means.resize(ad, N * T);
  b.log_std = agent.head.log_std;
  b.rewards.resize(N * T);
  b.raw_rewards.resize(N * T);
  b.values.resize(N * T);
  b.next_values.resize(N * T);
  b.log_probs.resize(N * T);
  b.dones.assign(N * T, 0);
  b.total_queue.resize(N * T);
  b.charge_units.resize(N * T);
  b.electricity_spend.resize(N * T);

  // States whose value is needed for bootstrapping: (column, raw obs).
  std::vector<int> boot_cols;
  std::vector<Eigen::VectorXd> boot_obs;
  std::vector<env::StepOutcome> outcomes(N);
  Eigen::MatrixXd X(od, N);
  const Eigen::VectorXd stdv = agent.head.log_std.array().exp();

  for (int t = 0; t < T; ++t) {
    for (int n = 0; n < N; ++n) X.col(n) = env::flatten(actors.envs[n].state());
    const Eigen::MatrixXd obs = agent.observe_raw_batch(X);
    const Eigen::MatrixXd mean = agent.actor.forward_batch(obs);
    const Eigen::MatrixXd value = agent.critic.forward_batch(obs);

    parallel_for(N, opts.threads, [&](int n) {
      Rng& rng = actors.action_rngs[n];
      std::normal_distribution<double> normal(0.0, 1.0);
      Eigen::VectorXd u(ad);
      for (int k = 0; k < ad; ++k)
        u[k] = agent.active[k] != 0.0 ? mean(k, n) + stdv[k] * normal(rng) : mean(k, n);
      const int c = b.col(n, t);
      b.actions.col(c) = u;
      b.log_probs[c] = nn::gaussian_log_prob(mean.col(n), agent.head.log_std, u, agent.active);
      b.total_queue[c] = static_cast<double>(actors.envs[n].state().total_queue());
      outcomes[n] = actors.envs[n].step(agent.to_action(actors.envs[n].scenario(), u));
    });

    for (int n = 0; n < N; ++n) {
      const int c = b.col(n, t);
      b.obs.col(c) = obs.col(n);
      b.raw_obs.col(c) = X.col(n);
      b.means.col(c) = mean.col(n);
      b.values[c] = value(0, n);
      const double r = outcomes[n].reward;
      b.raw_rewards[c] = r;
      b.rewards[c] = opts.scale_reward ? actors.reward_scaler.scale(n, r) : r;
      b.charge_units[c] = static_cast<double>(outcomes[n].charge_units);
      b.electricity_spend[c] = outcomes[n].electricity_spend;
      if (actors.envs[n].done()) {
        b.dones[c] = 1;
        boot_cols.push_back(c);
        boot_obs.push_back(env::flatten(actors.envs[n].state()));
        actors.envs[n].reset(splitmix64(opts.seed ^ (0xa5a5a5a5ULL + actors.resets++)));
        actors.reward_scaler.returns[n] = 0.0;
      } else if (t + 1 == T) {
        boot_cols.push_back(c);
        boot_obs.push_back(env::flatten(actors.envs[n].state()));
      }
    }
  }

  // Interior steps bootstrap from the next column's value.
  for (int n = 0; n < N; ++n)
    for (int t = 0; t + 1 < T; ++t) b.next_values[b.col(n, t)] = b.values[b.col(n, t + 1)];
  if (!boot_cols.empty()) {
    Eigen::MatrixXd raw(od, static_cast<Eigen::Index>(boot_cols.size()));
    for (std::size_t k = 0; k < boot_cols.size(); ++k) raw.col(k) = boot_obs[k];
    const Eigen::MatrixXd v = agent.critic.forward_batch(agent.observe_raw_batch(raw));
    for (std::size_t k = 0; k < boot_cols.size(); ++k) b.next_values[boot_cols[k]] = v(0, k);
  }
  return b;
}

}  // namespace amod::ppo
