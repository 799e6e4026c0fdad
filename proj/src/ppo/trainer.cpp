#include "amod/ppo/trainer.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>

#include "amod/ppo/advantages.hpp"

namespace amod::ppo {

Trainer::Trainer(std::shared_ptr<const model::Scenario> scn, PpoConfig cfg)
    : scn_(std::move(scn)), cfg_(std::move(cfg)) {
  cfg_.validate();
  model::validate(*scn_);
  Rng init_rng(cfg_.seed * 0x9e3779b97f4a7c15ULL + 3);
  agent_ = std::make_shared<ActorCritic>(*scn_, cfg_.hidden, cfg_.init_log_std, init_rng);
  agent_->normalize_obs = cfg_.normalize_obs;
  actors_ = make_actors(scn_, cfg_.num_envs, cfg_.episode_length, cfg_.gamma, cfg_.seed);
  update_ = make_update_state(*agent_, cfg_);
}

Trainer Trainer::resume(std::shared_ptr<const model::Scenario> scn, PpoConfig cfg,
                        const std::filesystem::path& checkpoint) {
  Checkpoint ckpt = load_checkpoint(checkpoint);
  if (ckpt.agent.obs_dim() != env::state_dim(*scn) || ckpt.agent.act_dim() != env::action_dim(*scn))
    throw DimensionError("checkpoint dimensions (state " + std::to_string(ckpt.agent.obs_dim()) +
                         ", action " + std::to_string(ckpt.agent.act_dim()) +
                         ") do not match the scenario (state " +
                         std::to_string(env::state_dim(*scn)) + ", action " +
                         std::to_string(env::action_dim(*scn)) + ")");
  cfg.hidden.assign(ckpt.agent.actor.sizes().begin() + 1, ckpt.agent.actor.sizes().end() - 1);
  Trainer tr(scn, cfg);
  *tr.agent_ = std::move(ckpt.agent);
  tr.agent_->normalize_obs = cfg.normalize_obs;
  if (ckpt.trainer) {
    const TrainerSnapshot& t = *ckpt.trainer;
    tr.update_.adam = t.adam;
    tr.update_.adam.lr = cfg.lr;
    tr.update_.kl_beta = t.kl_beta;
    tr.update_.updates = t.updates;
    tr.update_.shuffle_rng = rng_from_string(t.shuffle_rng);
    tr.env_steps_ = t.env_steps;
    tr.iterations_ = t.iterations;
    const bool same_scenario = ckpt.scenario_hash == model::scenario_hash_hex(*scn);
    if (same_scenario && static_cast<int>(t.env_states.size()) == cfg.num_envs) {
      tr.actors_.reward_scaler = t.reward_scaler;
      tr.actors_.resets = t.resets;
      for (int n = 0; n < cfg.num_envs; ++n) {
        tr.actors_.action_rngs[n] = rng_from_string(t.action_rngs[n]);
        tr.actors_.envs[n].restore(t.env_states[n], rng_from_string(t.env_rngs[n]),
                                   t.env_episode_steps[n]);
      }
    } else if (t.reward_scaler.returns.size() == cfg.num_envs) {
      // Fine-tuning elsewhere: keep the reward scale, start fresh envs.
      tr.actors_.reward_scaler = t.reward_scaler;
      tr.actors_.reward_scaler.returns.setZero();
    }
  }
  return tr;
}

IterationMetrics Trainer::iterate() {
  const auto start = std::chrono::steady_clock::now();
  RolloutOptions ro;
  ro.scale_reward = cfg_.scale_reward;
  ro.threads = cfg_.threads;
  ro.seed = cfg_.seed;
  RolloutBatch batch = collect_rollouts(*agent_, actors_, cfg_.horizon, ro);
  if (cfg_.normalize_obs) agent_->obs_stats.update(batch.raw_obs);
  const AdvantageResult adv = compute_advantages(batch, cfg_.gamma, cfg_.lambda_gae);

  IterationMetrics m;
  m.diag = ppo_update(*agent_, batch, adv, cfg_, update_);
  env_steps_ += batch.size();
  ++iterations_;
  m.iteration = iterations_;
  m.env_steps = env_steps_;
  m.updates = update_.updates;
  m.mean_reward = batch.raw_rewards.mean();
  m.mean_queue = batch.total_queue.mean();
  const double units = batch.charge_units.sum();
  m.charge_price = units > 0 ? batch.electricity_spend.sum() / units : 0.0;
  m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return m;
}

Checkpoint Trainer::snapshot() const {
  Checkpoint c;
  c.agent = *agent_;
  c.scenario_hash = model::scenario_hash_hex(*scn_);
  TrainerSnapshot t;
  t.adam = update_.adam;
  t.kl_beta = update_.kl_beta;
  t.updates = update_.updates;
  t.env_steps = env_steps_;
  t.iterations = iterations_;
  t.shuffle_rng = rng_to_string(update_.shuffle_rng);
  t.reward_scaler = actors_.reward_scaler;
  t.resets = actors_.resets;
  for (std::size_t n = 0; n < actors_.envs.size(); ++n) {
    t.action_rngs.push_back(rng_to_string(actors_.action_rngs[n]));
    const env::AmodEnv& env = actors_.envs[n];
    t.env_rngs.push_back(rng_to_string(env.rng()));
    t.env_states.push_back(env.state());
    t.env_episode_steps.push_back(env.steps_in_episode());
  }
  c.trainer = std::move(t);
  return c;
}

void Trainer::save(const std::filesystem::path& path) const { save_checkpoint(path, snapshot()); }

void write_metrics_header(std::ostream& out) {
  out << "scenario_hash,seed,iteration,env_steps,updates,mean_reward,mean_queue,charge_price,"
         "policy_loss,value_loss,entropy,clip_fraction,approx_kl,mean_ratio,kl_beta,grad_norm\n";
}

void write_metrics_row(std::ostream& out, const IterationMetrics& m, const std::string& hash,
                       std::uint64_t seed) {
  const auto& d = m.diag;
  out << std::setprecision(12) << hash << ',' << seed << ',' << m.iteration << ',' << m.env_steps
      << ',' << m.updates << ',' << m.mean_reward << ',' << m.mean_queue << ',' << m.charge_price
      << ',' << d.policy_loss << ',' << d.value_loss << ',' << d.entropy << ','
      << d.clip_fraction << ',' << d.approx_kl << ',' << d.mean_ratio << ',' << d.kl_beta << ','
      << d.grad_norm << '\n';
}

TrainResult train(std::shared_ptr<const model::Scenario> scn, const PpoConfig& cfg,
                  const TrainOptions& opts) {
  std::error_code ec;
  std::filesystem::create_directories(opts.out_dir, ec);
  if (ec) throw IoError("cannot create " + opts.out_dir.string() + ": " + ec.message());
  Trainer tr = opts.resume ? Trainer::resume(scn, cfg, *opts.resume) : Trainer(scn, cfg);

  TrainResult res;
  res.metrics_csv = opts.out_dir / "metrics.csv";
  const bool append = opts.resume && std::filesystem::exists(res.metrics_csv);
  std::ofstream csv(res.metrics_csv, append ? std::ios::app : std::ios::trunc);
  if (!csv) throw IoError("cannot write " + res.metrics_csv.string());
  if (!append) write_metrics_header(csv);
  const std::string hash = model::scenario_hash_hex(*scn);

  const std::int64_t start = tr.env_steps();
  while (static_cast<std::uint64_t>(tr.env_steps() - start) < opts.total_steps) {
    IterationMetrics m = tr.iterate();
    write_metrics_row(csv, m, hash, cfg.seed);
    csv.flush();
    if (opts.log)
      *opts.log << "iter " << m.iteration << "  steps " << m.env_steps << "  reward "
                << m.mean_reward << "  queue " << m.mean_queue << "  kl " << m.diag.approx_kl
                << "  clip " << m.diag.clip_fraction << "  (" << std::fixed
                << std::setprecision(2) << m.seconds << " s)" << std::defaultfloat
                << std::setprecision(6) << std::endl;
    if (opts.checkpoint_every > 0 && m.iteration % opts.checkpoint_every == 0)
      tr.save(opts.out_dir / ("iter_" + std::to_string(m.iteration) + ".ckpt"));
    res.history.push_back(m);
  }
  res.final_checkpoint = opts.out_dir / "final.ckpt";
  tr.save(res.final_checkpoint);
  res.agent = tr.agent_ptr();
  return res;
}

}  // namespace amod::ppo
