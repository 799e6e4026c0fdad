#include "amod/ppo/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "amod/nn/binary_io.hpp"

namespace amod::ppo {
namespace {

void write_sizes(nn::BinaryWriter& w, const std::vector<int>& sizes) {
  w.u32(static_cast<std::uint32_t>(sizes.size()));
  for (int s : sizes) w.u32(static_cast<std::uint32_t>(s));
}

std::vector<int> read_sizes(nn::BinaryReader& r) {
  const std::uint32_t n = r.u32();
  if (n < 2 || n > 64) throw IoError("checkpoint: bad layer count");
  std::vector<int> sizes(n);
  for (auto& s : sizes) {
    s = static_cast<int>(r.u32());
    if (s < 1 || s > (1 << 24)) throw IoError("checkpoint: bad layer size");
  }
  return sizes;
}

void write_counts(nn::BinaryWriter& w, const std::vector<env::Count>& v) {
  w.u64(v.size());
  for (auto x : v) w.i64(x);
}

std::vector<env::Count> read_counts(nn::BinaryReader& r) {
  const std::uint64_t n = r.u64();
  if (n > (std::uint64_t{1} << 32)) throw IoError("checkpoint: bad count vector");
  std::vector<env::Count> v(n);
  for (auto& x : v) x = r.i64();
  return v;
}

void write_stats(nn::BinaryWriter& w, const nn::RunningStats& s) {
  w.vec(s.mean);
  w.vec(s.var);
  w.f64(s.count);
  w.f64(s.eps);
}

nn::RunningStats read_stats(nn::BinaryReader& r) {
  nn::RunningStats s;
  s.mean = r.vec();
  s.var = r.vec();
  s.count = r.f64();
  s.eps = r.f64();
  if (s.mean.size() != s.var.size()) throw IoError("checkpoint: normalizer shapes differ");
  return s;
}

}  // namespace

std::string rng_to_string(const Rng& rng) {
  std::ostringstream out;
  out << rng;
  return out.str();
}

Rng rng_from_string(const std::string& text) {
  std::istringstream in(text);
  Rng rng;
  in >> rng;
  if (!in) throw IoError("checkpoint: bad random stream state");
  return rng;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint " + tmp.string());
    nn::BinaryWriter w(out);
    const ActorCritic& a = ckpt.agent;
    w.bytes(kCheckpointMagic, sizeof kCheckpointMagic);
    w.u32(kCheckpointVersion);
    w.str(ckpt.scenario_hash);
    w.u32(static_cast<std::uint32_t>(a.num_prices()));
    w.f64(a.ell_max());
    write_sizes(w, a.actor.sizes());
    write_sizes(w, a.critic.sizes());
    w.vec(a.actor.params());
    w.vec(a.head.log_std);
    w.vec(a.critic.params());
    w.vec(a.active);
    w.u32(a.normalize_obs ? 1 : 0);
    write_stats(w, a.obs_stats);

    w.u32(ckpt.trainer ? 1 : 0);
    if (ckpt.trainer) {
      const TrainerSnapshot& t = *ckpt.trainer;
      w.f64(t.adam.lr);
      w.f64(t.adam.beta1);
      w.f64(t.adam.beta2);
      w.f64(t.adam.eps);
      w.vec(t.adam.m);
      w.vec(t.adam.v);
      w.i64(t.adam.t);
      w.f64(t.kl_beta);
      w.i64(t.updates);
      w.i64(t.env_steps);
      w.i64(t.iterations);
      w.str(t.shuffle_rng);
      write_stats(w, t.reward_scaler.stats);
      w.vec(t.reward_scaler.returns);
      w.f64(t.reward_scaler.gamma);
      w.u64(t.resets);
      w.u32(static_cast<std::uint32_t>(t.env_states.size()));
      for (std::size_t n = 0; n < t.env_states.size(); ++n) {
        w.str(t.action_rngs[n]);
        w.str(t.env_rngs[n]);
        const env::EnvState& s = t.env_states[n];
        w.i64(s.t);
        w.vec(s.p);
        write_counts(w, s.q);
        write_counts(w, s.s_veh);
        w.i64(t.env_episode_steps[n]);
      }
    }
    out.flush();
    if (!out) throw IoError("checkpoint write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place: " + ec.message());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  nn::BinaryReader r(in);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
    throw IoError(path.string() + " is not a checkpoint");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw IoError("unsupported checkpoint version " + std::to_string(version));

  Checkpoint ckpt;
  ckpt.scenario_hash = r.str();
  ActorCritic& a = ckpt.agent;
  const int num_prices = static_cast<int>(r.u32());
  const double ell_max = r.f64();
  a.set_action_map(num_prices, ell_max);
  a.actor = nn::Mlp(read_sizes(r));
  a.critic = nn::Mlp(read_sizes(r));
  if (a.critic.output_dim() != 1 || a.critic.input_dim() != a.actor.input_dim())
    throw IoError("checkpoint: actor and critic shapes disagree");
  a.actor.set_params(r.vec());
  a.head.log_std = r.vec();
  a.critic.set_params(r.vec());
  a.active = r.vec();
  if (a.head.log_std.size() != a.act_dim() || a.active.size() != a.act_dim())
    throw IoError("checkpoint: action head shape mismatch");
  a.normalize_obs = r.u32() != 0;
  a.obs_stats = read_stats(r);
  if (a.obs_stats.mean.size() != a.obs_dim()) throw IoError("checkpoint: normalizer shape mismatch");

  if (r.u32() != 0) {
    TrainerSnapshot t;
    t.adam.lr = r.f64();
    t.adam.beta1 = r.f64();
    t.adam.beta2 = r.f64();
    t.adam.eps = r.f64();
    t.adam.m = r.vec();
    t.adam.v = r.vec();
    t.adam.t = r.i64();
    if (t.adam.m.size() != a.param_count() || t.adam.v.size() != a.param_count())
      throw IoError("checkpoint: optimizer state shape mismatch");
    t.kl_beta = r.f64();
    t.updates = r.i64();
    t.env_steps = r.i64();
    t.iterations = r.i64();
    t.shuffle_rng = r.str();
    t.reward_scaler.stats = read_stats(r);
    t.reward_scaler.returns = r.vec();
    t.reward_scaler.gamma = r.f64();
    t.resets = r.u64();
    const std::uint32_t n = r.u32();
    if (n > 4096) throw IoError("checkpoint: too many env snapshots");
    for (std::uint32_t k = 0; k < n; ++k) {
      t.action_rngs.push_back(r.str());
      t.env_rngs.push_back(r.str());
      env::EnvState s;
      s.t = static_cast<int>(r.i64());
      s.p = r.vec();
      s.q = read_counts(r);
      s.s_veh = read_counts(r);
      t.env_states.push_back(std::move(s));
      t.env_episode_steps.push_back(static_cast<std::int32_t>(r.i64()));
    }
    ckpt.trainer = std::move(t);
  }
  return ckpt;
}

}  // namespace amod::ppo
