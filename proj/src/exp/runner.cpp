#include "amod/exp/runner.hpp"

#include <algorithm>
#include <exception>
#include <iomanip>
#include <numeric>
#include <thread>

namespace amod::exp {
namespace {

std::uint64_t policy_stream_seed(std::uint64_t seed) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

MetricsReport simulate(std::shared_ptr<const model::Scenario> scn, const policy::Policy& pol,
                       int horizon, std::uint64_t seed, std::ostream* trajectory,
                       const env::ResetOptions& reset) {
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  env::EnvOptions opts;
  opts.reset = reset;
  env::AmodEnv env(scn, opts);
  env.reset(seed);
  Rng policy_rng(policy_stream_seed(seed));
  MetricsReport rep;
  rep.policy = pol.name();
  rep.seed = seed;
  rep.reward.reserve(horizon);
  std::unique_ptr<env::TrajectoryWriter> writer;
  if (trajectory) writer = std::make_unique<env::TrajectoryWriter>(*trajectory, scn->m);
  for (int t = 0; t < horizon; ++t) {
    const env::EnvState before = env.state();
    const env::ActionVector action = pol.act(before, policy_rng);
    const env::StepOutcome out = env.step(action);
    rep.record(before, action, out);
    if (writer) writer->write(before, out);
  }
  rep.finish(env.state());
  return rep;
}

std::vector<MetricsReport> simulate_many(std::shared_ptr<const model::Scenario> scn,
                                         const policy::Policy& pol, int horizon,
                                         const std::vector<std::uint64_t>& seeds, int threads) {
  std::vector<MetricsReport> out(seeds.size());
  const int n = static_cast<int>(seeds.size());
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int k = 0; k < n; ++k) out[k] = simulate(scn, pol, horizon, seeds[k]);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int k = w; k < n; k += workers) out[k] = simulate(scn, pol, horizon, seeds[k]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

Summary summarize(const std::vector<MetricsReport>& reports) {
  Summary s;
  if (reports.empty()) return s;
  for (const auto& r : reports) {
    s.mean_reward += r.mean_reward;
    s.mean_queue += r.mean_queue;
    s.charge_price += r.charge_price;
  }
  const double n = static_cast<double>(reports.size());
  s.mean_reward /= n;
  s.mean_queue /= n;
  s.charge_price /= n;
  return s;
}

SweepResult surge_sweep(std::shared_ptr<const model::Scenario> scn, PolicyFactory& factory,
                        const std::vector<double>& multipliers,
                        const std::vector<double>& thresholds, int horizon,
                        const std::vector<std::uint64_t>& seeds, int threads) {
  SweepResult res;
  res.kind = "surge";
  res.baseline = summarize(simulate_many(scn, *factory.make("static"), horizon, seeds, threads));
  for (double mult : multipliers)
    for (double thr : thresholds) {
      policy::SurgePolicy pol(factory.make("static"), {mult, thr}, scn);
      res.cells.push_back({mult, thr, summarize(simulate_many(scn, pol, horizon, seeds, threads))});
    }
  return res;
}

SweepResult scale_sweep(std::shared_ptr<const model::Scenario> scn, PolicyFactory& factory,
                        const std::vector<double>& scales, int horizon,
                        const std::vector<std::uint64_t>& seeds, int threads) {
  SweepResult res;
  res.kind = "scale";
  res.baseline = summarize(simulate_many(scn, *factory.make("static"), horizon, seeds, threads));
  for (double s : scales) {
    policy::ScaledStaticPolicy pol(factory.make("static"), s, scn->ell_max);
    res.cells.push_back({s, 0.0, summarize(simulate_many(scn, pol, horizon, seeds, threads))});
  }
  return res;
}

std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (auto s : seeds) out += (out.empty() ? "" : " ") + std::to_string(s);
  return out;
}

void write_sweep(std::ostream& out, const SweepResult& sweep, const std::string& hash,
                 const std::vector<std::uint64_t>& seeds) {
  const bool surge = sweep.kind == "surge";
  out << "scenario_hash,seeds,kind," << (surge ? "multiplier,threshold" : "scale,unused")
      << ",mean_reward,mean_queue,charge_price\n";
  out << std::setprecision(17);
  const std::string s = join_seeds(seeds);
  out << hash << ',' << s << ",baseline,1,0," << sweep.baseline.mean_reward << ','
      << sweep.baseline.mean_queue << ',' << sweep.baseline.charge_price << '\n';
  for (const auto& c : sweep.cells)
    out << hash << ',' << s << ',' << sweep.kind << ',' << c.a << ',' << c.b << ','
        << c.summary.mean_reward << ',' << c.summary.mean_queue << ','
        << c.summary.charge_price << '\n';
}

void write_sweep_grid(std::ostream& out, const SweepResult& sweep) {
  std::vector<double> rows, cols;
  for (const auto& c : sweep.cells) {
    if (std::find(rows.begin(), rows.end(), c.a) == rows.end()) rows.push_back(c.a);
    if (std::find(cols.begin(), cols.end(), c.b) == cols.end()) cols.push_back(c.b);
  }
  out << std::setprecision(6);
  out << (sweep.kind == "surge" ? "multiplier\\threshold" : "scale");
  for (double c : cols)
    out << ',' << (sweep.kind == "surge" ? std::to_string(c) : std::string("reward/queue"));
  out << '\n';
  for (double r : rows) {
    out << r;
    for (double c : cols) {
      auto it = std::find_if(sweep.cells.begin(), sweep.cells.end(),
                             [&](const SweepCell& x) { return x.a == r && x.b == c; });
      out << ',';
      if (it != sweep.cells.end())
        out << it->summary.mean_reward << " / " << it->summary.mean_queue;
      else
        out << "NA";
    }
    out << '\n';
  }
}

void write_ranking(std::ostream& out, const std::vector<std::string>& names,
                   const std::vector<Summary>& summaries, const std::string& hash,
                   const std::vector<std::uint64_t>& seeds) {
  const std::size_t n = names.size();
  std::vector<std::size_t> by_reward(n), by_queue(n);
  std::iota(by_reward.begin(), by_reward.end(), 0);
  std::iota(by_queue.begin(), by_queue.end(), 0);
  std::stable_sort(by_reward.begin(), by_reward.end(), [&](auto a, auto b) {
    return summaries[a].mean_reward > summaries[b].mean_reward;
  });
  std::stable_sort(by_queue.begin(), by_queue.end(), [&](auto a, auto b) {
    return summaries[a].mean_queue < summaries[b].mean_queue;
  });
  std::vector<int> rank_r(n), rank_q(n);
  for (std::size_t k = 0; k < n; ++k) {
    rank_r[by_reward[k]] = static_cast<int>(k + 1);
    rank_q[by_queue[k]] = static_cast<int>(k + 1);
  }
  out << "scenario_hash,seeds,policy,mean_reward,mean_queue,charge_price,reward_rank,queue_rank\n";
  out << std::setprecision(17);
  for (std::size_t k : by_reward)
    out << hash << ',' << join_seeds(seeds) << ',' << names[k] << ','
        << summaries[k].mean_reward << ',' << summaries[k].mean_queue << ','
        << summaries[k].charge_price << ',' << rank_r[k] << ',' << rank_q[k] << '\n';
}

}  // namespace amod::exp
