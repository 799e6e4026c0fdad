#include "amod/exp/metrics.hpp"

#include <algorithm>
#include <iomanip>

namespace amod::exp {

void MetricsReport::record(const env::EnvState& before, const env::ActionVector& action,
                           const env::StepOutcome& o) {
  reward.push_back(o.reward);
  const double n = static_cast<double>(reward.size());
  const double prev = running_avg.empty() ? 0.0 : running_avg.back();
  running_avg.push_back(prev + (o.reward - prev) / n);
  total_queue.push_back(static_cast<double>(before.total_queue()));
  charging_cost.push_back((charging_cost.empty() ? 0.0 : charging_cost.back()) -
                          o.breakdown.charging_cost);
  charge_units.push_back(static_cast<double>(o.charge_units));
  electricity_spend.push_back(o.electricity_spend);
  double price = 0.0;
  for (double p : action.ell) price += p;
  mean_price.push_back(action.ell.empty() ? 0.0 : price / static_cast<double>(action.ell.size()));
}

void MetricsReport::finish(const env::EnvState& final) {
  const double n = static_cast<double>(std::max<std::size_t>(1, reward.size()));
  mean_reward = 0.0;
  mean_queue = 0.0;
  double units = 0.0, spend = 0.0;
  for (std::size_t t = 0; t < reward.size(); ++t) {
    mean_reward += reward[t];
    mean_queue += total_queue[t];
    units += charge_units[t];
    spend += electricity_spend[t];
  }
  mean_reward /= n;
  mean_queue /= n;
  charge_price = units > 0 ? spend / units : 0.0;
  final_queue = final.total_queue();
  std::int64_t qmax = 0;
  for (auto q : final.q) qmax = std::max(qmax, q);
  max_queue_rate = static_cast<double>(qmax) / n;
}

void write_steps_header(std::ostream& out) {
  out << "scenario_hash,policy,seed,t,reward,running_avg,total_queue,charging_cost_cum,"
         "charge_units,electricity_spend,mean_price\n";
}

void write_steps(std::ostream& out, const MetricsReport& r, const std::string& hash) {
  out << std::setprecision(17);
  for (std::size_t t = 0; t < r.steps(); ++t)
    out << hash << ',' << r.policy << ',' << r.seed << ',' << t << ',' << r.reward[t] << ','
        << r.running_avg[t] << ',' << r.total_queue[t] << ',' << r.charging_cost[t] << ','
        << r.charge_units[t] << ',' << r.electricity_spend[t] << ',' << r.mean_price[t] << '\n';
}

void write_summary_header(std::ostream& out) {
  out << "scenario_hash,policy,seed,steps,mean_reward,mean_queue,charge_price,"
         "charging_cost,final_queue,max_queue_rate\n";
}

void write_summary(std::ostream& out, const MetricsReport& r, const std::string& hash) {
  out << std::setprecision(17) << hash << ',' << r.policy << ',' << r.seed << ',' << r.steps()
      << ',' << r.mean_reward << ',' << r.mean_queue << ',' << r.charge_price << ','
      << (r.charging_cost.empty() ? 0.0 : r.charging_cost.back()) << ',' << r.final_queue << ','
      << r.max_queue_rate << '\n';
}

}  // namespace amod::exp
