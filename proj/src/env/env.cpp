#include "amod/env/env.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <string>

#include "amod/masked_softmax.hpp"
#include "amod/model/price_process.hpp"

namespace amod::env {
namespace {

bool entry_allowed(const model::Scenario& scn, int i, int v, int entry) {
  if (entry == scn.m) return v < scn.v_max;  // charge
  if (entry == i) return true;               // idle
  return v >= scn.v_trip(i, entry);
}

Count draw_poisson(double rate, Rng& rng) {
  if (rate <= 0.0) return 0;
  std::poisson_distribution<Count> dist(rate);
  return dist(rng);
}

Count draw_binomial(Count n, double p, Rng& rng) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<Count> dist(n, p);
  return dist(rng);
}

double poisson_pmf(double rate, Count k) {
  if (k < 0) return 0.0;
  if (rate <= 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(k) * std::log(rate) - rate -
                  std::lgamma(static_cast<double>(k) + 1.0));
}

}  // namespace

std::vector<bool> action_mask(const model::Scenario& scn) {
  Layout layout(scn);
  std::vector<bool> mask(layout.action_dim(), true);
  for (int i = 0; i < scn.m; ++i)
    for (int v = 0; v <= scn.v_max; ++v)
      for (int e = 0; e <= scn.m; ++e) mask[layout.alpha_index(i, v, e)] = entry_allowed(scn, i, v, e);
  return mask;
}

void validate_action(const model::Scenario& scn, const ActionVector& action, double tol) {
  const int m = scn.m;
  const std::size_t n_od = static_cast<std::size_t>(m) * m - m;
  const std::size_t n_alpha = static_cast<std::size_t>(m) * (scn.v_max + 1) * (m + 1);
  if (action.ell.size() != n_od || action.alpha.size() != n_alpha)
    throw DimensionError("action has " + std::to_string(action.ell.size()) + " prices and " +
                         std::to_string(action.alpha.size()) + " routing entries, expected " +
                         std::to_string(n_od) + " and " + std::to_string(n_alpha));
  for (double price : action.ell)
    if (!std::isfinite(price) || price < 0.0 || price > scn.ell_max)
      throw ValidationError("price outside [0, ell_max]: " + std::to_string(price));
  for (int i = 0; i < m; ++i)
    for (int v = 0; v <= scn.v_max; ++v) {
      const std::size_t base = static_cast<std::size_t>(i * (scn.v_max + 1) + v) * (m + 1);
      double sum = 0.0;
      for (int e = 0; e <= m; ++e) {
        const double a = action.alpha[base + e];
        if (!std::isfinite(a) || a < 0.0 || a > 1.0 + tol)
          throw ValidationError("routing probability outside [0, 1] at node " +
                                std::to_string(i) + ", energy " + std::to_string(v));
        if (a != 0.0 && !entry_allowed(scn, i, v, e))
          throw ValidationError(e == m ? "charging at full battery at node " + std::to_string(i)
                                       : "trip " + std::to_string(i) + "->" + std::to_string(e) +
                                             " needs more energy than " + std::to_string(v));
        sum += a;
      }
      if (std::abs(sum - 1.0) > tol)
        throw ValidationError("routing simplex at node " + std::to_string(i) + ", energy " +
                              std::to_string(v) + " sums to " + std::to_string(sum));
    }
}

ActionVector sanitize_action(const model::Scenario& scn, std::span<const double> raw) {
  Layout layout(scn);
  if (static_cast<int>(raw.size()) != layout.action_dim())
    throw DimensionError("raw action length " + std::to_string(raw.size()) + ", expected " +
                         std::to_string(layout.action_dim()));
  ActionVector action;
  action.ell.resize(layout.num_od());
  for (int k = 0; k < layout.num_od(); ++k) {
    const double x = raw[k];
    action.ell[k] = std::isnan(x) ? 0.0 : std::clamp(x, 0.0, scn.ell_max);
  }
  action.alpha.assign(raw.size() - layout.num_od(), 0.0);
  const int block = scn.m + 1;
  std::unique_ptr<bool[]> mask(new bool[block]);
  for (int i = 0; i < scn.m; ++i)
    for (int v = 0; v <= scn.v_max; ++v) {
      const int off = layout.alpha_offset(i, v);
      for (int e = 0; e < block; ++e) mask[e] = entry_allowed(scn, i, v, e);
      masked_softmax(raw.subspan(off, block), std::span<const bool>(mask.get(), block),
                     std::span<double>(action.alpha.data() + (off - layout.num_od()), block));
    }
  return action;
}

EnvState reset(const model::Scenario& scn, Rng& rng, const ResetOptions& opts) {
  Layout layout(scn);
  EnvState s;
  s.t = 0;
  s.q.assign(layout.num_od(), 0);
  s.s_veh.assign(layout.num_vehicle_states(), 0);
  if (opts.parked.empty()) {
    const int base = scn.fleet_size / scn.m;
    const int extra = scn.fleet_size % scn.m;
    for (int i = 0; i < scn.m; ++i) s.s_veh[layout.parked(i, scn.v_max)] = base + (i < extra ? 1 : 0);
  } else {
    if (opts.parked.size() != static_cast<std::size_t>(scn.m) * (scn.v_max + 1))
      throw DimensionError("reset placement needs m * (v_max + 1) counts");
    Count total = 0;
    for (int i = 0; i < scn.m; ++i)
      for (int v = 0; v <= scn.v_max; ++v) {
        const Count c = opts.parked[i * (scn.v_max + 1) + v];
        if (c < 0) throw ValidationError("negative vehicle count in reset placement");
        s.s_veh[layout.parked(i, v)] = c;
        total += c;
      }
    if (total != scn.fleet_size)
      throw ValidationError("reset placement does not add up to the fleet size");
  }
  s.p = model::initial_prices(scn.price, rng);
  return s;
}

StepOutcome step(const model::Scenario& scn, const Layout& layout, const EnvState& state,
                 const ActionVector& action, Rng& rng, const PriceResponse& response) {
  validate_action(scn, action);
  const int m = scn.m;
  const int vm = scn.v_max;
  StepOutcome out;
  out.routed.assign(layout.num_od(), 0);
  out.arrivals.assign(layout.num_od(), 0);
  out.charging.assign(static_cast<std::size_t>(m) * (vm + 1), 0);
  EnvState& next = out.next;
  next.t = state.t + 1;
  next.q.assign(layout.num_od(), 0);
  next.s_veh.assign(layout.num_vehicle_states(), 0);

  // Vehicles already on the road at t.
  Count in_transit = 0;
  for (int s = 0; s < layout.num_vehicle_states(); ++s) {
    const Count n = state.s_veh[s];
    if (n == 0) continue;
    const auto& sl = layout.slot(s);
    if (sl.k == 0) continue;
    in_transit += n;
    if (sl.k + 1 < scn.tau(sl.i, sl.j))
      next.s_veh[layout.transit(sl.i, sl.j, sl.k + 1, sl.v)] += n;
    else
      next.s_veh[layout.parked(sl.j, sl.v)] += n;
  }

  // Parked vehicles pick a fate: outcomes are scanned in block order and
  // each takes a binomial share of what is left.
  Count departures = 0;
  double charging_cost = 0.0;
  for (int i = 0; i < m; ++i)
    for (int v = 0; v <= vm; ++v) {
      Count remaining = state.s_veh[layout.parked(i, v)];
      if (remaining == 0) continue;
      const std::size_t base = static_cast<std::size_t>(i * (vm + 1) + v) * (m + 1);
      int last = -1;
      for (int e = 0; e <= m; ++e)
        if (action.alpha[base + e] > 0.0) last = e;
      double mass = 1.0;
      for (int e = 0; e <= m && remaining > 0; ++e) {
        const double a = action.alpha[base + e];
        if (a <= 0.0) continue;
        const Count n = e == last ? remaining : draw_binomial(remaining, a / mass, rng);
        remaining -= n;
        mass -= a;
        if (n == 0) continue;
        if (e == m) {
          next.s_veh[layout.parked(i, v + 1)] += n;
          out.charging[i * (vm + 1) + v] += n;
          out.charge_units += n;
          out.electricity_spend += static_cast<double>(n) * state.p[i];
          charging_cost -= static_cast<double>(n) * (scn.beta + state.p[i]);
        } else if (e == i) {
          next.s_veh[layout.parked(i, v)] += n;
        } else {
          const int v_after = v - scn.v_trip(i, e);
          if (scn.tau(i, e) > 1)
            next.s_veh[layout.transit(i, e, 1, v_after)] += n;
          else
            next.s_veh[layout.parked(e, v_after)] += n;
          out.routed[layout.od(i, e)] += n;
          departures += n;
        }
      }
    }

  // Riders.
  double revenue = 0.0;
  Count queued = 0;
  for (int k = 0; k < layout.num_od(); ++k) {
    const int i = layout.od_origin(k), j = layout.od_destination(k);
    const double price = action.ell[k];
    const double rate = response ? response(i, j, price) : model::induced_rate(scn, i, j, price);
    const Count a = draw_poisson(rate, rng);
    out.arrivals[k] = a;
    revenue += price * static_cast<double>(a);
    queued += state.q[k];
    next.q[k] = std::max<Count>(0, state.q[k] + a - out.routed[k]);
  }

  out.breakdown.revenue = revenue;
  out.breakdown.queue_cost = -scn.w * static_cast<double>(queued);
  out.breakdown.charging_cost = charging_cost;
  out.breakdown.trip_cost = -scn.beta * static_cast<double>(departures);
  out.breakdown.transit_cost = -scn.beta * static_cast<double>(in_transit);
  out.reward = out.breakdown.total();

  next.p = model::sample_prices(scn.price, state.p, rng);
  return out;
}

double queue_pmf(Count q, double Lambda, Count x, Count q_next) {
  if (q < 0 || x < 0 || q_next < 0 || Lambda < 0.0) return 0.0;
  if (q_next > 0) return poisson_pmf(Lambda, q_next - q + x);
  const Count top = x - q;
  if (top < 0) return 0.0;
  double cdf = 0.0;
  for (Count k = 0; k <= top; ++k) cdf += poisson_pmf(Lambda, k);
  return std::min(cdf, 1.0);
}

AmodEnv::AmodEnv(std::shared_ptr<const model::Scenario> scn, EnvOptions opts)
    : scn_(std::move(scn)), opts_(std::move(opts)), layout_(*scn_) {
  model::validate(*scn_);
  reset(0);
}

const EnvState& AmodEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  state_ = env::reset(*scn_, rng_, opts_.reset);
  steps_in_episode_ = 0;
  return state_;
}

StepOutcome AmodEnv::step(const ActionVector& action) {
  StepOutcome out = env::step(*scn_, layout_, state_, action, rng_, response_);
  state_ = out.next;
  ++steps_in_episode_;
  return out;
}

void AmodEnv::restore(EnvState state, const Rng& rng, int steps_in_episode) {
  if (state.q.size() != static_cast<std::size_t>(layout_.num_od()) ||
      state.s_veh.size() != static_cast<std::size_t>(layout_.num_vehicle_states()) ||
      state.p.size() != scn_->m)
    throw DimensionError("saved env state does not fit the scenario");
  state_ = std::move(state);
  rng_ = rng;
  steps_in_episode_ = steps_in_episode;
}

bool AmodEnv::done() const {
  return opts_.episode_length > 0 && steps_in_episode_ >= opts_.episode_length;
}

TrajectoryWriter::TrajectoryWriter(std::ostream& out, int m) : out_(out), m_(m) {
  out_ << "t,reward,revenue,queue_cost,charging_cost,trip_cost,transit_cost,total_queue,charging";
  for (int i = 0; i < m_; ++i) out_ << ",p" << i;
  out_ << "\n";
}

void TrajectoryWriter::write(const EnvState& before, const StepOutcome& o) {
  out_ << std::setprecision(17) << before.t << ',' << o.reward << ',' << o.breakdown.revenue << ','
       << o.breakdown.queue_cost << ',' << o.breakdown.charging_cost << ','
       << o.breakdown.trip_cost << ',' << o.breakdown.transit_cost << ',' << before.total_queue()
       << ',' << o.charge_units;
  for (int i = 0; i < m_; ++i) out_ << ',' << before.p[i];
  out_ << "\n";
}

}  // namespace amod::env
