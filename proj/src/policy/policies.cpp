#include "amod/policy/policies.hpp"

#include <algorithm>
#include <cstdio>

namespace amod::policy {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

StaticPolicy::StaticPolicy(const model::Scenario& scn, const planner::RandomizedStaticPolicy& rsp) {
  if (rsp.m != scn.m || rsp.v_max != scn.v_max)
    throw DimensionError("static policy shape does not match the scenario");
  env::Layout layout(scn);
  action_.ell.resize(layout.num_od());
  for (int k = 0; k < layout.num_od(); ++k)
    action_.ell[k] = std::clamp(rsp.ell(layout.od_origin(k), layout.od_destination(k)), 0.0,
                                scn.ell_max);
  action_.alpha.assign(layout.action_dim() - layout.num_od(), 0.0);
  for (int i = 0; i < scn.m; ++i)
    for (int v = 0; v <= scn.v_max; ++v) {
      const int base = layout.alpha_offset(i, v) - layout.num_od();
      for (int j = 0; j < scn.m; ++j)
        action_.alpha[base + j] = j == i ? rsp.idle(i, v) : rsp.route(i, j, v);
      action_.alpha[base + scn.m] = rsp.charge(i, v);
    }
  env::validate_action(scn, action_);
}

env::ActionVector StaticPolicy::act(const env::EnvState&, Rng&) const { return action_; }

std::shared_ptr<StaticPolicy> make_static_policy(const model::Scenario& scn,
                                                 const planner::StaticPlan& plan) {
  return std::make_shared<StaticPolicy>(scn, planner::build_randomized_policy(plan));
}

ScaledStaticPolicy::ScaledStaticPolicy(PolicyPtr base, double scale, double ell_max)
    : base_(std::move(base)), scale_(scale), ell_max_(ell_max) {
  if (!(scale > 0.0)) throw ValidationError("price scale must be positive");
}

env::ActionVector ScaledStaticPolicy::act(const env::EnvState& state, Rng& rng) const {
  env::ActionVector a = base_->act(state, rng);
  for (double& price : a.ell) price = std::clamp(price * scale_, 0.0, ell_max_);
  return a;
}

std::string ScaledStaticPolicy::name() const { return "scaled-static:" + fmt(scale_); }

void SurgeConfig::validate() const {
  if (!(multiplier >= 1.0)) throw ValidationError("surge multiplier must be >= 1");
  if (!(threshold > 0.0)) throw ValidationError("surge threshold must be > 0");
}

SurgePolicy::SurgePolicy(PolicyPtr base, SurgeConfig cfg,
                         std::shared_ptr<const model::Scenario> scn)
    : base_(std::move(base)), cfg_(cfg), scn_(std::move(scn)), layout_(*scn_) {
  cfg_.validate();
}

env::ActionVector SurgePolicy::act(const env::EnvState& state, Rng& rng) const {
  env::ActionVector a = base_->act(state, rng);
  for (int k = 0; k < layout_.num_od(); ++k) {
    const double rate =
        model::induced_rate(*scn_, layout_.od_origin(k), layout_.od_destination(k), a.ell[k]);
    if (static_cast<double>(state.q[k]) > cfg_.threshold * rate)
      a.ell[k] = std::min(a.ell[k] * cfg_.multiplier, scn_->ell_max);
  }
  return a;
}

std::string SurgePolicy::name() const {
  return "surge:" + fmt(cfg_.multiplier) + ":" + fmt(cfg_.threshold);
}

FrozenPolicy::FrozenPolicy(const model::Scenario& scn, double price) {
  env::Layout layout(scn);
  const double p = price < 0.0 ? 0.5 * scn.ell_max : std::min(price, scn.ell_max);
  action_.ell.assign(layout.num_od(), p);
  action_.alpha.assign(layout.action_dim() - layout.num_od(), 0.0);
  for (int i = 0; i < scn.m; ++i)
    for (int v = 0; v <= scn.v_max; ++v)
      action_.alpha[layout.alpha_offset(i, v) - layout.num_od() + i] = 1.0;
}

env::ActionVector FrozenPolicy::act(const env::EnvState&, Rng&) const { return action_; }

}  // namespace amod::policy
