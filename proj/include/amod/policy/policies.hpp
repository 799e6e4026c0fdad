#ifndef AMOD_POLICY_POLICIES_HPP_
#define AMOD_POLICY_POLICIES_HPP_

#include <memory>
#include <string>

#include "amod/env/env.hpp"
#include "amod/planner/randomized_policy.hpp"
#include "amod/planner/static_planner.hpp"

namespace amod::policy {

// Maps a state to a valid action. Implementations are immutable once built;
// act may draw from rng but touches nothing else.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual env::ActionVector act(const env::EnvState& state, Rng& rng) const = 0;
  virtual std::string name() const = 0;
  virtual bool is_stateful() const { return false; }
};

using PolicyPtr = std::shared_ptr<const Policy>;

// Fixed prices and routing simplices taken from a randomized static policy;
// the env samples each vehicle's fate from them.
class StaticPolicy : public Policy {
 public:
  StaticPolicy(const model::Scenario& scn, const planner::RandomizedStaticPolicy& rsp);

  env::ActionVector act(const env::EnvState& state, Rng& rng) const override;
  std::string name() const override { return "static"; }
  const env::ActionVector& action() const { return action_; }

 private:
  env::ActionVector action_;
};

// Randomizes an optimal plan and wraps it.
std::shared_ptr<StaticPolicy> make_static_policy(const model::Scenario& scn,
                                                 const planner::StaticPlan& plan);

// Base routing, prices multiplied by scale and clamped to [0, ell_max].
class ScaledStaticPolicy : public Policy {
 public:
  ScaledStaticPolicy(PolicyPtr base, double scale, double ell_max);

  env::ActionVector act(const env::EnvState& state, Rng& rng) const override;
  std::string name() const override;
  double scale() const { return scale_; }

 private:
  PolicyPtr base_;
  double scale_;
  double ell_max_;
};

struct SurgeConfig {
  double multiplier = 1.5;  // >= 1
  double threshold = 1.0;   // fraction of the induced rate, > 0

  void validate() const;
};

// Per OD pair: if q_ij > threshold * Lambda_ij(base price) the base price is
// multiplied (and clamped at ell_max). Routing is the base routing.
class SurgePolicy : public Policy {
 public:
  SurgePolicy(PolicyPtr base, SurgeConfig cfg, std::shared_ptr<const model::Scenario> scn);

  env::ActionVector act(const env::EnvState& state, Rng& rng) const override;
  std::string name() const override;
  bool is_stateful() const override { return true; }

 private:
  PolicyPtr base_;
  SurgeConfig cfg_;
  std::shared_ptr<const model::Scenario> scn_;
  env::Layout layout_;
};

// Every vehicle idles; prices fixed (default ell_max / 2 everywhere).
class FrozenPolicy : public Policy {
 public:
  explicit FrozenPolicy(const model::Scenario& scn, double price = -1.0);

  env::ActionVector act(const env::EnvState& state, Rng& rng) const override;
  std::string name() const override { return "frozen"; }

 private:
  env::ActionVector action_;
};

}  // namespace amod::policy

#endif  // AMOD_POLICY_POLICIES_HPP_
