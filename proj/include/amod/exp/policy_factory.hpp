#ifndef AMOD_EXP_POLICY_FACTORY_HPP_
#define AMOD_EXP_POLICY_FACTORY_HPP_

#include <memory>
#include <optional>
#include <string>

#include "amod/planner/static_planner.hpp"
#include "amod/policy/policies.hpp"

namespace amod::exp {

// Resolves policy descriptors against one scenario:
//
//   static                  randomized optimal static policy
//   scaled-static:<s>       static prices times s
//   surge:<mult>:<thr>      surge pricing on top of static
//   frozen[:<price>]        every vehicle idles
//   rl:<checkpoint>         trained network, mean actions
//
// The static plan is solved on first use unless one was supplied.
class PolicyFactory {
 public:
  explicit PolicyFactory(std::shared_ptr<const model::Scenario> scn,
                         std::optional<planner::StaticPlan> plan = std::nullopt);

  policy::PolicyPtr make(const std::string& descriptor);
  const planner::StaticPlan& plan();

 private:
  std::shared_ptr<const model::Scenario> scn_;
  std::optional<planner::StaticPlan> plan_;
  policy::PolicyPtr static_;
};

}  // namespace amod::exp

#endif  // AMOD_EXP_POLICY_FACTORY_HPP_
