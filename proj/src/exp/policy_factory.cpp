#include "amod/exp/policy_factory.hpp"

#include "amod/ppo/agent.hpp"
#include "amod/ppo/checkpoint.hpp"

namespace amod::exp {
namespace {

double number(const std::string& text, const std::string& descriptor) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw ValidationError("bad number '" + text + "' in policy '" + descriptor + "'");
}

}  // namespace

PolicyFactory::PolicyFactory(std::shared_ptr<const model::Scenario> scn,
                             std::optional<planner::StaticPlan> plan)
    : scn_(std::move(scn)), plan_(std::move(plan)) {
  if (plan_ && (plan_->m() != scn_->m || plan_->v_max() != scn_->v_max))
    throw DimensionError("plan shape does not match the scenario");
}

const planner::StaticPlan& PolicyFactory::plan() {
  if (!plan_) {
    plan_ = planner::solve_static(*scn_);
    if (plan_->status != planner::PlanStatus::kOptimal)
      throw SolverError("static planner did not converge: " + plan_->message);
  }
  return *plan_;
}

policy::PolicyPtr PolicyFactory::make(const std::string& descriptor) {
  const auto colon = descriptor.find(':');
  const std::string head = descriptor.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : descriptor.substr(colon + 1);
  auto base = [&]() {
    if (!static_) static_ = policy::make_static_policy(*scn_, plan());
    return static_;
  };
  if (head == "static" && rest.empty()) return base();
  if (head == "scaled-static" && !rest.empty())
    return std::make_shared<policy::ScaledStaticPolicy>(base(), number(rest, descriptor),
                                                        scn_->ell_max);
  if (head == "surge") {
    const auto c2 = rest.find(':');
    if (c2 == std::string::npos)
      throw ValidationError("surge policy needs surge:<multiplier>:<threshold>");
    policy::SurgeConfig cfg{number(rest.substr(0, c2), descriptor),
                            number(rest.substr(c2 + 1), descriptor)};
    return std::make_shared<policy::SurgePolicy>(base(), cfg, scn_);
  }
  if (head == "frozen")
    return std::make_shared<policy::FrozenPolicy>(*scn_, rest.empty() ? -1.0 : number(rest, descriptor));
  if (head == "rl" && !rest.empty()) {
    ppo::Checkpoint ckpt = ppo::load_checkpoint(rest);
    auto agent = std::make_shared<const ppo::ActorCritic>(std::move(ckpt.agent));
    return std::make_shared<ppo::NeuralPolicy>(agent, scn_, true);
  }
  throw ValidationError("unknown policy '" + descriptor +
                        "' (expected static, scaled-static:<s>, surge:<mult>:<thr>, "
                        "frozen[:<price>] or rl:<checkpoint>)");
}

}  // namespace amod::exp
