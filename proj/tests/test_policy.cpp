#include <doctest.h>

#include "amod/env/env.hpp"
#include "amod/exp/presets.hpp"
#include "amod/planner/static_planner.hpp"
#include "amod/policy/policies.hpp"

using namespace amod;

namespace {

struct Fixture {
  std::shared_ptr<const model::Scenario> scn =
      std::make_shared<const model::Scenario>(exp::make_preset("two-node"));
  std::shared_ptr<policy::StaticPolicy> base =
      policy::make_static_policy(*scn, planner::solve_static(*scn));
};

}  // namespace

TEST_CASE("static policy replays the randomized plan") {
  Fixture f;
  Rng rng(1);
  const auto st = env::reset(*f.scn, rng);
  const auto a = f.base->act(st, rng);
  CHECK_NOTHROW(env::validate_action(*f.scn, a));
  CHECK(a.ell[0] == doctest::Approx(24.375).epsilon(1e-6));
  env::Layout L(*f.scn);
  // Non-electric, symmetric: everyone parked at a node heads to the other.
  CHECK(a.alpha[L.alpha_offset(0, 0) - L.num_od() + 1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("unit surge and unit scale reproduce the base policy") {
  Fixture f;
  Rng rng(1);
  auto st = env::reset(*f.scn, rng);
  st.q = {100, 100};
  policy::SurgePolicy surge(f.base, {1.0, 1.0}, f.scn);
  policy::ScaledStaticPolicy scaled(f.base, 1.0, f.scn->ell_max);
  const auto b = f.base->act(st, rng);
  CHECK(surge.act(st, rng).ell == b.ell);
  CHECK(scaled.act(st, rng).ell == b.ell);
  CHECK(surge.act(st, rng).alpha == b.alpha);
}

TEST_CASE("surge arithmetic") {
  Fixture f;
  Rng rng(1);
  auto st = env::reset(*f.scn, rng);
  policy::SurgePolicy surge(f.base, {1.2, 1.0}, f.scn);
  // Base Lambda = 0.75, so the queue has to exceed 0.75 riders.
  st.q = {0, 1};
  const auto a = surge.act(st, rng);
  CHECK(a.ell[0] == doctest::Approx(24.375));
  CHECK(a.ell[1] == doctest::Approx(24.375 * 1.2));
  policy::SurgePolicy big(f.base, {2.0, 1.0}, f.scn);
  CHECK(big.act(st, rng).ell[1] == doctest::Approx(30.0));  // capped at ell_max
  CHECK(surge.name() == "surge:1.2:1");
  CHECK_THROWS_AS((policy::SurgePolicy(f.base, {0.9, 1.0}, f.scn)), ValidationError);
  CHECK_THROWS_AS((policy::SurgePolicy(f.base, {1.5, 0.0}, f.scn)), ValidationError);
}

TEST_CASE("scaled static multiplies and clamps") {
  Fixture f;
  Rng rng(1);
  const auto st = env::reset(*f.scn, rng);
  policy::ScaledStaticPolicy up(f.base, 1.1, f.scn->ell_max);
  policy::ScaledStaticPolicy way_up(f.base, 2.0, f.scn->ell_max);
  CHECK(up.act(st, rng).ell[0] == doctest::Approx(24.375 * 1.1));
  CHECK(way_up.act(st, rng).ell[0] == doctest::Approx(30.0));
  CHECK_THROWS_AS((policy::ScaledStaticPolicy(f.base, -1.0, 30.0)), ValidationError);
}

TEST_CASE("frozen policy idles everyone") {
  Fixture f;
  Rng rng(1);
  const auto st = env::reset(*f.scn, rng);
  policy::FrozenPolicy frozen(*f.scn);
  const auto a = frozen.act(st, rng);
  CHECK(a.ell[0] == doctest::Approx(15.0));
  const auto out = env::step(*f.scn, env::Layout(*f.scn), st, a, rng);
  CHECK(out.next.s_veh == st.s_veh);
}
