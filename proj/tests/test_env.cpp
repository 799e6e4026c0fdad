#include <doctest.h>

#include <map>
#include <random>
#include <sstream>

#include "amod/env/env.hpp"
#include "amod/exp/presets.hpp"
#include "oracles.hpp"

using namespace amod;
using env::Count;

namespace {

model::Scenario dims_instance(int m, int v_max, int tau) {
  model::Scenario s;
  s.m = m;
  s.v_max = v_max;
  s.lambda = Eigen::MatrixXd::Constant(m, m, 1.0);
  s.lambda.diagonal().setZero();
  s.tau = Eigen::MatrixXi::Constant(m, m, tau);
  s.tau.diagonal().setZero();
  s.v_trip = Eigen::MatrixXi::Constant(m, m, v_max > 0 ? 1 : 0);
  s.v_trip.diagonal().setZero();
  s.fleet_size = 10;
  s.price.mean = Eigen::VectorXd::Constant(m, 1.0);
  s.price.stddev = Eigen::VectorXd::Zero(m);
  return s;
}

env::ActionVector idle_action(const model::Scenario& s, double price) {
  env::Layout L(s);
  env::ActionVector a;
  a.ell.assign(L.num_od(), price);
  a.alpha.assign(L.action_dim() - L.num_od(), 0.0);
  for (int i = 0; i < s.m; ++i)
    for (int v = 0; v <= s.v_max; ++v) a.alpha[L.alpha_offset(i, v) - L.num_od() + i] = 1.0;
  return a;
}

void set_block(const env::Layout& L, env::ActionVector& a, int i, int v,
               std::vector<double> probs) {
  for (int e = 0; e < (int)probs.size(); ++e)
    a.alpha[L.alpha_offset(i, v) - L.num_od() + e] = probs[e];
}

}  // namespace

TEST_CASE("state and action dimensions") {
  const auto big = dims_instance(10, 5, 3);
  CHECK(env::state_dim(big) == 1240);
  CHECK(env::action_dim(big) == 750);
  const auto two = exp::make_preset("two-node");
  CHECK(env::state_dim(two) == 2 + 2 + 4);  // p, q, parked x2 and one stage each way
  CHECK(env::action_dim(two) == 2 + 2 * 3);
  env::Layout L(two);
  CHECK(L.num_vehicle_states() == 4);
  CHECK(L.od(0, 1) == 0);
  CHECK(L.od(1, 0) == 1);
  for (int k = 0; k < L.num_od(); ++k) CHECK(L.od(L.od_origin(k), L.od_destination(k)) == k);
  for (int s = 0; s < L.num_vehicle_states(); ++s) {
    const auto sl = L.slot(s);
    CHECK((sl.k == 0 ? L.parked(sl.i, sl.v) : L.transit(sl.i, sl.j, sl.k, sl.v)) == s);
  }
}

TEST_CASE("reset spreads the fleet evenly at full charge") {
  auto s = exp::make_preset("two-node-electric");
  s.fleet_size = 13;
  Rng rng(1);
  const auto st = env::reset(s, rng);
  env::Layout L(s);
  CHECK(st.t == 0);
  CHECK(st.fleet() == 13);
  CHECK(st.total_queue() == 0);
  CHECK(st.s_veh[L.parked(0, s.v_max)] == 7);
  CHECK(st.s_veh[L.parked(1, s.v_max)] == 6);
  env::ResetOptions custom;
  custom.parked = {13, 0, 0, 0, 0, 0};
  CHECK(env::reset(s, rng, custom).s_veh[L.parked(0, 0)] == 13);
  custom.parked = {1, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(env::reset(s, rng, custom), ValidationError);
}

TEST_CASE("action validation and sanitizing") {
  const auto s = exp::make_preset("two-node-electric");
  env::Layout L(s);
  auto a = idle_action(s, 10.0);
  CHECK_NOTHROW(env::validate_action(s, a));
  auto bad = a;
  bad.ell[0] = 31.0;
  CHECK_THROWS_AS(env::validate_action(s, bad), ValidationError);
  bad = a;
  set_block(L, bad, 0, 2, {0.0, 0.0, 1.0});  // charging a full battery
  CHECK_THROWS_AS(env::validate_action(s, bad), ValidationError);
  bad = a;
  set_block(L, bad, 0, 0, {0.0, 1.0, 0.0});  // no energy for the trip
  CHECK_THROWS_AS(env::validate_action(s, bad), ValidationError);
  bad = a;
  set_block(L, bad, 1, 1, {0.5, 0.6, 0.0});
  CHECK_THROWS_AS(env::validate_action(s, bad), ValidationError);
  bad = a;
  bad.alpha.pop_back();
  CHECK_THROWS_AS(env::validate_action(s, bad), DimensionError);

  std::vector<double> raw(L.action_dim(), 0.0);
  raw[0] = std::nan("");
  raw[1] = 99.0;
  const auto clean = env::sanitize_action(s, raw);
  CHECK(clean.ell[0] == 0.0);
  CHECK(clean.ell[1] == 30.0);
  CHECK_NOTHROW(env::validate_action(s, clean));
  const auto mask = env::action_mask(s);
  // v = 0 at node 0: idle and charge only.
  CHECK(clean.alpha[L.alpha_offset(0, 0) - L.num_od() + 1] == 0.0);
  CHECK(clean.alpha[L.alpha_offset(0, 0) - L.num_od() + 0] == doctest::Approx(0.5));
  CHECK_FALSE(mask[L.alpha_index(0, 0, 1)]);
  CHECK_FALSE(mask[L.alpha_index(0, 2, 2)]);
  CHECK(mask[L.alpha_index(0, 2, 1)]);
}

TEST_CASE("hand trace on the desk instance") {
  const auto s = exp::make_preset("two-node");  // tau 2, beta 2.5, w 2, N 3
  env::Layout L(s);
  Rng rng(5);
  auto st = env::reset(s, rng);
  REQUIRE(st.s_veh[L.parked(0, 0)] == 2);
  REQUIRE(st.s_veh[L.parked(1, 0)] == 1);

  // Send node 0's vehicles to node 1; nobody asks for rides at ell_max.
  auto a = idle_action(s, 30.0);
  set_block(L, a, 0, 0, {0.0, 1.0, 0.0});
  auto out = env::step(s, L, st, a, rng);
  CHECK(out.next.t == 1);
  CHECK(out.next.s_veh[L.transit(0, 1, 1, 0)] == 2);
  CHECK(out.routed[L.od(0, 1)] == 2);
  CHECK(out.breakdown.trip_cost == doctest::Approx(-5.0));
  CHECK(out.breakdown.transit_cost == 0.0);
  CHECK(out.reward == doctest::Approx(-5.0));

  // They arrive the next period and pay the transit cost on the way.
  out = env::step(s, L, out.next, idle_action(s, 30.0), rng);
  CHECK(out.next.s_veh[L.parked(1, 0)] == 3);
  CHECK(out.breakdown.transit_cost == doctest::Approx(-5.0));
  CHECK(out.reward == doctest::Approx(-5.0));

  // A queue of 4 with no service pays w per rider and grows by arrivals.
  auto q = out.next;
  q.q[L.od(0, 1)] = 4;
  out = env::step(s, L, q, idle_action(s, 0.0), rng);
  CHECK(out.breakdown.queue_cost == doctest::Approx(-8.0));
  CHECK(out.next.q[L.od(0, 1)] == 4 + out.arrivals[L.od(0, 1)]);
  CHECK(out.breakdown.revenue == 0.0);
}

TEST_CASE("charging moves a level up and pays beta plus the local price") {
  auto s = exp::make_preset("two-node-electric");
  s.price.mode = model::PriceMode::kConstant;
  s.price.mean << 3.0, 7.0;
  env::Layout L(s);
  Rng rng(2);
  env::ResetOptions r;
  r.parked = {0, 0, 0, 0, 5, 0};  // five empty vehicles at node 1
  r.parked = std::vector<Count>(6, 0);
  r.parked[1 * 3 + 0] = 5;
  r.parked[0 * 3 + 2] = 7;
  const auto st = env::reset(s, rng, r);
  auto a = idle_action(s, 30.0);
  set_block(L, a, 1, 0, {0.0, 0.0, 1.0});
  const auto out = env::step(s, L, st, a, rng);
  CHECK(out.next.s_veh[L.parked(1, 1)] == 5);
  CHECK(out.charge_units == 5);
  CHECK(out.electricity_spend == doctest::Approx(35.0));
  CHECK(out.breakdown.charging_cost == doctest::Approx(-5 * (0.1 + 7.0)));
}

TEST_CASE("one-period trips land parked with energy deducted") {
  const auto s = exp::make_preset("two-node-electric");  // tau 1, v_trip 1
  env::Layout L(s);
  Rng rng(2);
  auto st = env::reset(s, rng);
  auto a = idle_action(s, 30.0);
  set_block(L, a, 0, 2, {0.0, 1.0, 0.0});
  const auto out = env::step(s, L, st, a, rng);
  CHECK(out.next.s_veh[L.parked(1, 1)] == 6);
  CHECK(out.next.s_veh[L.parked(1, 2)] == 6);
  CHECK(out.next.s_veh[L.parked(0, 2)] == 0);
}

TEST_CASE("routing fates follow the action probabilities") {
  const auto s = exp::make_preset("two-node-electric");
  env::Layout L(s);
  Rng rng(9);
  const auto st = env::reset(s, rng);  // 6 vehicles at each node, full battery
  auto a = idle_action(s, 30.0);
  set_block(L, a, 0, 2, {0.5, 0.5, 0.0});
  double moved = 0.0;
  const int n = 40000;
  for (int k = 0; k < n; ++k) moved += env::step(s, L, st, a, rng).routed[L.od(0, 1)];
  // Binomial(6, 0.5): mean 3, sd of the average sqrt(1.5 / n).
  CHECK(std::abs(moved / n - 3.0) < 5.0 * std::sqrt(1.5 / n));
}

TEST_CASE("queue kernel is a distribution and matches simulation") {
  for (Count q : {0, 3}) {
    for (Count x : {0, 2, 5}) {
      double total = 0.0;
      for (Count k = 0; k < 80; ++k) total += env::queue_pmf(q, 1.7, x, k);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK(env::queue_pmf(2, 1.0, 1, 0) == 0.0);
  CHECK(env::queue_pmf(1, 1.0, 3, 0) == doctest::Approx(std::exp(-1.0) * (1 + 1 + 0.5)));

  // Three riders wait, two vehicles depart for sure, price gives Lambda = 1.5.
  auto s = exp::make_preset("two-node");
  s.tau(0, 1) = s.tau(1, 0) = 1;
  env::Layout L(s);
  Rng rng(4);
  auto st = env::reset(s, rng);
  st.q[L.od(0, 1)] = 3;
  auto a = idle_action(s, 30.0);
  a.ell[L.od(0, 1)] = 30.0 * (1.0 - 1.5 / 4.0);
  set_block(L, a, 0, 0, {0.0, 1.0, 0.0});
  std::map<Count, double> hist;
  const int n = 20000;
  for (int k = 0; k < n; ++k) hist[env::step(s, L, st, a, rng).next.q[L.od(0, 1)]] += 1.0 / n;
  std::vector<double> emp, ref;
  for (Count k = 0; k < 40; ++k) {
    emp.push_back(hist.count(k) ? hist[k] : 0.0);
    ref.push_back(env::queue_pmf(3, 1.5, 2, k));
  }
  CHECK(oracle::total_variation(emp, ref) < 0.02);
}

TEST_CASE("vehicle count is conserved under random actions") {
  auto s = exp::make_preset("sf-like");
  env::Layout L(s);
  Rng rng(17);
  std::normal_distribution<double> N(0.0, 3.0);
  auto st = env::reset(s, rng);
  std::vector<double> raw(L.action_dim());
  for (int t = 0; t < 2000; ++t) {
    for (auto& r : raw) r = N(rng) * 10.0;
    const auto out = env::step(s, L, st, env::sanitize_action(s, raw), rng);
    REQUIRE(out.next.fleet() == s.fleet_size);
    for (Count c : out.next.s_veh) REQUIRE(c >= 0);
    for (Count c : out.next.q) REQUIRE(c >= 0);
    st = out.next;
  }
}

TEST_CASE("same seed, same trajectory") {
  auto scn = std::make_shared<const model::Scenario>(exp::make_preset("two-node-electric"));
  auto run = [&](std::uint64_t seed) {
    env::AmodEnv e(scn);
    e.reset(seed);
    const auto a = idle_action(*scn, 12.0);
    for (int t = 0; t < 50; ++t) e.step(a);
    return e.state();
  };
  CHECK(run(3) == run(3));
  CHECK_FALSE(run(3) == run(4));
}

TEST_CASE("episodes end after the configured length and restore round trips") {
  auto scn = std::make_shared<const model::Scenario>(exp::make_preset("two-node"));
  env::EnvOptions o;
  o.episode_length = 3;
  env::AmodEnv e(scn, o);
  e.reset(1);
  const auto a = idle_action(*scn, 20.0);
  e.step(a);
  e.step(a);
  CHECK_FALSE(e.done());
  const auto saved = e.state();
  const Rng saved_rng = e.rng();
  e.step(a);
  CHECK(e.done());
  const auto after = e.state();
  e.restore(saved, saved_rng, 2);
  e.step(a);
  CHECK(e.state() == after);
  CHECK(e.done());
}

TEST_CASE("price response hook replaces the willingness to pay") {
  auto scn = std::make_shared<const model::Scenario>(exp::make_preset("two-node"));
  env::AmodEnv e(scn);
  e.reset(1);
  e.set_price_response([](int, int, double) { return 0.0; });
  for (int t = 0; t < 20; ++t) CHECK(e.step(idle_action(*scn, 0.0)).breakdown.revenue == 0.0);
}

TEST_CASE("trajectory writer emits one row per step") {
  const auto s = exp::make_preset("two-node");
  env::Layout L(s);
  Rng rng(1);
  std::ostringstream os;
  env::TrajectoryWriter w(os, s.m);
  auto st = env::reset(s, rng);
  for (int t = 0; t < 4; ++t) {
    auto out = env::step(s, L, st, idle_action(s, 15.0), rng);
    w.write(st, out);
    st = out.next;
  }
  const std::string text = os.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
  CHECK(text.rfind("t,reward,", 0) == 0);
}
