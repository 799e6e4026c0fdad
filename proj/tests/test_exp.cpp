#include <doctest.h>

#include <sstream>

#include "amod/exp/metrics.hpp"
#include "amod/exp/policy_factory.hpp"
#include "amod/exp/presets.hpp"
#include "amod/exp/runner.hpp"

using namespace amod;

namespace {

std::shared_ptr<const model::Scenario> preset(const std::string& name) {
  return std::make_shared<const model::Scenario>(exp::make_preset(name));
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("running average and summary agree with the per-step series") {
  auto scn = preset("two-node-electric");
  exp::PolicyFactory f(scn);
  const auto r = exp::simulate(scn, *f.make("static"), 300, 5);
  REQUIRE(r.steps() == 300);
  double sum = 0.0, q = 0.0, spend = 0.0, units = 0.0;
  for (std::size_t t = 0; t < r.steps(); ++t) {
    sum += r.reward[t];
    q += r.total_queue[t];
    spend += r.electricity_spend[t];
    units += r.charge_units[t];
    CHECK(r.running_avg[t] == doctest::Approx(sum / (t + 1)));
  }
  CHECK(r.mean_reward == doctest::Approx(sum / 300));
  CHECK(r.mean_queue == doctest::Approx(q / 300));
  REQUIRE(units > 0);
  CHECK(r.charge_price == doctest::Approx(spend / units));
  for (std::size_t t = 1; t < r.steps(); ++t) CHECK(r.charging_cost[t] >= r.charging_cost[t - 1]);
}

TEST_CASE("simulation is reproducible per seed and threading does not matter") {
  auto scn = preset("two-node");
  exp::PolicyFactory f(scn);
  const auto pol = f.make("surge:1.5:1");
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4};
  const auto a = exp::simulate_many(scn, *pol, 200, seeds, 1);
  const auto b = exp::simulate_many(scn, *pol, 200, seeds, 3);
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    CHECK(a[k].reward == b[k].reward);
    CHECK(a[k].seed == seeds[k]);
  }
  CHECK(a[0].reward != a[1].reward);
}

TEST_CASE("csv writers") {
  auto scn = preset("two-node");
  exp::PolicyFactory f(scn);
  const auto r = exp::simulate(scn, *f.make("static"), 10, 1);
  std::ostringstream steps, summary;
  exp::write_steps_header(steps);
  exp::write_steps(steps, r, "abc");
  exp::write_summary_header(summary);
  exp::write_summary(summary, r, "abc");
  CHECK(count_lines(steps.str()) == 11);
  CHECK(count_lines(summary.str()) == 2);
  CHECK(steps.str().rfind("scenario_hash,policy,seed,t,", 0) == 0);
  CHECK(summary.str().find("\nabc,static,1,10,") != std::string::npos);
}

TEST_CASE("policy descriptors") {
  auto scn = preset("two-node");
  exp::PolicyFactory f(scn);
  CHECK(f.make("static")->name() == "static");
  CHECK(f.make("scaled-static:1.1")->name() == "scaled-static:1.1");
  CHECK(f.make("frozen")->name() == "frozen");
  CHECK_THROWS_AS(f.make("surge:1.5"), ValidationError);
  CHECK_THROWS_AS(f.make("scaled-static:x"), ValidationError);
  CHECK_THROWS_AS(f.make("greedy"), ValidationError);
  CHECK_THROWS_AS(f.make("rl:/no/such/file"), IoError);
}

TEST_CASE("sweeps fill every cell and rank consistently") {
  auto scn = preset("two-node");
  exp::PolicyFactory f(scn);
  const std::vector<std::uint64_t> seeds{1, 2};
  const auto sw = exp::surge_sweep(scn, f, {1.25, 2.0}, {0.5, 1.0, 2.0}, 200, seeds);
  CHECK(sw.cells.size() == 6);
  std::ostringstream grid, longform;
  exp::write_sweep_grid(grid, sw);
  exp::write_sweep(longform, sw, "h", seeds);
  CHECK(grid.str().find("NA") == std::string::npos);
  CHECK(count_lines(grid.str()) == 3);
  CHECK(count_lines(longform.str()) == 8);

  std::ostringstream rank;
  exp::write_ranking(rank, {"a", "b"}, {{1.0, 5.0, 0.0}, {2.0, 1.0, 0.0}}, "h", seeds);
  const std::string text = rank.str();
  CHECK(text.find("h,1 2,b,") < text.find("h,1 2,a,"));
}
