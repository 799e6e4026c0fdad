#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "amod/exp/presets.hpp"
#include "amod/model/price_process.hpp"
#include "amod/model/scenario.hpp"

using namespace amod;
using model::Scenario;

namespace {

const char* kTwoNode = R"(# desk instance
version = 1
m = 2
v_max = 0
ell_max = 30
beta = 2.5
w = 2
fleet_size = 3
price.mode = constant
price.mean = 0
price.std = 0
matrix lambda
0, 4
4, 0
end
matrix tau
0, 2
2, 0
end
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

}  // namespace

TEST_CASE("scenario text parses with defaults and broadcast vectors") {
  const Scenario s = model::parse_scenario(kTwoNode);
  CHECK(s.m == 2);
  CHECK(s.lambda(0, 1) == 4.0);
  CHECK(s.tau(1, 0) == 2);
  CHECK(s.v_trip.isZero());
  CHECK(s.price.mean.size() == 2);
  CHECK_FALSE(s.electric());
}

TEST_CASE("scenario round trip keeps every field and the hash") {
  for (const auto& name : exp::preset_names()) {
    const Scenario s = exp::make_preset(name, 7);
    const Scenario back = model::parse_scenario(model::format_scenario(s));
    CHECK(back == s);
    CHECK(model::scenario_hash(back) == model::scenario_hash(s));
  }
  const auto tmp = std::filesystem::temp_directory_path() / "amod_scn_roundtrip.scn";
  const Scenario s = exp::make_preset("sf-like");
  model::save_scenario(s, tmp);
  CHECK(model::load_scenario(tmp) == s);
  std::filesystem::remove(tmp);
}

TEST_CASE("presets differ by seed only where synthetic") {
  CHECK(model::scenario_hash(exp::make_preset("two-node", 1)) ==
        model::scenario_hash(exp::make_preset("two-node", 2)));
  CHECK(model::scenario_hash(exp::make_preset("manhattan-like", 1)) !=
        model::scenario_hash(exp::make_preset("manhattan-like", 2)));
  CHECK_THROWS_AS(exp::make_preset("atlantis"), ValidationError);
}

TEST_CASE("malformed scenario text is rejected") {
  CHECK_THROWS_AS(model::parse_scenario(replace(kTwoNode, "m = 2", "")), ParseError);
  CHECK_THROWS_AS(model::parse_scenario(replace(kTwoNode, "version = 1", "version = 9")),
                  ParseError);
  CHECK_THROWS_AS(model::parse_scenario(replace(kTwoNode, "4, 0\nend", "4, 0")), ParseError);
  CHECK_THROWS_AS(model::parse_scenario(replace(kTwoNode, "0, 4\n", "0, 4, 1\n")), ParseError);
  CHECK_THROWS_AS(model::parse_scenario(replace(kTwoNode, "beta = 2.5", "beta = abc")),
                  ParseError);
  CHECK_THROWS_AS(model::parse_scenario(std::string(kTwoNode) + "colour = red\n"), ParseError);
  CHECK_THROWS_AS(model::parse_scenario(replace(kTwoNode, "0, 2\n2, 0", "0, 2.5\n2, 0")),
                  ParseError);
  CHECK_THROWS_AS(model::load_scenario("/nonexistent/dir/x.scn"), IoError);
}

TEST_CASE("invariant violations name the problem") {
  Scenario s = model::parse_scenario(kTwoNode);
  auto bad = [&](auto mutate) {
    Scenario c = s;
    mutate(c);
    CHECK_THROWS_AS(model::validate(c), ValidationError);
  };
  bad([](Scenario& c) { c.lambda(0, 1) = -1.0; });
  bad([](Scenario& c) { c.lambda(0, 0) = 1.0; });
  bad([](Scenario& c) { c.tau(0, 1) = 0; });
  bad([](Scenario& c) { c.fleet_size = 0; });
  bad([](Scenario& c) { c.ell_max = 0.0; });
  bad([](Scenario& c) { c.v_trip(0, 1) = 1; });  // above v_max = 0
  bad([](Scenario& c) { c.price.mean = Eigen::VectorXd::Zero(3); });
  CHECK_NOTHROW(model::validate(s));
}

TEST_CASE("induced rate follows the uniform willingness to pay") {
  const Scenario s = model::parse_scenario(kTwoNode);
  CHECK(model::induced_rate(s, 0, 1, 0.0) == doctest::Approx(4.0));
  CHECK(model::induced_rate(s, 0, 1, 7.5) == doctest::Approx(3.0));
  CHECK(model::induced_rate(s, 0, 1, 30.0) == doctest::Approx(0.0));
  CHECK(model::induced_rate(s, 0, 1, 45.0) == doctest::Approx(0.0));
  CHECK(model::induced_rate(s, 0, 1, -3.0) == doctest::Approx(4.0));
  CHECK(s.willingness().cdf(15.0) == doctest::Approx(0.5));
}

TEST_CASE("csv matrices skip comments and headers") {
  const auto tmp = std::filesystem::temp_directory_path() / "amod_lambda.csv";
  {
    std::ofstream f(tmp);
    f << "# exported\nfrom,a,b\n0,1.5\n2.5,0\n";
  }
  const Eigen::MatrixXd M = model::read_csv_matrix(tmp);
  CHECK(M.rows() == 2);
  CHECK(M(0, 1) == 1.5);
  CHECK(M(1, 0) == 2.5);
  std::filesystem::remove(tmp);
}

TEST_CASE("price processes") {
  Rng rng(3);
  model::PriceProcess pp;
  pp.mean = Eigen::VectorXd::Constant(2, 4.0);
  pp.stddev = Eigen::VectorXd::Constant(2, 2.0);

  SUBCASE("constant stays at the mean") {
    auto p = model::initial_prices(pp, rng);
    for (int t = 0; t < 10; ++t) p = model::sample_prices(pp, p, rng);
    CHECK(p[0] == 4.0);
  }
  SUBCASE("lognormal matches its first two moments") {
    pp.mode = model::PriceMode::kIidLognormal;
    const int n = 200000;
    double sum = 0, sq = 0;
    Eigen::VectorXd p = model::initial_prices(pp, rng);
    for (int t = 0; t < n; ++t) {
      p = model::sample_prices(pp, p, rng);
      sum += p[1];
      sq += p[1] * p[1];
    }
    const double mean = sum / n, sd = std::sqrt(sq / n - mean * mean);
    CHECK(std::abs(mean - 4.0) < 5 * 2.0 / std::sqrt(n));
    CHECK(sd == doctest::Approx(2.0).epsilon(0.03));
  }
  SUBCASE("mean reversion keeps the long-run mean and variance") {
    pp.mode = model::PriceMode::kMeanReverting;
    pp.kappa = 0.3;
    pp.p_min = -1e9;
    const int n = 400000;
    double sum = 0, sq = 0;
    Eigen::VectorXd p = model::initial_prices(pp, rng);
    CHECK(p[0] == 4.0);
    for (int t = 0; t < n; ++t) {
      p = model::sample_prices(pp, p, rng);
      sum += p[0];
      sq += p[0] * p[0];
    }
    const double mean = sum / n, var = sq / n - mean * mean;
    // Stationary variance of d' = a (d + s e) with a = 1 - kappa.
    const double a = 0.7;
    CHECK(mean == doctest::Approx(4.0).epsilon(0.02));
    CHECK(var == doctest::Approx(a * a * 4.0 / (1 - a * a)).epsilon(0.03));
  }
  SUBCASE("draws are clamped") {
    pp.mode = model::PriceMode::kIidLognormal;
    pp.p_min = 3.0;
    pp.p_max = 5.0;
    Eigen::VectorXd p = model::initial_prices(pp, rng);
    for (int t = 0; t < 1000; ++t) {
      p = model::sample_prices(pp, p, rng);
      CHECK(p.minCoeff() >= 3.0);
      CHECK(p.maxCoeff() <= 5.0);
    }
  }
}
