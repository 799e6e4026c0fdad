#include "amod/exp/presets.hpp"

#include <cmath>
#include <random>

namespace amod::exp {
namespace {

model::Scenario two_node() {
  model::Scenario s;
  s.m = 2;
  s.lambda = Eigen::MatrixXd{{0, 4}, {4, 0}};
  s.tau = Eigen::MatrixXi{{0, 2}, {2, 0}};
  s.v_trip = Eigen::MatrixXi::Zero(2, 2);
  s.v_max = 0;
  s.ell_max = 30.0;
  s.beta = 2.5;
  s.w = 2.0;
  s.fleet_size = 3;
  s.price.mode = model::PriceMode::kConstant;
  s.price.mean = Eigen::VectorXd::Zero(2);
  s.price.stddev = Eigen::VectorXd::Zero(2);
  return s;
}

model::Scenario two_node_electric() {
  model::Scenario s;
  s.m = 2;
  s.lambda = Eigen::MatrixXd{{0, 3}, {3, 0}};
  s.tau = Eigen::MatrixXi{{0, 1}, {1, 0}};
  s.v_trip = Eigen::MatrixXi{{0, 1}, {1, 0}};
  s.v_max = 2;
  s.ell_max = 30.0;
  s.beta = 0.1;
  s.w = 2.0;
  s.fleet_size = 12;
  s.price.mode = model::PriceMode::kIidLognormal;
  s.price.mean = Eigen::VectorXd::Constant(2, 4.0);
  s.price.stddev = Eigen::VectorXd::Constant(2, 4.0);
  s.price.p_min = 0.0;
  s.price.p_max = 30.0;
  return s;
}

// Gravity-style demand on random node weights, travel times from random
// planar positions.
model::Scenario city(int m, int v_max, int fleet, double beta, double demand_scale,
                     std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(m), y(m), mass(m);
  for (int i = 0; i < m; ++i) {
    x[i] = unit(rng);
    y[i] = unit(rng);
    mass[i] = 0.5 + unit(rng);
  }
  model::Scenario s;
  s.m = m;
  s.lambda = Eigen::MatrixXd::Zero(m, m);
  s.tau = Eigen::MatrixXi::Zero(m, m);
  s.v_trip = Eigen::MatrixXi::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const double dist = std::hypot(x[i] - x[j], y[i] - y[j]);
      s.tau(i, j) = 1 + static_cast<int>(std::floor(3.0 * dist));
      s.lambda(i, j) = std::round(100.0 * demand_scale * mass[i] * mass[j] / (1.0 + dist)) / 100.0;
      if (v_max > 0) s.v_trip(i, j) = std::min(v_max, 1 + static_cast<int>(std::floor(1.5 * dist)));
    }
  s.v_max = v_max;
  s.ell_max = 30.0;
  s.beta = beta;
  s.w = 2.0;
  s.fleet_size = fleet;
  s.price.mean = Eigen::VectorXd::Zero(m);
  s.price.stddev = Eigen::VectorXd::Zero(m);
  return s;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"two-node", "two-node-electric", "manhattan-like", "sf-like"};
}

model::Scenario make_preset(const std::string& name, std::uint64_t seed) {
  model::Scenario s;
  if (name == "two-node") {
    s = two_node();
  } else if (name == "two-node-electric") {
    s = two_node_electric();
  } else if (name == "manhattan-like") {
    s = city(10, 0, 1200, 2.5, 12.0, seed);
  } else if (name == "sf-like") {
    s = city(7, 5, 420, 0.1, 6.0, seed);
    s.price.mode = model::PriceMode::kMeanReverting;
    Rng rng(seed ^ 0x5eed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < s.m; ++i) {
      s.price.mean[i] = 2.0 + 2.0 * unit(rng);
      s.price.stddev[i] = 1.0;
    }
    s.price.kappa = 0.3;
    s.price.p_min = 0.0;
    s.price.p_max = 30.0;
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ValidationError("unknown preset '" + name + "' (known: " + known + ")");
  }
  model::validate(s);
  return s;
}

}  // namespace amod::exp
