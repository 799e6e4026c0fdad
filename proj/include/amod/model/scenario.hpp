#ifndef AMOD_MODEL_SCENARIO_HPP_
#define AMOD_MODEL_SCENARIO_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>

#include "amod/common.hpp"

namespace amod::model {

enum class PriceMode { kConstant, kIidLognormal, kMeanReverting };

std::string to_string(PriceMode mode);
PriceMode price_mode_from_string(const std::string& name);

// Exogenous electricity price process, one price per node.
//
//   constant        p_i(t) = mean_i
//   iid_lognormal   p_i(t) ~ LogNormal with E = mean_i, SD = stddev_i
//   mean_reverting  d(t+1) = (1 - kappa) * (d(t) + stddev_i * eps),
//                   p = mean + d, eps ~ N(0, 1)
//
// Every draw is clamped to [p_min, p_max].
struct PriceProcess {
  PriceMode mode = PriceMode::kConstant;
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
  double kappa = 0.5;
  double p_min = 0.0;
  double p_max = 1e9;

  bool operator==(const PriceProcess& other) const;
};

// Riders' willingness-to-pay distribution F on [0, ell_max]. Only the
// uniform family is available; it is the one the static planner can
// convexify.
struct WillingnessToPay {
  double ell_max = 1.0;

  double cdf(double price) const;
};

// The problem instance: fully connected m-node network, nominal demand,
// trip times and energies, costs and the electricity price process.
// Immutable after loading.
struct Scenario {
  int m = 0;
  Eigen::MatrixXd lambda;  // riders per period, zero diagonal
  Eigen::MatrixXi tau;     // periods, >= 1 off the diagonal
  Eigen::MatrixXi v_trip;  // battery units per trip
  int v_max = 0;           // 0 selects the non-electric model
  double ell_max = 30.0;
  double beta = 0.1;  // per-vehicle per-period operating cost
  double w = 2.0;     // per-rider per-period waiting cost
  int fleet_size = 1;
  PriceProcess price;
  double period_minutes = 5.0;

  bool electric() const { return v_max > 0; }
  WillingnessToPay willingness() const { return WillingnessToPay{ell_max}; }

  bool operator==(const Scenario& other) const;
};

// Throws ValidationError naming the first violated invariant.
void validate(const Scenario& scn);

// Scenario text format (version 1): `key = value` lines, `#` comments, and
// matrix blocks
//
//   matrix lambda
//   0, 5
//   5, 0
//   end
//
// See docs/formats.md for the full schema.
Scenario parse_scenario(const std::string& text);
std::string format_scenario(const Scenario& scn);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scn, const std::filesystem::path& path);

// 64-bit FNV-1a of the canonical text form; used to tag emitted CSVs.
std::uint64_t scenario_hash(const Scenario& scn);
std::string scenario_hash_hex(const Scenario& scn);

// Reads a square numeric matrix exported from a trip dataset. Lines starting
// with '#' and a non-numeric header row are skipped.
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path);

// lambda_ij * (1 - F(price)); price is clamped into [0, ell_max] first.
double induced_rate(const Scenario& scn, int i, int j, double price);

}  // namespace amod::model

#endif  // AMOD_MODEL_SCENARIO_HPP_
