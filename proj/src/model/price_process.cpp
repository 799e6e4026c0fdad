#include "amod/model/price_process.hpp"

#include <algorithm>
#include <cmath>

namespace amod::model {
namespace {

double lognormal_draw(double mean, double sd, Rng& rng) {
  if (sd <= 0.0) return mean;
  // Match the first two moments of the lognormal to (mean, sd).
  const double s2 = std::log1p((sd * sd) / (mean * mean));
  const double mu = std::log(mean) - 0.5 * s2;
  std::normal_distribution<double> normal(mu, std::sqrt(s2));
  return std::exp(normal(rng));
}

}  // namespace

Eigen::VectorXd initial_prices(const PriceProcess& pp, Rng& rng) {
  if (pp.mode == PriceMode::kIidLognormal) return sample_prices(pp, pp.mean, rng);
  return pp.mean.cwiseMax(pp.p_min).cwiseMin(pp.p_max);
}

Eigen::VectorXd sample_prices(const PriceProcess& pp,
                              const Eigen::VectorXd& previous, Rng& rng) {
  const Eigen::Index m = pp.mean.size();
  Eigen::VectorXd next(m);
  switch (pp.mode) {
    case PriceMode::kConstant:
      next = pp.mean;
      break;
    case PriceMode::kIidLognormal:
      for (Eigen::Index i = 0; i < m; ++i)
        next[i] = lognormal_draw(pp.mean[i], pp.stddev[i], rng);
      break;
    case PriceMode::kMeanReverting: {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Eigen::Index i = 0; i < m; ++i) {
        const double shock = pp.stddev[i] > 0.0 ? pp.stddev[i] * normal(rng) : 0.0;
        const double deviation = previous[i] - pp.mean[i];
        next[i] = pp.mean[i] + (1.0 - pp.kappa) * (deviation + shock);
      }
      break;
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) next[i] = std::clamp(next[i], pp.p_min, pp.p_max);
  return next;
}

}  // namespace amod::model
