#ifndef AMOD_MODEL_PRICE_PROCESS_HPP_
#define AMOD_MODEL_PRICE_PROCESS_HPP_

#include <Eigen/Dense>

#include "amod/common.hpp"
#include "amod/model/scenario.hpp"

namespace amod::model {

// Prices for period 0. Constant and mean-reverting start at the mean; the
// i.i.d. mode draws.
Eigen::VectorXd initial_prices(const PriceProcess& pp, Rng& rng);

// Prices for period t+1 given those of period t.
Eigen::VectorXd sample_prices(const PriceProcess& pp,
                              const Eigen::VectorXd& previous, Rng& rng);

}  // namespace amod::model

#endif  // AMOD_MODEL_PRICE_PROCESS_HPP_
