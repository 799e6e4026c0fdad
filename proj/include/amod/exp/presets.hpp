#ifndef AMOD_EXP_PRESETS_HPP_
#define AMOD_EXP_PRESETS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "amod/model/scenario.hpp"

namespace amod::exp {

// Built-in scenarios:
//   two-node           2 nodes, non-electric, lambda 4 each way, tau 2, fleet 3
//   two-node-electric  2 nodes, v_max 2, one unit per trip, i.i.d. lognormal
//                      electricity prices
//   manhattan-like     10 nodes, non-electric, fleet 1200, synthetic demand
//   sf-like            7 nodes, v_max 5, fleet 420, mean-reverting prices
// The seed only affects the synthetic matrices of the two city presets.
model::Scenario make_preset(const std::string& name, std::uint64_t seed = 1);
std::vector<std::string> preset_names();

}  // namespace amod::exp

#endif  // AMOD_EXP_PRESETS_HPP_
