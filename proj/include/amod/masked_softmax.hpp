#ifndef AMOD_MASKED_SOFTMAX_HPP_
#define AMOD_MASKED_SOFTMAX_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace amod {

// Softmax over the entries with mask[k] == true; masked entries get exactly
// zero. If nothing is allowed the output is all zeros.
inline void masked_softmax(std::span<const double> logits, std::span<const bool> mask,
                           std::span<double> out) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < logits.size(); ++k)
    if (mask[k]) top = std::max(top, logits[k]);
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = mask[k] ? std::exp(logits[k] - top) : 0.0;
    total += out[k];
  }
  if (total > 0.0)
    for (auto& v : out) v /= total;
}

// Vector-Jacobian product of masked_softmax: given probs and dL/dprobs,
// writes dL/dlogits. Masked entries receive zero.
inline void masked_softmax_backward(std::span<const double> probs,
                                    std::span<const double> grad_probs,
                                    std::span<const bool> mask,
                                    std::span<double> grad_logits) {
  double dot = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k)
    if (mask[k]) dot += probs[k] * grad_probs[k];
  for (std::size_t k = 0; k < probs.size(); ++k)
    grad_logits[k] = mask[k] ? probs[k] * (grad_probs[k] - dot) : 0.0;
}

}  // namespace amod

#endif  // AMOD_MASKED_SOFTMAX_HPP_
