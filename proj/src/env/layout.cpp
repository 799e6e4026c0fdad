#include "amod/env/env.hpp"

namespace amod::env {

Layout::Layout(const model::Scenario& scn) : m_(scn.m), v_max_(scn.v_max) {
  parked_.assign(static_cast<std::size_t>(m_) * (v_max_ + 1), -1);
  transit_start_.assign(static_cast<std::size_t>(m_) * m_, -1);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) {
      if (i == j) {
        for (int v = 0; v <= v_max_; ++v) {
          parked_[i * (v_max_ + 1) + v] = static_cast<int>(slots_.size());
          slots_.push_back({i, i, 0, v});
        }
        continue;
      }
      transit_start_[i * m_ + j] = static_cast<int>(slots_.size());
      for (int k = 1; k < scn.tau(i, j); ++k)
        for (int v = 0; v <= v_max_; ++v) slots_.push_back({i, j, k, v});
    }
}

int state_dim(const model::Scenario& scn) {
  long sum_tau = 0;
  for (int i = 0; i < scn.m; ++i)
    for (int j = 0; j < scn.m; ++j)
      if (i != j) sum_tau += scn.tau(i, j);
  const long m = scn.m;
  return static_cast<int>(m * m + (scn.v_max + 1) * (sum_tau - m * m + 2 * m));
}

int action_dim(const model::Scenario& scn) {
  const int m = scn.m;
  return m * m - m + (scn.v_max + 1) * (m * m + m);
}

bool EnvState::operator==(const EnvState& other) const {
  return t == other.t && p == other.p && q == other.q && s_veh == other.s_veh;
}

Count EnvState::total_queue() const {
  Count total = 0;
  for (Count x : q) total += x;
  return total;
}

Count EnvState::fleet() const {
  Count total = 0;
  for (Count x : s_veh) total += x;
  return total;
}

Eigen::VectorXd flatten(const EnvState& state) {
  const auto np = state.p.size();
  const auto nq = static_cast<Eigen::Index>(state.q.size());
  const auto ns = static_cast<Eigen::Index>(state.s_veh.size());
  Eigen::VectorXd out(np + nq + ns);
  out.head(np) = state.p;
  for (Eigen::Index k = 0; k < nq; ++k) out[np + k] = static_cast<double>(state.q[k]);
  for (Eigen::Index k = 0; k < ns; ++k) out[np + nq + k] = static_cast<double>(state.s_veh[k]);
  return out;
}

std::vector<double> ActionVector::flatten() const {
  std::vector<double> out(ell);
  out.insert(out.end(), alpha.begin(), alpha.end());
  return out;
}

}  // namespace amod::env
