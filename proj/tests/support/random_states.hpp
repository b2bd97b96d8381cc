#pragma once

#include <random>

#include "tde/state.hpp"

namespace testing_support {

inline tde::Vector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  tde::Vector v(n);
  for (auto& x : v) x = tde::Complex(g(rng), g(rng));
  return v;
}

inline tde::PureState random_pure(std::mt19937_64& rng, const tde::Register& reg) {
  return tde::PureState::normalized(reg, random_vector(rng, static_cast<Eigen::Index>(reg.dimension())));
}

// Ginibre ensemble: G G^dagger / Tr. Full rank with probability 1.
inline tde::DensityOperator random_density(std::mt19937_64& rng, const tde::Register& reg, Eigen::Index rank = -1) {
  const auto n = static_cast<Eigen::Index>(reg.dimension());
  const Eigen::Index k = rank < 0 ? n : rank;
  tde::Matrix g(n, k);
  for (Eigen::Index c = 0; c < k; ++c) g.col(c) = random_vector(rng, n);
  tde::Matrix m = g * g.adjoint();
  m /= m.trace().real();
  m = 0.5 * (m + m.adjoint()).eval();
  return tde::DensityOperator(reg, m);
}

inline void expect_valid(const tde::DensityOperator& rho) {
  // Re-running the validating constructor throws on any violated invariant.
  tde::DensityOperator copy(rho.reg(), rho.matrix());
  (void)copy;
}

}  // namespace testing_support
