#pragma once

#include <cmath>

#include "tde/registers.hpp"

namespace tde {

// Von Neumann entropy in bits.
inline double von_neumann_entropy(const DensityOperator& rho) {
  double s = 0.0;
  for (double lambda : rho.eigenvalues())
    if (lambda > 0.0) s -= lambda * std::log2(lambda);
  return s;
}

// Tr|a - b| without the conventional factor 1/2, so the range is [0, 2].
inline double trace_norm_distance(const DensityOperator& a, const DensityOperator& b) {
  if (a.reg().dims() != b.reg().dims()) throw SlotError("trace distance between registers of different shape");
  double d = 0.0;
  for (double lambda : linalg::hermitian_eigenvalues(a.matrix() - b.matrix())) d += std::abs(lambda);
  return d;
}

inline double purity(const DensityOperator& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

inline double purity(const PureState& psi) { return purity(to_density(psi)); }

// <psi| rho |psi> for a pure reference state on the same register shape.
inline double fidelity(const PureState& psi, const DensityOperator& rho) {
  if (psi.reg().dims() != rho.reg().dims()) throw SlotError("fidelity between registers of different shape");
  return (psi.amplitudes().adjoint() * rho.matrix() * psi.amplitudes())(0, 0).real();
}

// S(A) + S(B) - S(AB) for a two-slot state; non-negative by subadditivity.
inline double subadditivity_margin(const DensityOperator& rho) {
  if (rho.reg().size() != 2)
    throw DomainError("subadditivity margin needs a two-slot state, got " + std::to_string(rho.reg().size()) +
                      " slots");
  const auto a = partial_trace(rho, {rho.reg()[0].id});
  const auto b = partial_trace(rho, {rho.reg()[1].id});
  return von_neumann_entropy(a) + von_neumann_entropy(b) - von_neumann_entropy(rho);
}

}  // namespace tde
