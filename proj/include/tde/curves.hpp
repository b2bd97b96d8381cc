#pragma once

#include <vector>

#include "tde/scenarios.hpp"

namespace tde {

// Distinguishability of |0> from sqrt(1-beta^2)|0> + sqrt(beta^2)|1>, before and after the
// nonlinear circuit. D_in_paper is the quoted input value 2 beta^2; D_in_tracenorm is the
// strict trace norm of the two input states (2 beta); D_out is simulated.
inline std::vector<CurvePoint> fig2_curves(const std::vector<double>& grid, int tau = 1) {
  const SlotId in{fig1::input_site, fig1::readout_cycle};
  const PureState zero = PureState::qubit(in, 1.0, 0.0);
  const DensityOperator zero_out = run_fig1(zero, tau).rho_out;
  std::vector<CurvePoint> out;
  out.reserve(grid.size());
  for (double beta_sq : grid) {
    const PureState psi = qubit_from_beta_sq(beta_sq, in);
    const double d_in = trace_norm_distance(to_density(zero), to_density(psi));
    const double d_out = trace_norm_distance(zero_out, run_fig1(psi, tau).rho_out);
    out.push_back({beta_sq, {{"D_in_paper", 2.0 * beta_sq}, {"D_in_tracenorm", d_in}, {"D_out", d_out}}});
  }
  return out;
}

enum class Trend { amplified, unchanged, reduced };

inline Trend classify(double d_in, double d_out, double tolerance) {
  if (d_out > d_in + tolerance) return Trend::amplified;
  if (d_out < d_in - tolerance) return Trend::reduced;
  return Trend::unchanged;
}

inline const char* to_string(Trend t) {
  switch (t) {
    case Trend::amplified: return "amplified";
    case Trend::unchanged: return "unchanged";
    case Trend::reduced: return "reduced";
  }
  return "?";
}

}  // namespace tde
