#pragma once

#include <cmath>
#include <string>

#include "tde/measures.hpp"

namespace tde {

// Single-qubit density operator in population/coherence form:
//   g00 |0><0| + g11 |1><1| + g01 |0><1| + conj(g01) |1><0|
struct QubitDensity {
  double g00 = 1.0;
  double g11 = 0.0;
  Complex g01 = 0.0;

  QubitDensity() = default;
  QubitDensity(double p0, double p1, Complex coherence = 0.0) : g00(p0), g11(p1), g01(coherence) {
    if (std::abs(g00 + g11 - 1.0) > tol::trace) throw InvariantViolation("qubit populations do not sum to 1");
    if (g00 < -tol::trace || g11 < -tol::trace) throw InvariantViolation("negative qubit population");
    if (std::norm(g01) > g00 * g11 + 1e-12) throw InvariantViolation("qubit coherence exceeds sqrt(g00 g11)");
  }

  static QubitDensity pure(Complex alpha, Complex beta) {
    const double n = std::norm(alpha) + std::norm(beta);
    if (std::abs(n - 1.0) > tol::norm) throw InvariantViolation("qubit amplitudes are not normalized");
    return {std::norm(alpha), std::norm(beta), alpha * std::conj(beta)};
  }

  // Real superposition sqrt(1 - beta_sq)|0> + sqrt(beta_sq)|1>.
  static QubitDensity from_beta_sq(double beta_sq) {
    if (beta_sq < 0.0 || beta_sq > 1.0) throw DomainError("beta^2 must lie in [0, 1]");
    return pure(std::sqrt(1.0 - beta_sq), std::sqrt(beta_sq));
  }

  static QubitDensity from_operator(const DensityOperator& rho) {
    if (rho.reg().size() != 1 || rho.reg()[0].dim != 2) throw DomainError("expected a single qubit slot");
    const auto& m = rho.matrix();
    return {m(0, 0).real(), m(1, 1).real(), m(0, 1)};
  }

  Matrix matrix() const {
    Matrix m(2, 2);
    m << g00, g01, std::conj(g01), g11;
    return m;
  }

  DensityOperator on(SlotId slot) const { return DensityOperator(Register({{std::move(slot), 2}}), matrix()); }

  friend QubitDensity mix(double lambda, const QubitDensity& a, const QubitDensity& b) {
    if (lambda < 0.0 || lambda > 1.0) throw DomainError("mixing weight must lie in [0, 1]");
    return {lambda * a.g00 + (1 - lambda) * b.g00, lambda * a.g11 + (1 - lambda) * b.g11,
            lambda * a.g01 + (1 - lambda) * b.g01};
  }
};

// Control-copy populations p and target-copy populations q.
struct PopulationPair {
  double p0 = 1.0, p1 = 0.0;
  double q0 = 1.0, q1 = 0.0;

  PopulationPair(double control0, double control1, double target0, double target1)
      : p0(control0), p1(control1), q0(target0), q1(target1) {
    for (double x : {p0, p1, q0, q1})
      if (x < -tol::trace) throw InvariantViolation("negative population");
    if (std::abs(p0 + p1 - 1.0) > tol::trace || std::abs(q0 + q1 - 1.0) > tol::trace)
      throw InvariantViolation("populations do not sum to 1");
  }
};

// rho -> diag(g00^2 + g11^2, 2 g00 g11). Quadratic in the input; coherences are discarded.
inline QubitDensity nonlinear_map(const QubitDensity& rho) {
  return {rho.g00 * rho.g00 + rho.g11 * rho.g11, 2.0 * rho.g00 * rho.g11};
}

// Output of the second CNOT when control and target copies carry independent populations:
// the XOR convolution diag(p0 q0 + p1 q1, p0 q1 + p1 q0).
inline QubitDensity generalized_map(const PopulationPair& pq) {
  return {pq.p0 * pq.q0 + pq.p1 * pq.q1, pq.p0 * pq.q1 + pq.p1 * pq.q0};
}

// Displaced Bell pair read out at its measurement cycle: two maximally mixed qubits.
inline DensityOperator displaced_bell_channel(int cycle = 0, const std::string& site_a = "1",
                                              const std::string& site_b = "2") {
  return DensityOperator::maximally_mixed(Register::qubits({{site_a, cycle}, {site_b, cycle}}));
}

// || map(l a + (1-l) b) - (l map(a) + (1-l) map(b)) ||_1; zero for any linear map.
inline double nonlinearity_witness(const QubitDensity& a, const QubitDensity& b, double lambda) {
  const QubitDensity of_mixture = nonlinear_map(mix(lambda, a, b));
  const QubitDensity mixture_of = mix(lambda, nonlinear_map(a), nonlinear_map(b));
  const SlotId s{"out", 0};
  return trace_norm_distance(of_mixture.on(s), mixture_of.on(s));
}

}  // namespace tde
