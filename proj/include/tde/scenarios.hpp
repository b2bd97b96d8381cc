#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tde/channel.hpp"
#include "tde/dynamics.hpp"
#include "tde/measures.hpp"

namespace tde {

// Named reals sampled at one abscissa value beta^2.
struct CurvePoint {
  double beta_sq = 0.0;
  std::vector<std::pair<std::string, double>> values;

  double value(const std::string& name) const {
    for (const auto& [k, v] : values)
      if (k == name) return v;
    throw DomainError("curve point has no value named " + name);
  }
};

// `steps` evenly spaced points covering [0, 1], both ends included.
inline std::vector<double> linear_grid(std::size_t steps) {
  if (steps < 2) throw DomainError("grid needs at least 2 points");
  std::vector<double> grid(steps);
  const double last = static_cast<double>(steps - 1);
  for (std::size_t k = 0; k < steps; ++k) grid[k] = static_cast<double>(k) / last;
  return grid;
}

namespace fig1 {
inline const std::string input_site = "1";
inline const std::string ancilla_site = "2";
// Cycle t at which the second CNOT and the readout happen.
inline constexpr int readout_cycle = 0;
}  // namespace fig1

struct CircuitReport {
  DensityOperator rho_s;    // input and ancilla after the first CNOT
  DensityOperator rho_d;    // both sites at the readout cycle, after displacement
  DensityOperator rho_out;  // ancilla site at the readout cycle
  DensityOperator full;     // every materialized slot after the second CNOT
  std::optional<PureState> full_pure;
  double entropy_s = 0.0;
  double entropy_d = 0.0;
  double entropy_out = 0.0;
  double entropy_full = 0.0;
};

namespace detail {

inline PureState to_input_slot(const PureState& input) {
  if (input.reg().size() != 1) throw DomainError("circuit input must be a single slot");
  return PureState(Register({{{fig1::input_site, fig1::readout_cycle}, input.reg()[0].dim}}), input.amplitudes());
}

// Input slot and |0> ancilla at the readout cycle, after the first CNOT.
inline PureState entangle_with_ancilla(const PureState& input) {
  const SlotId in{fig1::input_site, fig1::readout_cycle};
  const SlotId anc{fig1::ancilla_site, fig1::readout_cycle};
  const PureState pair = tensor(to_input_slot(input), PureState::basis(Register({{anc, 2}}), 0));
  return apply_gate(pair, Gate::cnot(), {in, anc});
}

inline DensityOperator entangle_with_ancilla(const DensityOperator& input) {
  if (input.reg().size() != 1) throw DomainError("circuit input must be a single slot");
  const SlotId in{fig1::input_site, fig1::readout_cycle};
  const SlotId anc{fig1::ancilla_site, fig1::readout_cycle};
  const DensityOperator relabeled(Register({{in, input.reg()[0].dim}}), input.matrix());
  const DensityOperator pair = tensor(relabeled, to_density(PureState::basis(Register({{anc, 2}}), 0)));
  return apply_gate(pair, Gate::cnot(), {in, anc});
}

inline void check_tau(int tau) {
  if (tau < 1) throw DomainError("displacement tau must be at least one cycle");
}

template <typename State>
CircuitReport finish_fig1(DensityOperator rho_s, const State& displaced, std::optional<PureState> pure_full = {}) {
  const SlotId in{fig1::input_site, fig1::readout_cycle};
  const SlotId anc{fig1::ancilla_site, fig1::readout_cycle};
  DensityOperator rho_d = measure_at_cycle(displaced, fig1::readout_cycle);
  const State after = apply_gate(displaced, Gate::cnot(), {in, anc});
  DensityOperator rho_out = partial_trace(after, {anc});
  DensityOperator full = [&] {
    if constexpr (std::is_same_v<State, PureState>)
      return to_density(after);
    else
      return after;
  }();
  if constexpr (std::is_same_v<State, PureState>) pure_full = after;
  CircuitReport r{rho_s, rho_d, rho_out, full, pure_full};
  r.entropy_s = von_neumann_entropy(r.rho_s);
  r.entropy_d = von_neumann_entropy(r.rho_d);
  r.entropy_out = von_neumann_entropy(r.rho_out);
  r.entropy_full = von_neumann_entropy(r.full);
  return r;
}

}  // namespace detail

// The nonlinear circuit on a pure input: CNOT onto a |0> ancilla, displacement of the input
// site by tau cycles, a cycle-aligned second CNOT, then readout of the ancilla.
inline CircuitReport run_fig1(const PureState& input, int tau = 1) {
  detail::check_tau(tau);
  const PureState psi_s = detail::entangle_with_ancilla(input);
  const PureState displaced = displaced_expansion(psi_s, tau, fig1::input_site);
  return detail::finish_fig1(to_density(psi_s), displaced);
}

// Mixed input treated as an improper mixture: independent copies per cycle.
inline CircuitReport run_fig1(const DensityOperator& input, int tau = 1) {
  detail::check_tau(tau);
  const DensityOperator rho_s = detail::entangle_with_ancilla(input);
  const DensityOperator displaced =
      displaced_expansion(rho_s, tau, fig1::input_site, Correlation::uncorrelated_copies);
  return detail::finish_fig1(rho_s, displaced);
}

inline CircuitReport run_fig1(const QubitDensity& input, int tau = 1) {
  return run_fig1(input.on({fig1::input_site, fig1::readout_cycle}), tau);
}

// Classically prepared ensemble of inputs: every branch is replicated across cycles.
inline CircuitReport run_fig1(const Ensemble& inputs, int tau = 1) {
  detail::check_tau(tau);
  std::vector<Branch> pairs;
  for (const auto& b : inputs.branches()) pairs.push_back({b.probability, detail::entangle_with_ancilla(b.state)});
  const Ensemble ensemble_s(std::move(pairs));
  const DensityOperator displaced =
      displaced_expansion(ensemble_s, tau, fig1::input_site, Correlation::coherent_history);
  return detail::finish_fig1(ensemble_s.average(), displaced);
}

inline PureState qubit_from_beta_sq(double beta_sq, const SlotId& slot = {fig1::input_site, fig1::readout_cycle}) {
  if (beta_sq < 0.0 || beta_sq > 1.0) throw DomainError("beta^2 must lie in [0, 1]");
  return PureState::qubit(slot, std::sqrt(1.0 - beta_sq), std::sqrt(beta_sq));
}

// Back end of the nonlinear circuit for an input site whose components already occupy
// cycles t - tau and t: the earlier component acts as the control copy and the later one as
// the target copy. Returns the ancilla at cycle t.
template <typename State>
DensityOperator fig1_back_end(const State& s, const std::string& site, const std::string& ancilla, int t, int tau) {
  detail::check_tau(tau);
  const SlotId early{site, t - tau};
  const SlotId late{site, t};
  const SlotId anc_early{ancilla, t - tau};
  const SlotId anc_late{ancilla, t};
  const PureState zeros = PureState::basis(Register({{anc_early, 2}, {anc_late, 2}}), 0);
  State x = [&] {
    if constexpr (std::is_same_v<State, PureState>)
      return tensor(s, zeros);
    else
      return tensor(s, to_density(zeros));
  }();
  x = apply_gate(x, Gate::cnot(), {early, anc_early});
  x = apply_gate(x, Gate::cnot(), {late, anc_late});
  x = relabel_cycles(x, site, tau);
  x = apply_gate(x, Gate::cnot(), {SlotId{site, t}, anc_late});
  return partial_trace(x, {anc_late});
}

struct ReverseReport {
  PureState final_state;
  DensityOperator recovered;  // the slot (input site, t + tau)
  double fidelity = 0.0;
  double min_purity = 1.0;
};

// Undoes the circuit from its four-slot pure state: dilate the ancilla site by tau so both
// copies line up, then a CNOT (input site as control) at each aligned cycle.
inline ReverseReport run_reverse(const PureState& input, int tau = 1) {
  const CircuitReport forward = run_fig1(input, tau);
  PureState x = *forward.full_pure;
  double min_purity = purity(x);
  x = relabel_cycles(x, fig1::ancilla_site, tau);
  min_purity = std::min(min_purity, purity(x));
  for (int c : {fig1::readout_cycle, fig1::readout_cycle + tau}) {
    x = apply_gate(x, Gate::cnot(), {SlotId{fig1::input_site, c}, SlotId{fig1::ancilla_site, c}});
    min_purity = std::min(min_purity, purity(x));
  }
  DensityOperator recovered = partial_trace(x, {SlotId{fig1::input_site, fig1::readout_cycle + tau}});
  const double f = fidelity(input, recovered);
  return {x, recovered, f, min_purity};
}

enum class AliceBasis { computational, diagonal };

inline std::string to_string(AliceBasis b) { return b == AliceBasis::computational ? "computational" : "diagonal"; }

struct BobOutcome {
  std::string label;
  double probability = 0.0;
  DensityOperator bob_output;
};

struct NoSignalReport {
  AliceBasis basis = AliceBasis::computational;
  std::vector<BobOutcome> outcomes;
  DensityOperator average;
  DensityOperator reduced_substitution;  // Bob fed rho_rb (x) rho_rb instead
  double max_pairwise_distance = 0.0;
};

namespace nosignal {
inline const std::string alice = "a";
inline const std::string bob = "b";
inline const std::string ancilla = "anc";
inline constexpr int t = 0;
}  // namespace nosignal

inline PureState bell_pair(const SlotId& first, const SlotId& second) {
  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::numbers::sqrt2;
  return PureState(Register::qubits({first, second}), std::move(v));
}

// Alice and Bob share entanglement at cycles t - tau and t; Alice measures her cycle-t slot,
// Bob runs his qubit through the nonlinear circuit.
inline NoSignalReport run_no_signaling(AliceBasis basis, int tau = 1) {
  using namespace nosignal;
  detail::check_tau(tau);
  const PureState pair = bell_pair({alice, t}, {bob, t});
  const PureState shared = free_expansion(pair, {t - tau, t});

  std::vector<std::pair<std::string, Vector>> outcomes;
  const double s = 1.0 / std::numbers::sqrt2;
  Vector v0(2), v1(2);
  if (basis == AliceBasis::computational) {
    v0 << 1.0, 0.0;
    v1 << 0.0, 1.0;
    outcomes = {{"0", v0}, {"1", v1}};
  } else {
    v0 << s, s;
    v1 << s, -s;
    outcomes = {{"+", v0}, {"-", v1}};
  }

  NoSignalReport report{basis, {}, DensityOperator::maximally_mixed(Register::qubits({{ancilla, t}})),
                        DensityOperator::maximally_mixed(Register::qubits({{ancilla, t}})), 0.0};
  Matrix avg = Matrix::Zero(2, 2);
  for (const auto& [label, vec] : outcomes) {
    const auto m = project(shared, SlotId{alice, t}, vec, label);
    DensityOperator out = fig1_back_end(m.post_state, bob, ancilla, t, tau);
    avg += m.probability * out.matrix();
    report.outcomes.push_back({label, m.probability, std::move(out)});
  }
  report.average = DensityOperator(report.outcomes.front().bob_output.reg(), avg);

  const DensityOperator rho_rb = partial_trace(pair, {SlotId{bob, t}});
  const DensityOperator bob_in = free_expansion(rho_rb, {{t - tau, t}, Correlation::uncorrelated_copies});
  report.reduced_substitution = fig1_back_end(bob_in, bob, ancilla, t, tau);

  for (std::size_t i = 0; i < report.outcomes.size(); ++i)
    for (std::size_t j = i + 1; j < report.outcomes.size(); ++j)
      report.max_pairwise_distance =
          std::max(report.max_pairwise_distance,
                   trace_norm_distance(report.outcomes[i].bob_output, report.outcomes[j].bob_output));
  return report;
}

struct ProprietyReport {
  DensityOperator proper;    // classical preparation, replicated per branch across cycles
  DensityOperator improper;  // ensemble average, independent copies per cycle
  double distance = 0.0;
};

inline ProprietyReport run_proper_vs_improper(const Ensemble& ensemble, int tau = 1) {
  DensityOperator proper = run_fig1(ensemble, tau).rho_out;
  DensityOperator improper = run_fig1(ensemble.average(), tau).rho_out;
  const double d = trace_norm_distance(proper, improper);
  return {std::move(proper), std::move(improper), d};
}

struct DecoherenceReport {
  DensityOperator state;
  std::vector<JointOutcome> joint;
};

// Displaced Bell pair read out at its measurement cycle.
inline DecoherenceReport run_decoherence(int tau = 1) {
  detail::check_tau(tau);
  const PureState pair = bell_pair({fig1::input_site, fig1::readout_cycle}, {fig1::ancilla_site, fig1::readout_cycle});
  const PureState displaced = displaced_expansion(pair, tau, fig1::input_site);
  DensityOperator rho = measure_at_cycle(displaced, fig1::readout_cycle);
  auto joint = joint_outcome_distribution(rho, rho.reg().ids());
  return {std::move(rho), std::move(joint)};
}

// Entropy bookkeeping for a classical mixture of vacuum (weight p_vac) and the superposition
// sqrt(1-beta^2)|0> + sqrt(beta^2)|1> on a three-level input slot. Columns per point:
// S_in, S_full (all cycles kept), S_rho_d (readout cycle only), S_out (ancilla only).
inline std::vector<CurvePoint> run_entropy_study(double p_vac, const std::vector<double>& grid, int tau = 1) {
  if (!(p_vac >= 0.0 && p_vac <= 1.0)) throw DomainError("p_vac must lie in [0, 1]");
  const Register in_reg({{{fig1::input_site, fig1::readout_cycle}, 3}});
  std::vector<CurvePoint> out;
  for (double beta_sq : grid) {
    if (beta_sq < 0.0 || beta_sq > 1.0) throw DomainError("beta^2 must lie in [0, 1]");
    Vector psi(3);
    psi << 0.0, std::sqrt(1.0 - beta_sq), std::sqrt(beta_sq);
    const Ensemble inputs({{p_vac, PureState::basis(in_reg, 0)}, {1.0 - p_vac, PureState(in_reg, psi)}});
    const CircuitReport r = run_fig1(inputs, tau);
    out.push_back({beta_sq,
                   {{"S_in", von_neumann_entropy(inputs.average())},
                    {"S_full", r.entropy_full},
                    {"S_rho_d", r.entropy_d},
                    {"S_out", r.entropy_out}}});
  }
  return out;
}

// Lab-frame time lost by a clock that travels for `coordinate_duration` at `speed_fraction` of c.
inline double dilation_from_round_trip(double coordinate_duration, double speed_fraction) {
  if (coordinate_duration < 0.0) throw DomainError("duration must be non-negative");
  if (!(speed_fraction >= 0.0)) throw DomainError("speed fraction must be non-negative");
  if (speed_fraction >= 1.0) throw DomainError("speed fraction must be below 1");
  return coordinate_duration * (1.0 - std::sqrt(1.0 - speed_fraction * speed_fraction));
}

}  // namespace tde
