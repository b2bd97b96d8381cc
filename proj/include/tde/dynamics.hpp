#pragma once

#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "tde/registers.hpp"

namespace tde {

// A qubit gate: a unitary on the logical {0,1} subspace of `arity` slots, first target most
// significant. On dimension-3 slots any basis component with a participating slot in vac is
// left untouched.
class Gate {
 public:
  Gate(std::string name, Matrix unitary) : name_(std::move(name)), u_(std::move(unitary)) {
    const auto n = u_.rows();
    if (n != u_.cols() || n < 2 || (n & (n - 1)) != 0)
      throw InvariantViolation("gate " + name_ + " must be a square 2^k matrix");
    arity_ = 0;
    for (auto k = n; k > 1; k >>= 1) ++arity_;
    const double dev = linalg::max_abs(u_.adjoint() * u_ - Matrix::Identity(n, n));
    if (dev > tol::unitary) throw InvariantViolation("gate " + name_ + " is not unitary");
  }

  static Gate cnot() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    return Gate("CNOT", std::move(m));
  }
  static Gate x() {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return Gate("X", std::move(m));
  }
  static Gate z() {
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return Gate("Z", std::move(m));
  }
  static Gate h() {
    Matrix m(2, 2);
    const double s = 1.0 / std::numbers::sqrt2;
    m << s, s, s, -s;
    return Gate("H", std::move(m));
  }
  static Gate phase(double theta) {
    Matrix m = Matrix::Identity(2, 2);
    m(1, 1) = std::polar(1.0, theta);
    return Gate("PHASE", std::move(m));
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t arity() const noexcept { return arity_; }
  const Matrix& matrix() const noexcept { return u_; }

 private:
  std::string name_;
  Matrix u_;
  std::size_t arity_ = 0;
};

namespace detail {

// Full-register operator for `gate` on the slots at `positions`.
inline Matrix embed_gate(const Register& reg, const Gate& gate, const std::vector<std::size_t>& positions) {
  const auto n = static_cast<Eigen::Index>(reg.dimension());
  Matrix full = Matrix::Zero(n, n);
  const std::size_t k = positions.size();
  const auto& u = gate.matrix();
  for (Eigen::Index col = 0; col < n; ++col) {
    auto digits = reg.digits(static_cast<std::size_t>(col));
    bool vacuum = false;
    std::size_t in = 0;
    for (auto p : positions) {
      const bool three = reg[p].dim == 3;
      if (three && digits[p] == 0) vacuum = true;
      in = in * 2 + (three ? digits[p] - 1 : digits[p]);
    }
    if (vacuum) {
      full(col, col) = 1.0;
      continue;
    }
    for (std::size_t out = 0; out < (std::size_t{1} << k); ++out) {
      const Complex amp = u(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in));
      if (amp == Complex(0.0)) continue;
      for (std::size_t t = 0; t < k; ++t) {
        const std::size_t bit = (out >> (k - 1 - t)) & 1U;
        digits[positions[t]] = reg[positions[t]].dim == 3 ? bit + 1 : bit;
      }
      full(static_cast<Eigen::Index>(reg.index_of(digits)), col) += amp;
    }
  }
  return full;
}

inline std::vector<std::size_t> gate_positions(const Register& reg, const Gate& gate,
                                               const std::vector<SlotId>& targets) {
  if (targets.size() != gate.arity())
    throw DomainError("gate " + gate.name() + " takes " + std::to_string(gate.arity()) + " targets, got " +
                      std::to_string(targets.size()));
  std::vector<std::size_t> positions;
  for (const auto& t : targets) {
    const auto p = reg.position(t);
    if (std::find(positions.begin(), positions.end(), p) != positions.end())
      throw SlotError("gate " + gate.name() + " targets slot " + to_string(t) + " twice");
    positions.push_back(p);
  }
  for (const auto& t : targets)
    if (t.cycle != targets.front().cycle)
      throw CycleMisalignment("cycle misalignment: gate " + gate.name() + " couples " +
                              to_string(targets.front()) + " and " + to_string(t));
  return positions;
}

inline int common_cycle(const Register& reg) {
  if (reg.empty()) throw DomainError("state has no slots");
  const int c = reg[0].id.cycle;
  for (const auto& s : reg.slots())
    if (s.id.cycle != c) throw DomainError("expected a single-cycle state, found slots at several cycles");
  return c;
}

inline std::set<std::string> sites_of(const Register& reg) {
  std::set<std::string> out;
  for (const auto& s : reg.slots()) out.insert(s.id.site);
  return out;
}

template <typename State>
State shift_all(const State& s, int delta) {
  State out = s;
  for (const auto& site : sites_of(s.reg())) out = relabel_cycles(out, site, delta);
  return out;
}

inline void check_cycles(const std::vector<int>& cycles) {
  if (cycles.empty()) throw DomainError("expansion needs at least one cycle");
  for (std::size_t i = 1; i < cycles.size(); ++i) {
    if (cycles[i] == cycles[i - 1]) throw DomainError("duplicate cycle " + std::to_string(cycles[i]));
    if (cycles[i] < cycles[i - 1]) throw DomainError("expansion cycles must be strictly increasing");
  }
}

// Vector over the slot dimension that selects `level`.
inline Vector level_vector(BasisLevel level, int dim) {
  Vector v = Vector::Zero(dim);
  v(static_cast<Eigen::Index>(level_index(level, dim))) = 1.0;
  return v;
}

inline Register without(const Register& reg, std::size_t pos) {
  std::vector<Slot> slots;
  for (std::size_t i = 0; i < reg.size(); ++i)
    if (i != pos) slots.push_back(reg[i]);
  return Register(std::move(slots));
}

// For each basis index: (digit of the measured slot, index over the remaining slots).
inline std::vector<std::pair<std::size_t, std::size_t>> split_index(const Register& reg, std::size_t pos) {
  std::vector<std::pair<std::size_t, std::size_t>> out(reg.dimension());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto d = reg.digits(i);
    std::size_t rest = 0;
    for (std::size_t s = 0; s < reg.size(); ++s)
      if (s != pos) rest = rest * static_cast<std::size_t>(reg[s].dim) + d[s];
    out[i] = {d[pos], rest};
  }
  return out;
}

}  // namespace detail

// Applies `gate` to the slots `targets`. Every target must sit at the same clock cycle.
inline PureState apply_gate(const PureState& psi, const Gate& gate, const std::vector<SlotId>& targets) {
  const auto positions = detail::gate_positions(psi.reg(), gate, targets);
  return PureState(psi.reg(), detail::embed_gate(psi.reg(), gate, positions) * psi.amplitudes());
}

inline DensityOperator apply_gate(const DensityOperator& rho, const Gate& gate, const std::vector<SlotId>& targets) {
  const auto positions = detail::gate_positions(rho.reg(), gate, targets);
  const Matrix u = detail::embed_gate(rho.reg(), gate, positions);
  Matrix out = u * rho.matrix() * u.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityOperator(rho.reg(), std::move(out));
}

// How copies of a mixed input are correlated across the cycles they are expanded into.
//  coherent_history: each branch of a classically prepared ensemble is replicated identically
//                    on every cycle (a proper mixture).
//  uncorrelated_copies: an independent copy of the density operator per cycle (the reduced
//                    state of a larger entangled system).
enum class Correlation { coherent_history, uncorrelated_copies };

struct ExpansionPolicy {
  std::vector<int> cycles;
  Correlation correlation = Correlation::uncorrelated_copies;
};

inline PureState free_expansion(const PureState& psi, const std::vector<int>& cycles) {
  const int c0 = detail::common_cycle(psi.reg());
  detail::check_cycles(cycles);
  std::vector<PureState> copies;
  for (int c : cycles) copies.push_back(detail::shift_all(psi, c - c0));
  return tensor_all(copies);
}

inline DensityOperator free_expansion(const DensityOperator& rho, const ExpansionPolicy& policy) {
  if (policy.correlation == Correlation::coherent_history)
    throw DomainError("coherent-history expansion needs the preparation ensemble, not a density operator");
  const int c0 = detail::common_cycle(rho.reg());
  detail::check_cycles(policy.cycles);
  std::vector<DensityOperator> copies;
  for (int c : policy.cycles) copies.push_back(detail::shift_all(rho, c - c0));
  return tensor_all(copies);
}

inline DensityOperator free_expansion(const Ensemble& ensemble, const ExpansionPolicy& policy) {
  if (policy.correlation == Correlation::uncorrelated_copies) return free_expansion(ensemble.average(), policy);
  std::vector<Branch> expanded;
  for (const auto& b : ensemble.branches())
    expanded.push_back({b.probability, free_expansion(b.state, policy.cycles)});
  return Ensemble(std::move(expanded)).average();
}

namespace detail {

template <typename State>
std::pair<State, State> displaced_copies(const State& s, int tau, const std::string& dilated_site) {
  if (tau == 0) throw DomainError("displacement of zero cycles; use free_expansion");
  if (tau < 0) throw DomainError("displacement must be a positive number of cycles");
  common_cycle(s.reg());
  int count = 0;
  for (const auto& slot : s.reg().slots())
    if (slot.id.site == dilated_site) ++count;
  if (count != 1) throw SlotError("dilated site " + dilated_site + " must occupy exactly one slot");
  State copy_a = s;
  State copy_b = relabel_cycles(s, dilated_site, tau);
  for (const auto& site : sites_of(s.reg()))
    if (site != dilated_site) copy_a = relabel_cycles(copy_a, site, -tau);
  return {copy_a, copy_b};
}

}  // namespace detail

// Two-copy expansion of a single-cycle state at cycle t after `dilated_site` gains `tau` cycles:
// copy A puts the dilated site at t and every other site at t - tau, copy B puts the dilated
// site at t + tau and the others at t. Copy A's slots come first.
inline PureState displaced_expansion(const PureState& psi, int tau, const std::string& dilated_site) {
  auto [a, b] = detail::displaced_copies(psi, tau, dilated_site);
  return tensor(a, b);
}

inline DensityOperator displaced_expansion(const DensityOperator& rho, int tau, const std::string& dilated_site,
                                           Correlation correlation) {
  if (correlation == Correlation::coherent_history)
    throw DomainError("coherent-history expansion needs the preparation ensemble, not a density operator");
  auto [a, b] = detail::displaced_copies(rho, tau, dilated_site);
  return tensor(a, b);
}

inline DensityOperator displaced_expansion(const Ensemble& ensemble, int tau, const std::string& dilated_site,
                                           Correlation correlation) {
  if (correlation == Correlation::uncorrelated_copies)
    return displaced_expansion(ensemble.average(), tau, dilated_site, correlation);
  std::vector<Branch> expanded;
  for (const auto& b : ensemble.branches())
    expanded.push_back({b.probability, displaced_expansion(b.state, tau, dilated_site)});
  return Ensemble(std::move(expanded)).average();
}

// Cycle-filtering trace: keeps exactly the slots at `cycle`.
template <typename State>
DensityOperator measure_at_cycle(const State& s, int cycle) {
  const auto keep = s.reg().at_cycle(cycle);
  if (keep.empty()) throw SlotError("no slot at cycle " + std::to_string(cycle));
  return partial_trace(s, keep);
}

template <typename State>
struct MeasurementOutcome {
  double probability = 0.0;
  State post_state;
  std::string label;
};

inline constexpr double zero_probability = 1e-14;

// Projects `slot` onto the normalized vector `outcome` and removes it from the register.
inline MeasurementOutcome<PureState> project(const PureState& psi, const SlotId& slot, const Vector& outcome,
                                             std::string label = "custom") {
  const auto pos = psi.reg().position(slot);
  if (outcome.size() != psi.reg()[pos].dim) throw DomainError("projector dimension does not match slot " + to_string(slot));
  if (std::abs(outcome.norm() - 1.0) > tol::norm) throw DomainError("projection vector is not normalized");
  const Register rest = detail::without(psi.reg(), pos);
  const auto split = detail::split_index(psi.reg(), pos);
  Vector post = Vector::Zero(static_cast<Eigen::Index>(rest.dimension()));
  for (std::size_t i = 0; i < split.size(); ++i)
    post(static_cast<Eigen::Index>(split[i].second)) +=
        std::conj(outcome(static_cast<Eigen::Index>(split[i].first))) * psi.amplitudes()(static_cast<Eigen::Index>(i));
  const double p = post.squaredNorm();
  if (p <= zero_probability)
    throw ZeroProbabilityOutcome("outcome " + label + " on slot " + to_string(slot) + " has zero probability");
  return {p, PureState(rest, post / std::sqrt(p)), std::move(label)};
}

inline MeasurementOutcome<DensityOperator> project(const DensityOperator& rho, const SlotId& slot,
                                                   const Vector& outcome, std::string label = "custom") {
  const auto pos = rho.reg().position(slot);
  if (outcome.size() != rho.reg()[pos].dim) throw DomainError("projector dimension does not match slot " + to_string(slot));
  if (std::abs(outcome.norm() - 1.0) > tol::norm) throw DomainError("projection vector is not normalized");
  const Register rest = detail::without(rho.reg(), pos);
  const auto split = detail::split_index(rho.reg(), pos);
  const auto m = static_cast<Eigen::Index>(rest.dimension());
  Matrix post = Matrix::Zero(m, m);
  for (std::size_t i = 0; i < split.size(); ++i) {
    const Complex left = std::conj(outcome(static_cast<Eigen::Index>(split[i].first)));
    if (left == Complex(0.0)) continue;
    for (std::size_t j = 0; j < split.size(); ++j) {
      const Complex right = outcome(static_cast<Eigen::Index>(split[j].first));
      if (right == Complex(0.0)) continue;
      post(static_cast<Eigen::Index>(split[i].second), static_cast<Eigen::Index>(split[j].second)) +=
          left * rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * right;
    }
  }
  const double p = post.trace().real();
  if (p <= zero_probability)
    throw ZeroProbabilityOutcome("outcome " + label + " on slot " + to_string(slot) + " has zero probability");
  post /= p;
  post = 0.5 * (post + post.adjoint()).eval();
  return {p, DensityOperator(rest, std::move(post)), std::move(label)};
}

template <typename State>
MeasurementOutcome<State> project(const State& s, const SlotId& slot, BasisLevel level) {
  const int dim = s.reg()[s.reg().position(slot)].dim;
  return project(s, slot, detail::level_vector(level, dim), to_string(level));
}

struct JointOutcome {
  std::vector<BasisLevel> levels;
  double probability = 0.0;

  std::string label() const {
    std::string out;
    for (auto l : levels) out += to_string(l);
    return out;
  }
};

// Computational-basis readout of `slots` (in the order given).
template <typename State>
std::vector<JointOutcome> joint_outcome_distribution(const State& s, const std::vector<SlotId>& slots) {
  DensityOperator reduced = permute_slots(partial_trace(s, slots), slots);
  const Register& reg = reduced.reg();
  std::vector<JointOutcome> out;
  for (std::size_t i = 0; i < reg.dimension(); ++i) {
    const auto d = reg.digits(i);
    JointOutcome o;
    for (std::size_t k = 0; k < d.size(); ++k) o.levels.push_back(level_at(d[k], reg[k].dim));
    o.probability = std::max(0.0, reduced.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real());
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace tde
