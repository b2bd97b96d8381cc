#pragma once

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "tde/register.hpp"
#include "tde/state.hpp"

namespace tde {

namespace detail {

inline Register concat(const Register& a, const Register& b) {
  for (const auto& s : b.slots())
    if (a.contains(s.id))
      throw SlotError("tensor product of registers that share slot " + to_string(s.id));
  std::vector<Slot> slots = a.slots();
  slots.insert(slots.end(), b.slots().begin(), b.slots().end());
  return Register(std::move(slots));
}

// Maps every basis index of `from` to the index of the same basis state in `to`, where
// to[k] = from[order[k]].
inline std::vector<std::size_t> permutation_map(const Register& from, const std::vector<std::size_t>& order) {
  std::vector<Slot> slots;
  slots.reserve(order.size());
  for (auto k : order) slots.push_back(from[k]);
  const Register to(std::move(slots));
  std::vector<std::size_t> map(from.dimension());
  std::vector<std::size_t> nd(order.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto d = from.digits(i);
    for (std::size_t k = 0; k < order.size(); ++k) nd[k] = d[order[k]];
    map[i] = to.index_of(nd);
  }
  return map;
}

inline std::vector<std::size_t> checked_order(const Register& reg, const std::vector<std::size_t>& order) {
  if (order.size() != reg.size())
    throw SlotError("permutation has " + std::to_string(order.size()) + " entries for a register of " +
                    std::to_string(reg.size()) + " slots");
  std::vector<bool> seen(order.size(), false);
  for (auto k : order) {
    if (k >= order.size() || seen[k]) throw SlotError("malformed slot permutation");
    seen[k] = true;
  }
  return order;
}

inline Register relabeled(const Register& reg, const std::string& site, int delta) {
  std::vector<Slot> slots = reg.slots();
  for (auto& s : slots)
    if (s.id.site == site) s.id.cycle += delta;
  for (std::size_t i = 0; i < slots.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (slots[i].id == slots[j].id)
        throw SlotError("relabeling site " + site + " by " + std::to_string(delta) + " collides at slot " +
                        to_string(slots[i].id));
  return Register(std::move(slots));
}

}  // namespace detail

inline PureState tensor(const PureState& a, const PureState& b) {
  return PureState(detail::concat(a.reg(), b.reg()), linalg::kron(a.amplitudes(), b.amplitudes()));
}

inline DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator(detail::concat(a.reg(), b.reg()), linalg::kron(a.matrix(), b.matrix()));
}

template <typename State>
State tensor_all(const std::vector<State>& parts) {
  if (parts.empty()) throw DomainError("tensor product of zero states");
  State out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = tensor(out, parts[i]);
  return out;
}

// Reduced state on `keep`; kept slots retain their original relative order.
inline DensityOperator partial_trace(const DensityOperator& rho, const std::vector<SlotId>& keep) {
  const Register& reg = rho.reg();
  std::vector<std::size_t> kept;
  for (const auto& id : keep) {
    const auto p = reg.position(id);
    if (std::find(kept.begin(), kept.end(), p) != kept.end())
      throw SlotError("slot " + to_string(id) + " listed twice in partial trace");
    kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end());
  std::vector<bool> is_kept(reg.size(), false);
  for (auto p : kept) is_kept[p] = true;

  std::vector<Slot> out_slots;
  for (auto p : kept) out_slots.push_back(reg[p]);
  const Register out_reg(std::move(out_slots));

  const std::size_t n = reg.dimension();
  std::vector<std::size_t> kept_index(n);
  std::vector<std::size_t> traced_index(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = reg.digits(i);
    std::size_t k = 0;
    std::size_t t = 0;
    for (std::size_t s = 0; s < reg.size(); ++s) {
      const auto dim = static_cast<std::size_t>(reg[s].dim);
      if (is_kept[s])
        k = k * dim + d[s];
      else
        t = t * dim + d[s];
    }
    kept_index[i] = k;
    traced_index[i] = t;
  }

  const auto m = static_cast<Eigen::Index>(out_reg.dimension());
  Matrix out = Matrix::Zero(m, m);
  const Matrix& full = rho.matrix();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (traced_index[i] == traced_index[j])
        out(static_cast<Eigen::Index>(kept_index[i]), static_cast<Eigen::Index>(kept_index[j])) +=
            full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return DensityOperator(out_reg, std::move(out));
}

inline DensityOperator partial_trace(const PureState& psi, const std::vector<SlotId>& keep) {
  return partial_trace(to_density(psi), keep);
}

// Time translation in the clock-cycle model: a relabeling of the site's cycles.
inline PureState relabel_cycles(const PureState& psi, const std::string& site, int delta) {
  return PureState(detail::relabeled(psi.reg(), site, delta), psi.amplitudes());
}

inline DensityOperator relabel_cycles(const DensityOperator& rho, const std::string& site, int delta) {
  return DensityOperator(detail::relabeled(rho.reg(), site, delta), rho.matrix());
}

// Reorders slots so that new slot k is old slot order[k].
inline PureState permute_slots(const PureState& psi, const std::vector<std::size_t>& order) {
  const auto map = detail::permutation_map(psi.reg(), detail::checked_order(psi.reg(), order));
  std::vector<Slot> slots;
  for (auto k : order) slots.push_back(psi.reg()[k]);
  Vector out(psi.amplitudes().size());
  for (std::size_t i = 0; i < map.size(); ++i)
    out(static_cast<Eigen::Index>(map[i])) = psi.amplitudes()(static_cast<Eigen::Index>(i));
  return PureState(Register(std::move(slots)), std::move(out));
}

inline DensityOperator permute_slots(const DensityOperator& rho, const std::vector<std::size_t>& order) {
  const auto map = detail::permutation_map(rho.reg(), detail::checked_order(rho.reg(), order));
  std::vector<Slot> slots;
  for (auto k : order) slots.push_back(rho.reg()[k]);
  const auto n = static_cast<Eigen::Index>(map.size());
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out(static_cast<Eigen::Index>(map[static_cast<std::size_t>(i)]),
          static_cast<Eigen::Index>(map[static_cast<std::size_t>(j)])) = rho.matrix()(i, j);
  return DensityOperator(Register(std::move(slots)), std::move(out));
}

// Reorders slots to match `new_order`, which must list every slot exactly once.
template <typename State>
State permute_slots(const State& s, const std::vector<SlotId>& new_order) {
  std::vector<std::size_t> order;
  order.reserve(new_order.size());
  for (const auto& id : new_order) order.push_back(s.reg().position(id));
  return permute_slots(s, order);
}

}  // namespace tde
