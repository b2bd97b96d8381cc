#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tde/error.hpp"

namespace tde {

// One tensor factor: a spatial site label at an integer clock cycle.
struct SlotId {
  std::string site;
  int cycle = 0;

  friend bool operator==(const SlotId&, const SlotId&) = default;
  friend auto operator<=>(const SlotId&, const SlotId&) = default;
};

inline std::string to_string(const SlotId& id) {
  return "(" + id.site + "@" + std::to_string(id.cycle) + ")";
}

inline std::ostream& operator<<(std::ostream& os, const SlotId& id) { return os << to_string(id); }

// Levels of a single slot. Dimension-3 slots encode (vac, 0, 1) as indices (0, 1, 2);
// dimension-2 slots encode (0, 1) as (0, 1).
enum class BasisLevel { vac, zero, one };

inline std::string to_string(BasisLevel level) {
  switch (level) {
    case BasisLevel::vac: return "vac";
    case BasisLevel::zero: return "0";
    case BasisLevel::one: return "1";
  }
  return "?";
}

inline std::size_t level_index(BasisLevel level, int dim) {
  if (dim == 2) {
    if (level == BasisLevel::vac) throw DomainError("vacuum level requires a dimension-3 slot");
    return level == BasisLevel::zero ? 0 : 1;
  }
  if (dim == 3) {
    switch (level) {
      case BasisLevel::vac: return 0;
      case BasisLevel::zero: return 1;
      case BasisLevel::one: return 2;
    }
  }
  throw DomainError("slot dimension must be 2 or 3, got " + std::to_string(dim));
}

inline BasisLevel level_at(std::size_t index, int dim) {
  if (dim == 2 && index < 2) return index == 0 ? BasisLevel::zero : BasisLevel::one;
  if (dim == 3 && index < 3) {
    if (index == 0) return BasisLevel::vac;
    return index == 1 ? BasisLevel::zero : BasisLevel::one;
  }
  throw DomainError("level index out of range for slot dimension");
}

struct Slot {
  SlotId id;
  int dim = 2;

  friend bool operator==(const Slot&, const Slot&) = default;
};

// Ordered list of slots. The first slot is the most significant digit of the basis index.
class Register {
 public:
  Register() = default;

  explicit Register(std::vector<Slot> slots) : slots_(std::move(slots)) {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (slots_[i].dim != 2 && slots_[i].dim != 3)
        throw SlotError("slot " + to_string(slots_[i].id) + " has dimension " +
                        std::to_string(slots_[i].dim) + "; only 2 and 3 are supported");
      for (std::size_t j = 0; j < i; ++j)
        if (slots_[j].id == slots_[i].id)
          throw SlotError("slot " + to_string(slots_[i].id) + " appears twice in one register");
    }
  }

  static Register qubits(std::initializer_list<SlotId> ids) {
    std::vector<Slot> slots;
    for (const auto& id : ids) slots.push_back({id, 2});
    return Register(std::move(slots));
  }

  std::size_t size() const noexcept { return slots_.size(); }
  bool empty() const noexcept { return slots_.empty(); }
  const std::vector<Slot>& slots() const noexcept { return slots_; }
  const Slot& operator[](std::size_t i) const { return slots_.at(i); }

  std::size_t dimension() const noexcept {
    std::size_t d = 1;
    for (const auto& s : slots_) d *= static_cast<std::size_t>(s.dim);
    return d;
  }

  std::optional<std::size_t> find(const SlotId& id) const {
    for (std::size_t i = 0; i < slots_.size(); ++i)
      if (slots_[i].id == id) return i;
    return std::nullopt;
  }

  std::size_t position(const SlotId& id) const {
    if (auto p = find(id)) return *p;
    throw SlotError("slot " + to_string(id) + " is not in the register");
  }

  bool contains(const SlotId& id) const { return find(id).has_value(); }

  std::vector<SlotId> ids() const {
    std::vector<SlotId> out;
    out.reserve(slots_.size());
    for (const auto& s : slots_) out.push_back(s.id);
    return out;
  }

  // Slots whose cycle equals `cycle`, in register order.
  std::vector<SlotId> at_cycle(int cycle) const {
    std::vector<SlotId> out;
    for (const auto& s : slots_)
      if (s.id.cycle == cycle) out.push_back(s.id);
    return out;
  }

  std::vector<int> dims() const {
    std::vector<int> out;
    out.reserve(slots_.size());
    for (const auto& s : slots_) out.push_back(s.dim);
    return out;
  }

  // Mixed-radix digits of a basis index, most significant first.
  std::vector<std::size_t> digits(std::size_t index) const {
    std::vector<std::size_t> out(slots_.size());
    for (std::size_t k = slots_.size(); k-- > 0;) {
      const auto d = static_cast<std::size_t>(slots_[k].dim);
      out[k] = index % d;
      index /= d;
    }
    return out;
  }

  std::size_t index_of(std::span<const std::size_t> digits) const {
    if (digits.size() != slots_.size()) throw SlotError("digit count does not match register size");
    std::size_t index = 0;
    for (std::size_t k = 0; k < slots_.size(); ++k) {
      const auto d = static_cast<std::size_t>(slots_[k].dim);
      if (digits[k] >= d) throw SlotError("digit out of range for slot " + to_string(slots_[k].id));
      index = index * d + digits[k];
    }
    return index;
  }

  friend bool operator==(const Register&, const Register&) = default;

 private:
  std::vector<Slot> slots_;
};

// Basis index of a product of levels over `reg` (first slot most significant).
inline std::size_t basis_index(const Register& reg, std::span<const BasisLevel> levels) {
  if (levels.size() != reg.size()) throw SlotError("level count does not match register size");
  std::vector<std::size_t> digits(levels.size());
  for (std::size_t k = 0; k < levels.size(); ++k) digits[k] = level_index(levels[k], reg[k].dim);
  return reg.index_of(digits);
}

// Qubit-only shorthand: levels given as 0/1 bits.
inline std::size_t basis_index(std::initializer_list<int> bits) {
  std::size_t index = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw DomainError("qubit basis labels are 0 or 1");
    index = index * 2 + static_cast<std::size_t>(b);
  }
  return index;
}

}  // namespace tde
