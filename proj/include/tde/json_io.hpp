#pragma once

#include <json.hpp>

#include "tde/state.hpp"

namespace tde {

// {"slots":[{"site":"1","cycle":0,"dim":2},...],"matrix":[[[re,im],...],...]}
inline nlohmann::json slots_to_json(const Register& reg) {
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& s : reg.slots()) slots.push_back({{"site", s.id.site}, {"cycle", s.id.cycle}, {"dim", s.dim}});
  return slots;
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json to_json(const DensityOperator& rho) {
  return {{"slots", slots_to_json(rho.reg())}, {"matrix", matrix_to_json(rho.matrix())}};
}

inline nlohmann::json to_json(const PureState& psi) { return to_json(to_density(psi)); }

inline DensityOperator density_from_json(const nlohmann::json& j) {
  try {
    std::vector<Slot> slots;
    for (const auto& s : j.at("slots"))
      slots.push_back({{s.at("site").get<std::string>(), s.at("cycle").get<int>()}, s.at("dim").get<int>()});
    Register reg(std::move(slots));
    const auto& rows = j.at("matrix");
    const auto n = static_cast<Eigen::Index>(reg.dimension());
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n)
      throw InvariantViolation("matrix row count does not match register dimension");
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = rows.at(static_cast<std::size_t>(i));
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
        throw InvariantViolation("matrix row length does not match register dimension");
      for (Eigen::Index k = 0; k < n; ++k) {
        const auto& e = row.at(static_cast<std::size_t>(k));
        if (!e.is_array() || e.size() != 2) throw InvariantViolation("matrix entries must be [re, im] pairs");
        m(i, k) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
      }
    }
    return DensityOperator(std::move(reg), std::move(m));
  } catch (const nlohmann::json::exception& e) {
    throw InvariantViolation(std::string("malformed state encoding: ") + e.what());
  }
}

}  // namespace tde
