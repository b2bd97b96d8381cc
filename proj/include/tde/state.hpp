#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tde/error.hpp"
#include "tde/register.hpp"

namespace tde {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

namespace tol {
inline constexpr double norm = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double hermitian = 1e-12;
inline constexpr double unitary = 1e-12;
// Eigenvalues in [-psd, 0) are rounding noise and clamp to zero.
inline constexpr double psd = 1e-10;
}  // namespace tol

namespace linalg {

// Eigenvalues of a hermitian matrix, ascending.
inline Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  if (m.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw InvariantViolation("hermitian eigensolver did not converge");
  return solver.eigenvalues();
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

}  // namespace linalg

// Unit-norm amplitude vector over a register.
class PureState {
 public:
  PureState(Register reg, Vector amplitudes) : reg_(std::move(reg)), amps_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amps_.size()) != reg_.dimension())
      throw InvariantViolation("amplitude count " + std::to_string(amps_.size()) +
                               " does not match register dimension " +
                               std::to_string(reg_.dimension()));
    const double n = amps_.norm();
    if (std::abs(n - 1.0) > tol::norm)
      throw InvariantViolation("pure state norm " + std::to_string(n) + " differs from 1");
  }

  // Rescales a nonzero vector to unit norm before validating.
  static PureState normalized(Register reg, Vector amplitudes) {
    const double n = amplitudes.norm();
    if (n == 0.0) throw InvariantViolation("cannot normalize the zero vector");
    return PureState(std::move(reg), amplitudes / n);
  }

  static PureState basis(Register reg, std::size_t index) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(reg.dimension()));
    if (index >= reg.dimension()) throw SlotError("basis index out of range");
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(std::move(reg), std::move(v));
  }

  // Single-slot state a|0> + b|1> (dim 2).
  static PureState qubit(SlotId id, Complex a, Complex b) {
    Vector v(2);
    v << a, b;
    return PureState(Register({{std::move(id), 2}}), std::move(v));
  }

  const Register& reg() const noexcept { return reg_; }
  const Vector& amplitudes() const noexcept { return amps_; }

 private:
  Register reg_;
  Vector amps_;
};

// Hermitian, unit-trace, positive semidefinite matrix over a register.
class DensityOperator {
 public:
  DensityOperator(Register reg, Matrix matrix) : reg_(std::move(reg)), m_(std::move(matrix)) {
    validate();
  }

  static DensityOperator maximally_mixed(Register reg) {
    const auto d = static_cast<Eigen::Index>(reg.dimension());
    return DensityOperator(std::move(reg), Matrix::Identity(d, d) / static_cast<double>(d));
  }

  const Register& reg() const noexcept { return reg_; }
  const Matrix& matrix() const noexcept { return m_; }

  // Eigenvalues with rounding noise in [-1e-10, 0) clamped to zero, ascending.
  Eigen::VectorXd eigenvalues() const {
    Eigen::VectorXd ev = linalg::hermitian_eigenvalues(m_);
    for (auto& x : ev)
      if (x < 0.0) x = 0.0;
    return ev;
  }

 private:
  void validate() const {
    const auto d = reg_.dimension();
    if (static_cast<std::size_t>(m_.rows()) != d || static_cast<std::size_t>(m_.cols()) != d)
      throw InvariantViolation("density matrix shape does not match register dimension " +
                               std::to_string(d));
    const double herm = linalg::max_abs(m_ - m_.adjoint());
    if (herm > tol::hermitian)
      throw InvariantViolation("density matrix is not hermitian (max deviation " +
                               std::to_string(herm) + ")");
    const Complex tr = m_.trace();
    if (std::abs(tr - Complex(1.0)) > tol::trace)
      throw InvariantViolation("density matrix trace " + std::to_string(tr.real()) + " differs from 1");
    const Eigen::VectorXd ev = linalg::hermitian_eigenvalues(m_);
    if (ev.size() > 0 && ev.minCoeff() < -tol::psd)
      throw InvariantViolation("density matrix has negative eigenvalue " + std::to_string(ev.minCoeff()));
  }

  Register reg_;
  Matrix m_;
};

inline DensityOperator to_density(const PureState& psi) {
  return DensityOperator(psi.reg(), psi.amplitudes() * psi.amplitudes().adjoint());
}

// Classically prepared mixture of pure states over a common register.
struct Branch {
  double probability = 0.0;
  PureState state;
};

class Ensemble {
 public:
  explicit Ensemble(std::vector<Branch> branches) : branches_(std::move(branches)) {
    if (branches_.empty()) throw DomainError("ensemble has no branches");
    double total = 0.0;
    for (const auto& b : branches_) {
      if (b.probability < 0.0) throw DomainError("ensemble probability is negative");
      if (!(b.state.reg() == branches_.front().state.reg()))
        throw SlotError("ensemble branches live on different registers");
      total += b.probability;
    }
    if (std::abs(total - 1.0) > tol::trace) throw DomainError("ensemble probabilities do not sum to 1");
  }

  const std::vector<Branch>& branches() const noexcept { return branches_; }
  const Register& reg() const { return branches_.front().state.reg(); }

  DensityOperator average() const {
    const auto d = static_cast<Eigen::Index>(reg().dimension());
    Matrix m = Matrix::Zero(d, d);
    for (const auto& b : branches_) m += b.probability * b.state.amplitudes() * b.state.amplitudes().adjoint();
    return DensityOperator(reg(), std::move(m));
  }

 private:
  std::vector<Branch> branches_;
};

}  // namespace tde
