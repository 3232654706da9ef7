// Copyright 2026 The wvqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wvqkd/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wvqkd/error.hpp"

namespace wvqkd {

Operator2 Operator2::adjoint() const {
  return {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])};
}

bool Operator2::approx_equal(const Operator2& other, double tol) const {
  for (std::size_t i = 0; i < m_.size(); ++i) {
    if (std::abs(m_[i].real() - other.m_[i].real()) > tol) return false;
    if (std::abs(m_[i].imag() - other.m_[i].imag()) > tol) return false;
  }
  return true;
}

bool Operator2::is_hermitian(double tol) const { return approx_equal(adjoint(), tol); }

std::array<double, 2> Operator2::hermitian_eigenvalues() const {
  const double a = m_[0].real();
  const double d = m_[3].real();
  const double mean = 0.5 * (a + d);
  const double half_gap = 0.5 * (a - d);
  const double r = std::sqrt(half_gap * half_gap + std::norm(m_[1]));
  return {mean - r, mean + r};
}

Operator2& Operator2::operator+=(const Operator2& rhs) {
  for (std::size_t i = 0; i < m_.size(); ++i) m_[i] += rhs.m_[i];
  return *this;
}

Operator2& Operator2::operator-=(const Operator2& rhs) {
  for (std::size_t i = 0; i < m_.size(); ++i) m_[i] -= rhs.m_[i];
  return *this;
}

Operator2& Operator2::operator*=(Complex s) {
  for (auto& v : m_) v *= s;
  return *this;
}

Operator2 operator*(const Operator2& a, const Operator2& b) {
  return {a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0), a(0, 0) * b(0, 1) + a(0, 1) * b(1, 1),
          a(1, 0) * b(0, 0) + a(1, 1) * b(1, 0), a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1)};
}

std::string_view to_string(Basis b) { return b == Basis::Z ? "Z" : "X"; }

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(Complex alpha, Complex beta) : alpha_(alpha), beta_(beta) {
  const double norm = std::norm(alpha) + std::norm(beta);
  if (std::abs(norm - 1.0) > kTolerance) {
    throw DomainError("PureState: amplitudes not normalized (norm^2 = " + std::to_string(norm) +
                      ")");
  }
}

PureState PureState::normalized(Complex alpha, Complex beta) {
  const double norm = std::sqrt(std::norm(alpha) + std::norm(beta));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DomainError("PureState: cannot normalize a zero or non-finite vector");
  }
  return PureState(alpha / norm, beta / norm, Unchecked{});
}

PureState PureState::basis_state(Basis basis, int bit) {
  if (basis == Basis::Z) {
    return bit == 0 ? PureState(1.0, 0.0, Unchecked{}) : PureState(0.0, 1.0, Unchecked{});
  }
  constexpr double h = std::numbers::sqrt2 / 2.0;
  return bit == 0 ? PureState(h, h, Unchecked{}) : PureState(h, -h, Unchecked{});
}

Complex PureState::inner(const PureState& other) const {
  return std::conj(alpha_) * other.alpha_ + std::conj(beta_) * other.beta_;
}

PureState PureState::orthogonal() const {
  return PureState(-std::conj(beta_), std::conj(alpha_), Unchecked{});
}

Operator2 PureState::projector() const {
  return {alpha_ * std::conj(alpha_), alpha_ * std::conj(beta_), beta_ * std::conj(alpha_),
          beta_ * std::conj(beta_)};
}

PureState PureState::apply(const Operator2& u) const {
  return PureState(u(0, 0) * alpha_ + u(0, 1) * beta_, u(1, 0) * alpha_ + u(1, 1) * beta_,
                   Unchecked{});
}

// ---------------------------------------------------------------------------
// DensityMatrix / Effect

DensityMatrix::DensityMatrix(const Operator2& op) : op_(op) {
  if (!op.is_hermitian()) throw DomainError("DensityMatrix: operator is not Hermitian");
  if (std::abs(op.trace().real() - 1.0) > kTolerance) {
    throw DomainError("DensityMatrix: trace is not 1");
  }
  if (op.hermitian_eigenvalues()[0] < -kTolerance) {
    throw DomainError("DensityMatrix: operator is not positive semidefinite");
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& state) {
  return DensityMatrix(state.projector());
}

DensityMatrix DensityMatrix::maximally_mixed() { return DensityMatrix(0.5 * Operator2::identity()); }

Effect::Effect(const Operator2& op) : op_(op) {
  if (!op.is_hermitian()) throw DomainError("Effect: operator is not Hermitian");
  const auto ev = op.hermitian_eigenvalues();
  if (ev[0] < -kTolerance || ev[1] > 1.0 + kTolerance) {
    throw DomainError("Effect: spectrum outside [0, 1]");
  }
}

Effect Effect::from_pure(const PureState& state) { return Effect(state.projector()); }

Effect Effect::complement() const { return Effect(Operator2::identity() - op_); }

// ---------------------------------------------------------------------------
// H projector family

std::string_view to_string(ProjectorChoice p) {
  switch (p.index()) {
    case 0: return "H+";
    case 1: return "H-";
    case 2: return "H+perp";
    default: return "H-perp";
  }
}

Effect h_projector(Sign sign, bool complement) {
  const double s = sign == Sign::plus ? 1.0 : -1.0;
  const double c = complement ? -1.0 : 1.0;
  const Operator2 axis = Operator2::pauli_x() + s * Operator2::pauli_z();
  const Operator2 half = 0.5 * Operator2::identity();
  return Effect(half + (0.5 * c / std::numbers::sqrt2) * axis);
}

PureState rank_one_eigenvector(const Effect& projector) {
  const Operator2& p = projector.op();
  const double n0 = std::norm(p(0, 0)) + std::norm(p(1, 0));
  const double n1 = std::norm(p(0, 1)) + std::norm(p(1, 1));
  Complex a = n0 >= n1 ? p(0, 0) : p(0, 1);
  Complex b = n0 >= n1 ? p(1, 0) : p(1, 1);
  // Phase convention: first nonzero component real and positive.
  const Complex lead = std::abs(a) > kTolerance ? a : b;
  const Complex phase = std::conj(lead) / std::abs(lead);
  return PureState::normalized(a * phase, b * phase);
}

PureState h_eigenvector(ProjectorChoice p) { return rank_one_eigenvector(h_projector(p)); }

// ---------------------------------------------------------------------------
// Channels and weak values

double born_probability(const DensityMatrix& state, const Effect& effect) {
  const double p = (effect.op() * state.op()).trace().real();
  return std::clamp(p, 0.0, 1.0);
}

Operator2 depolarize(const Operator2& op, double p) {
  if (!(p >= 0.0 && p <= 0.5)) {
    throw DomainError("depolarize: bit-error probability must lie in [0, 1/2]");
  }
  return (1.0 - 2.0 * p) * op + (p * op.trace()) * Operator2::identity();
}

DensityMatrix depolarize(const DensityMatrix& rho, double p) {
  return DensityMatrix(depolarize(rho.op(), p));
}

Effect depolarize(const Effect& effect, double p) { return Effect(depolarize(effect.op(), p)); }

Complex weak_value(const DensityMatrix& pre, const Effect& post, const Operator2& observable) {
  const Complex denom = (post.op() * pre.op()).trace();
  if (denom.real() <= kTolerance) throw OrthogonalPostSelection();
  return (post.op() * observable * pre.op()).trace() / denom;
}

const Operator2& pauli_matrix(Pauli p) {
  static const std::array<Operator2, 4> table = {Operator2::identity(), Operator2::pauli_x(),
                                                 Operator2::pauli_y(), Operator2::pauli_z()};
  return table[static_cast<std::size_t>(p)];
}

std::string_view to_string(Pauli p) {
  switch (p) {
    case Pauli::I: return "I";
    case Pauli::X: return "X";
    case Pauli::Y: return "Y";
    default: return "Z";
  }
}

}  // namespace wvqkd
