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

// Single-qubit linear algebra: operators, states, effects, the depolarizing
// channel and generalized weak values.
//
// Everything here is exact double-precision algebra on 2x2 complex matrices.
// Comparisons use a fixed absolute tolerance of 1e-12 on entries.

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string_view>

namespace wvqkd {

using Complex = std::complex<double>;

inline constexpr double kTolerance = 1e-12;

class Operator2 {
 public:
  constexpr Operator2() = default;
  constexpr Operator2(Complex a00, Complex a01, Complex a10, Complex a11)
      : m_{a00, a01, a10, a11} {}

  static Operator2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Operator2 zero() { return {}; }
  static Operator2 pauli_x() { return {0.0, 1.0, 1.0, 0.0}; }
  static Operator2 pauli_y() { return {0.0, Complex(0, -1), Complex(0, 1), 0.0}; }
  static Operator2 pauli_z() { return {1.0, 0.0, 0.0, -1.0}; }

  Complex operator()(int row, int col) const { return m_[2 * row + col]; }
  Complex& operator()(int row, int col) { return m_[2 * row + col]; }

  Complex trace() const { return m_[0] + m_[3]; }
  Complex determinant() const { return m_[0] * m_[3] - m_[1] * m_[2]; }
  Operator2 adjoint() const;

  bool approx_equal(const Operator2& other, double tol = kTolerance) const;
  bool is_hermitian(double tol = kTolerance) const;

  /// Eigenvalues of a Hermitian operator in ascending order.
  std::array<double, 2> hermitian_eigenvalues() const;

  Operator2& operator+=(const Operator2& rhs);
  Operator2& operator-=(const Operator2& rhs);
  Operator2& operator*=(Complex s);

  friend Operator2 operator+(Operator2 lhs, const Operator2& rhs) { return lhs += rhs; }
  friend Operator2 operator-(Operator2 lhs, const Operator2& rhs) { return lhs -= rhs; }
  friend Operator2 operator*(Operator2 lhs, Complex s) { return lhs *= s; }
  friend Operator2 operator*(Complex s, Operator2 rhs) { return rhs *= s; }
  friend Operator2 operator*(const Operator2& a, const Operator2& b);

 private:
  std::array<Complex, 4> m_{};
};

/// Encoding basis: Z = {|0>, |1>}, X = {|+>, |->}.
enum class Basis : std::uint8_t { Z, X };

inline Basis other(Basis b) { return b == Basis::Z ? Basis::X : Basis::Z; }
std::string_view to_string(Basis b);

/// Normalized qubit state alpha|0> + beta|1>.
class PureState {
 public:
  /// Throws DomainError unless |alpha|^2 + |beta|^2 = 1 within 1e-12.
  PureState(Complex alpha, Complex beta);

  /// Renormalizes; throws DomainError on a zero vector.
  static PureState normalized(Complex alpha, Complex beta);

  /// |0>, |1> for Z and |+>, |-> for X.
  static PureState basis_state(Basis basis, int bit);

  Complex alpha() const { return alpha_; }
  Complex beta() const { return beta_; }

  /// <this|other>
  Complex inner(const PureState& other) const;
  /// Orthogonal state with a fixed phase convention.
  PureState orthogonal() const;
  Operator2 projector() const;

  PureState apply(const Operator2& unitary) const;

 private:
  struct Unchecked {};
  PureState(Complex alpha, Complex beta, Unchecked) : alpha_(alpha), beta_(beta) {}

  Complex alpha_;
  Complex beta_;
};

class DensityMatrix {
 public:
  /// Throws DomainError unless Hermitian, unit trace and PSD (all within 1e-12).
  explicit DensityMatrix(const Operator2& op);
  static DensityMatrix from_pure(const PureState& state);
  static DensityMatrix maximally_mixed();

  const Operator2& op() const { return op_; }

 private:
  Operator2 op_;
};

/// POVM element: Hermitian with spectrum in [0, 1].
class Effect {
 public:
  explicit Effect(const Operator2& op);
  static Effect from_pure(const PureState& state);

  const Operator2& op() const { return op_; }
  Effect complement() const;

 private:
  Operator2 op_;
};

enum class Sign : std::uint8_t { plus, minus };

/// One of H+, H-, H+perp, H-perp.
struct ProjectorChoice {
  Sign sign = Sign::plus;
  bool complement = false;

  /// Index 0..3 in the order H+, H-, H+perp, H-perp.
  constexpr int index() const { return (sign == Sign::plus ? 0 : 1) + (complement ? 2 : 0); }
  static constexpr ProjectorChoice from_index(int i) {
    return {(i % 2 == 0) ? Sign::plus : Sign::minus, i >= 2};
  }
  constexpr ProjectorChoice partner() const { return {sign, !complement}; }

  friend constexpr bool operator==(ProjectorChoice, ProjectorChoice) = default;
};

inline constexpr std::array<ProjectorChoice, 4> kAllProjectors = {
    ProjectorChoice::from_index(0), ProjectorChoice::from_index(1),
    ProjectorChoice::from_index(2), ProjectorChoice::from_index(3)};

/// "H+", "H-", "H+perp", "H-perp".
std::string_view to_string(ProjectorChoice p);

/// 1/2 [I +- (X +- Z)/sqrt(2)], or its complement.
Effect h_projector(Sign sign, bool complement);
inline Effect h_projector(ProjectorChoice p) { return h_projector(p.sign, p.complement); }

/// Eigenvector of the projector with eigenvalue 1 (real, nonnegative first
/// nonzero component).
PureState h_eigenvector(ProjectorChoice p);

/// +1 eigenvector of a rank-1 projector.
PureState rank_one_eigenvector(const Effect& projector);

/// Tr(E rho), clamped to [0, 1] when within 1e-12 of the boundary.
double born_probability(const DensityMatrix& state, const Effect& effect);

/// (1 - 2p) A + p Tr(A) I. On states this yields bit-error probability p in
/// every basis; the map is self-adjoint, so the same call propagates effects
/// backwards. Throws DomainError unless 0 <= p <= 1/2.
Operator2 depolarize(const Operator2& op, double p);
DensityMatrix depolarize(const DensityMatrix& rho, double p);
Effect depolarize(const Effect& effect, double p);

/// Tr(E A rho) / Tr(E rho). Throws OrthogonalPostSelection when Tr(E rho) <= 1e-12.
Complex weak_value(const DensityMatrix& pre, const Effect& post, const Operator2& observable);

enum class Pauli : std::uint8_t { I, X, Y, Z };

const Operator2& pauli_matrix(Pauli p);
std::string_view to_string(Pauli p);

}  // namespace wvqkd
