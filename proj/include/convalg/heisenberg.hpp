#pragma once

// The finite Heisenberg group H_n, the Weil pairing and the charge-c clock/shift
// representation, kept exact as monomial matrices with root-of-unity entries.

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <vector>

namespace convalg {

using ComplexMatrix = Eigen::MatrixXcd;

struct TorsionPoint {
  int a1 = 0, a2 = 0, n = 1;
  TorsionPoint() = default;
  TorsionPoint(int a1_, int a2_, int n_);
  TorsionPoint operator+(const TorsionPoint& o) const;
  TorsionPoint operator-() const;
  TorsionPoint scaled(int k) const;
  bool is_zero() const { return a1 == 0 && a2 == 0; }
  friend bool operator==(const TorsionPoint&, const TorsionPoint&) = default;
};

/// All n^2 points, (a1, a2) lexicographic.
std::vector<TorsionPoint> torsion_points(int n);

struct HeisenbergElement {
  TorsionPoint point;
  int central = 0;  // zeta = omega^central
  friend bool operator==(const HeisenbergElement&, const HeisenbergElement&) = default;
};

/// Exponent k of <a, b> = omega^k, omega = exp(2 pi i / n); k = a1 b2 - a2 b1 mod n.
int weil_pairing(const TorsionPoint& a, const TorsionPoint& b);

/// (alpha, zeta)(beta, xi) = (alpha + beta, <alpha, beta> zeta xi).
HeisenbergElement heisenberg_product(const HeisenbergElement& x, const HeisenbergElement& y);

std::complex<double> root_of_unity(int k, int n);

/// Matrix with exactly one nonzero entry omega^{exps[j]} per column j, in row perm[j].
class MonomialMatrix {
 public:
  MonomialMatrix() = default;
  MonomialMatrix(int n, std::vector<int> perm, std::vector<int> exps);
  static MonomialMatrix identity(int n);

  int n() const { return n_; }
  int row_of(int col) const { return perm_[static_cast<std::size_t>(col)]; }
  int exponent_of(int col) const { return exps_[static_cast<std::size_t>(col)]; }

  MonomialMatrix operator*(const MonomialMatrix& o) const;
  MonomialMatrix inverse() const;
  MonomialMatrix power(int k) const;
  MonomialMatrix times_root(int k) const;
  /// Scalar omega^k times the identity: returns k, or -1 when not scalar.
  int scalar_exponent() const;
  ComplexMatrix dense() const;

  friend bool operator==(const MonomialMatrix&, const MonomialMatrix&) = default;

 private:
  int n_ = 0;
  std::vector<int> perm_, exps_;
};

/// I_10 = diag(1, omega, ..., omega^{n-1}).
MonomialMatrix clock_matrix(int n);
/// I_01: ones at (i, i+1 mod n).
MonomialMatrix shift_matrix(int n);

/// zeta^c I_10^{c alpha_1} I_01^{alpha_2}.
MonomialMatrix rep_matrix(const HeisenbergElement& h, int c);
MonomialMatrix rep_matrix(const TorsionPoint& alpha, int c);

/// Measured once: I_01 I_10 = omega^{kClockShiftSign} I_10 I_01.
inline constexpr int kClockShiftSign = 1;
/// Measured once: T(a) T(b) T(a)^-1 T(b)^-1 = <a, b>^{kCommutatorSign * c}.
inline constexpr int kCommutatorSign = -1;

/// Exponent of the scalar commutator, or -1 if not scalar.
int commutator_exponent(const TorsionPoint& a, const TorsionPoint& b, int c);

/// Dimension of the commutant of {T_c(alpha)}, numeric rank with tolerance 1e-9. n <= 8.
int commutant_dimension(int n, int c);

/// Sum over alpha of T_c(alpha) (x) T_c(alpha)^{-1}, entries exact as elements of Z[omega]
/// reduced modulo the n-th cyclotomic polynomial. Returns true iff it equals n times the flip.
bool tensor_sum_is_flip(int n, int c);
/// Dense version of the same sum (row-major Kronecker).
ComplexMatrix tensor_sum_dense(int n, int c, bool skip_zero);
/// Flip operator on C^n (x) C^n.
ComplexMatrix flip_matrix(int n);

// --------------------------------------------------------- functional model

/// Space of f on (Z/n)^2 with f(alpha + gamma) = <alpha, gamma>^c f(alpha) for gamma in Z/n (+) 0.
/// Returns an orthonormal basis of the solution space as columns of an n^2 x k matrix,
/// function values indexed by a1 * n + a2.
ComplexMatrix functional_space_basis(int n, int c);

/// Matrix of (T(beta, zeta) f)(alpha) = zeta^c <alpha, beta>^c f(alpha + beta) on the basis
/// f_k(a1, a2) = delta(a2, k) omega^{-c k a1}.
ComplexMatrix functional_model(const HeisenbergElement& beta, int c);

struct IntertwinerResult {
  bool found = false;
  int lambda1 = 0, lambda2 = 0;  // exponents of the scalar twists tried
  double residual = 0.0;
  double min_singular_value = 0.0;  // of the intertwiner, when found
  ComplexMatrix x;
};

/// Searches X with X F(g) = T(g) X for the generators g = (1,0), (0,1) and the center,
/// allowing F to be twisted by characters omega^{lambda1 a1 + lambda2 a2}.
/// An invertible X means the models agree up to such a twist.
IntertwinerResult find_intertwiner(int n, int c, bool allow_twist);

}  // namespace convalg
