#pragma once

// Theta functions with characteristics, the functions w_alpha, the elliptic
// r-matrix built from the clock/shift representation, and numeric checks of the
// classical Yang-Baxter equation, automorphy and the E_n action on operators.
//
// Tensor legs use the row-major Kronecker convention: (x (x) y)[i*n + j] = x[i] y[j].

#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "convalg/convolution.hpp"
#include "convalg/heisenberg.hpp"

namespace convalg {

struct Lattice {
  Complex tau{0.0, 1.0};
  int n = 1;
  Lattice() = default;
  Lattice(Complex tau_, int n_);
  /// (a1 + a2 tau) / n.
  Complex torsion(const TorsionPoint& a) const;
};

inline constexpr double kPoleGuard = 1e-3;

/// Distance from u to the nearest point of (1/n)(Z + Z tau).
double distance_to_torsion(Complex u, const Lattice& lattice);
/// Throws std::domain_error when closer than kPoleGuard.
void check_pole_guard(Complex u, const Lattice& lattice, const std::string& what);

/// Sum over m of exp(pi i (m+a)^2 tau + 2 pi i (m+a)(z+b)).
/// Truncation: terms are summed outward from the dominant index until the next term is
/// below 1e-16 of the largest term seen, giving M0 terms on each side; `scale` multiplies
/// that count (scale 2 doubles the truncation).
Complex theta_char(double a, double b, Complex z, Complex tau, double scale = 1.0);
/// d/dz of theta_char.
Complex theta_char_prime(double a, double b, Complex z, Complex tau, double scale = 1.0);

struct WCalibration {
  std::string branch;           // "literal" or "swapped"
  Complex lambda{0.0, 0.0};
  Complex k{1.0, 0.0};
  double quasi_periodicity = 0.0;  // max relative residual over beta and samples
  double residue_error = 0.0;      // |res - 1|, extrapolated
  double residue_crosscheck = 0.0; // |K - n theta'(0) / theta_num(0)| / |K|
  bool accepted = false;
};

/// w_alpha(u + beta) = <beta, alpha> w_alpha(u), simple poles on E_n, residue 1 at 0.
class WFunction {
 public:
  /// Calibrates; throws std::runtime_error if no branch passes.
  WFunction(const TorsionPoint& alpha, const Lattice& lattice, double trunc_scale = 1.0);

  Complex operator()(Complex u) const;
  const TorsionPoint& alpha() const { return alpha_; }
  /// Reports of every branch tried, in order; the last one is in use.
  const std::vector<WCalibration>& attempts() const { return attempts_; }
  const WCalibration& calibration() const { return attempts_.back(); }

  /// Extrapolated lim u -> 0 of u w(u), Richardson over h, h/2, h/4.
  Complex residue(double h = 1e-2) const;

 private:
  Complex raw(Complex u, const WCalibration& cal) const;
  WCalibration calibrate(const std::string& branch) const;

  TorsionPoint alpha_;
  Lattice lattice_;
  double scale_ = 1.0;
  std::vector<WCalibration> attempts_;
};

/// Sample points of the fundamental domain kept at distance >= margin from E_n.
std::vector<Complex> sample_points(const Lattice& lattice, int count, std::mt19937_64& rng, double margin);

/// r_{n,c}(u) = sum_{alpha != 0} w_alpha(u) T_c(alpha) (x) T_c(alpha)^{-1}.
class BelavinRMatrix {
 public:
  BelavinRMatrix(const Lattice& lattice, int c, double trunc_scale = 1.0);

  ComplexMatrix operator()(Complex u) const;
  /// r(u - v).
  ComplexMatrix operator()(Complex u, Complex v) const { return (*this)(u - v); }
  /// No pole guard; used for the extrapolated residue.
  ComplexMatrix unguarded(Complex u) const;
  /// Richardson limit of u r(u) at 0.
  ComplexMatrix residue(double h = 1e-2) const;

  const Lattice& lattice() const { return lattice_; }
  int c() const { return c_; }
  int n() const { return lattice_.n; }
  const std::vector<WFunction>& w() const { return w_; }

 private:
  Lattice lattice_;
  int c_;
  std::vector<WFunction> w_;
  std::vector<ComplexMatrix> kron_;
};

/// Leg embeddings into (C^n)^{(x)3}.
ComplexMatrix leg12(const ComplexMatrix& r, int n);
ComplexMatrix leg23(const ComplexMatrix& r, int n);
ComplexMatrix leg13(const ComplexMatrix& r, int n);

struct CybeResult {
  double residual = 0.0;  // equation as printed
  /// Other argument conventions, residual each.
  std::map<std::string, double> variants;
};

/// || [r13(u+v), r23(v) - r12(u)] - [r23(v), r12(u)] || / || r12(u) ||.
CybeResult cybe_residual(Complex u, Complex v, const BelavinRMatrix& r);

using MatrixFunction = std::function<ComplexMatrix(Complex)>;

struct AutomorphyReport {
  double max_deviation = 0.0;
  /// For sections w_gamma T_c(beta): k with A(x+alpha) = <alpha,beta>^k T A T^-1 for all alpha, or -1.
  int exponent_correction = -1;
  std::vector<double> deviations;  // per alpha, max over samples
};

/// max over alpha in E_n and samples x of ||A(x+alpha) - T(alpha) A(x) T(alpha)^-1|| / ||A(x)||.
AutomorphyReport automorphy_check(const MatrixFunction& a, int c, const Lattice& lattice,
                                  const std::vector<Complex>& samples, const TorsionPoint* beta = nullptr);

/// w_gamma(x) T_c(beta).
MatrixFunction section(const BelavinRMatrix& r, const TorsionPoint& gamma, const TorsionPoint& beta);

enum class PhaseConvention { NonNegative, Symmetric };

/// (alpha . f)_A(z) = omega^{c alpha_1 sum a_ij (i-j)} f_{A'}(z + alpha), A'_{b+alpha_2, c-alpha_2} = A_{bc},
/// where z + alpha translates every variable by the torsion point of alpha.
ConvOperator en_action(const ConvOperator& op, const TorsionPoint& alpha, int c, const Lattice& lattice,
                       PhaseConvention convention = PhaseConvention::NonNegative);

/// Degree-1 operator sum_{b,c} Delta(E_bc, A_bc).
ConvOperator operator_of_matrix_function(const MatrixFunction& a, int n, const Lattice& lattice);

/// Max |f - g| over matrices in either support, at sampled configurations.
double sampled_deviation(const ConvOperator& a, const ConvOperator& b, int samples, std::mt19937_64& rng,
                         const Lattice& lattice);

}  // namespace convalg
