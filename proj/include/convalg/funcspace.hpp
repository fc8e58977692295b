#pragma once

// Functions on products of symmetric powers X^(m_1) x ... x X^(m_k).
//
// Three ground models share one interface:
//   ExactLine     X = affine line over Q; functions are block-symmetric polynomials
//                 stored in the orbit-sum (monomial symmetric) basis.
//   FiniteSet     X = N distinct rational points; functions are tables over all
//                 multiset configurations.
//   TorusSampled  X = C / (Z + tau Z); functions are evaluation closures.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "convalg/combinatorics.hpp"
#include "convalg/rational.hpp"

namespace convalg {

using Complex = std::complex<double>;

// ------------------------------------------------------------------ shapes

struct BlockLabel {
  int arity = 0;  // 0: anonymous, 1: (i), 2: (i,j), 3: (i,j,k)
  std::array<int, 3> idx{0, 0, 0};

  static BlockLabel none() { return {}; }
  static BlockLabel of(int i) { return {1, {i, 0, 0}}; }
  static BlockLabel of(int i, int j) { return {2, {i, j, 0}}; }
  static BlockLabel of(int i, int j, int k) { return {3, {i, j, k}}; }
  std::string str() const;

  friend bool operator==(const BlockLabel&, const BlockLabel&) = default;
  friend auto operator<=>(const BlockLabel&, const BlockLabel&) = default;
};

struct Block {
  BlockLabel label;
  int size = 0;
  friend bool operator==(const Block&, const Block&) = default;
};

class BlockShape {
 public:
  BlockShape() = default;
  explicit BlockShape(std::vector<Block> blocks);

  /// Blocks (i,j) in row-major order, including empty ones.
  static BlockShape of_matrix(const IntMatrix& a);
  /// Blocks (i).
  static BlockShape of_composition(const Composition& v);
  /// Blocks (i,j,k) in lexicographic order.
  static BlockShape of_array(const TransferArray& t);
  /// One anonymous block.
  static BlockShape single(int size);

  int count() const { return static_cast<int>(blocks_.size()); }
  const Block& block(int b) const { return blocks_[static_cast<std::size_t>(b)]; }
  int size(int b) const { return block(b).size; }
  int d() const { return total_; }
  /// Offset of block b in the concatenated variable list.
  int offset(int b) const { return offsets_[static_cast<std::size_t>(b)]; }
  /// Index of the block carrying this label, or -1.
  int find(const BlockLabel& label) const;
  std::vector<int> sizes() const;
  std::string str() const;

  friend bool operator==(const BlockShape& a, const BlockShape& b) { return a.blocks_ == b.blocks_; }

 private:
  std::vector<Block> blocks_;
  std::vector<int> offsets_;
  int total_ = 0;
};

/// A surjection of source blocks onto target blocks with additive sizes.
/// Geometrically the map sending a tuple of multisets to the unions over each fiber.
class MergeMap {
 public:
  MergeMap(BlockShape source, BlockShape target, std::vector<int> target_of);

  static MergeMap pr12(const TransferArray& t);
  static MergeMap pr23(const TransferArray& t);
  static MergeMap pr13(const TransferArray& t);
  /// X^(A) -> X^(rowSums A), block (i,j) into (i).
  static MergeMap rows(const IntMatrix& a);
  /// X^(A) -> X^(colSums A), block (i,j) into (j).
  static MergeMap cols(const IntMatrix& a);

  const BlockShape& source() const { return source_; }
  const BlockShape& target() const { return target_; }
  int target_of(int source_block) const { return target_of_[static_cast<std::size_t>(source_block)]; }
  /// Source blocks mapping to target block t, increasing.
  const std::vector<int>& fiber(int t) const { return fibers_[static_cast<std::size_t>(t)]; }

 private:
  BlockShape source_, target_;
  std::vector<int> target_of_;
  std::vector<std::vector<int>> fibers_;
};

// ------------------------------------------------------------------ grounds

struct ExactLine {
  friend bool operator==(const ExactLine&, const ExactLine&) = default;
};
struct FiniteSet {
  std::vector<Rational> points;
  friend bool operator==(const FiniteSet& a, const FiniteSet& b) { return a.points == b.points; }
};
struct TorusSampled {
  Complex tau{0.0, 1.0};
  friend bool operator==(const TorusSampled&, const TorusSampled&) = default;
};
using GroundSpace = std::variant<ExactLine, FiniteSet, TorusSampled>;

/// Throws std::invalid_argument when points repeat or Im(tau) <= 0.
void validate_ground(const GroundSpace& g);
std::string ground_name(const GroundSpace& g);

/// Points 0, 1, ..., n-1 as rationals.
FiniteSet integer_points(int n);

// -------------------------------------------------------------- functions

inline constexpr int kDefaultDegreeCap = 8;

/// Concatenated per-block exponent segments, each segment sorted descending.
using OrbitKey = std::vector<std::uint8_t>;
using PolyTerms = std::map<OrbitKey, Rational>;

/// Complex-valued rule on the concatenated variable list of a shape.
using TorusRule = std::function<Complex(const std::vector<Complex>&)>;

class BlockSymFunction {
 public:
  BlockSymFunction() = default;

  static BlockSymFunction constant(const BlockShape& shape, const GroundSpace& ground, const Rational& c);
  static BlockSymFunction zero(const BlockShape& shape, const GroundSpace& ground) {
    return constant(shape, ground, Rational(0));
  }
  /// ExactLine from orbit-sum terms; keys are re-sorted per block.
  static BlockSymFunction polynomial(const BlockShape& shape, const PolyTerms& terms,
                                     int degree_cap = kDefaultDegreeCap);
  /// c * prod_b m_{lambda_b}; exponents per block, any order.
  static BlockSymFunction orbit_sum(const BlockShape& shape, const std::vector<std::vector<int>>& exponents,
                                    const Rational& c = Rational(1), int degree_cap = kDefaultDegreeCap);
  /// One variable, sum_k coeffs[k] x^k.
  static BlockSymFunction univariate(const std::vector<Rational>& coeffs, int degree_cap = kDefaultDegreeCap);
  static BlockSymFunction table(const BlockShape& shape, const FiniteSet& ground, std::vector<Rational> values);
  static BlockSymFunction rule(const BlockShape& shape, const TorusSampled& ground, TorusRule rule,
                               std::string provenance);

  const BlockShape& shape() const { return shape_; }
  const GroundSpace& ground() const { return ground_; }
  bool is_polynomial() const { return std::holds_alternative<ExactLine>(ground_); }
  bool is_table() const { return std::holds_alternative<FiniteSet>(ground_); }
  bool is_torus() const { return std::holds_alternative<TorusSampled>(ground_); }

  /// Exact backends only; a torus function counts as nonzero unless built as zero.
  bool is_zero() const;

  const PolyTerms& terms() const;
  int degree_cap() const { return degree_cap_; }
  int degree() const;
  const std::vector<Rational>& values() const;
  const std::string& provenance() const { return provenance_; }

  /// Value at a configuration given per block as multisets of rationals (ExactLine)
  /// or of point indices (FiniteSet).
  Rational evaluate(const std::vector<std::vector<Rational>>& config) const;
  Rational evaluate_indices(const std::vector<std::vector<int>>& config) const;
  /// Value at concatenated complex coordinates. Torus rules, and polynomials with complex arguments.
  Complex evaluate_complex(const std::vector<Complex>& flat) const;

  /// Tabulates an ExactLine polynomial (or copies a table) on a finite point set.
  BlockSymFunction on_points(const FiniteSet& ground) const;
  /// Wraps an ExactLine polynomial as a torus rule (used by tests only).
  BlockSymFunction with_ground(const TorusSampled& ground) const;
  /// Same data over a different shape with identical block sizes.
  BlockSymFunction relabeled(const BlockShape& shape) const;

  BlockSymFunction operator+(const BlockSymFunction& other) const;
  BlockSymFunction operator-(const BlockSymFunction& other) const;
  BlockSymFunction operator*(const Rational& c) const;
  BlockSymFunction scaled(const Complex& c) const;
  BlockSymFunction operator-() const { return *this * Rational(-1); }

  /// Exact equality; throws for torus functions.
  friend bool operator==(const BlockSymFunction& a, const BlockSymFunction& b);

  /// Throws std::logic_error when a polynomial key is not block-sorted or a table has the wrong size.
  void check_invariants() const;

  std::string str() const;

 private:
  friend BlockSymFunction multiply(const BlockSymFunction&, const BlockSymFunction&);
  friend BlockSymFunction pullback(const BlockSymFunction&, const MergeMap&);
  friend BlockSymFunction transfer(const BlockSymFunction&, const MergeMap&);
  friend BlockSymFunction embed(const BlockSymFunction&, const BlockShape&, const std::vector<int>&);

  BlockShape shape_;
  GroundSpace ground_;
  PolyTerms terms_;
  int degree_cap_ = kDefaultDegreeCap;
  std::vector<Rational> values_;
  std::shared_ptr<const TorusRule> rule_;
  std::string provenance_;
  bool torus_zero_ = false;
};

BlockSymFunction multiply(const BlockSymFunction& f, const BlockSymFunction& g);
BlockSymFunction pullback(const BlockSymFunction& f, const MergeMap& m);
BlockSymFunction transfer(const BlockSymFunction& f, const MergeMap& m);

/// Extends f to a larger shape: block b of f becomes block positions[b] of `shape`,
/// sizes must match, and the result does not depend on the remaining blocks.
BlockSymFunction embed(const BlockSymFunction& f, const BlockShape& shape, const std::vector<int>& positions);

/// p_ij^* f1 on X^(A): f1 lives on a single block of size a_ij.
BlockSymFunction lift_pij(const BlockSymFunction& f1, const IntMatrix& a, int i, int j);

/// p_ii^* f1 on X^(v): the sum of f1 over the points of the i-th multiset.
BlockSymFunction lift_pii(const BlockSymFunction& f1, const Composition& v, int i);

// ------------------------------------------------- combinatorial helpers

/// Multisets of size m drawn from {0, ..., N-1}, as sorted index lists, in colex rank order.
const std::vector<std::vector<int>>& multisets(int N, int m);
std::size_t multiset_rank(const std::vector<int>& sorted_indices);

/// m_lambda * m_mu in one block of m variables (lambda, mu sorted descending, length m).
const std::vector<std::pair<OrbitKey, Rational>>& orbit_product(const OrbitKey& lambda, const OrbitKey& mu);

/// Number of distinct rearrangements of a multiset.
Rational orbit_size(const OrbitKey& lambda);

}  // namespace convalg
