#pragma once

// Convolution operators Delta(A, f) on functions over the disjoint union of the
// symmetric products X^(v), their composition through transfer arrays, the
// current-algebra map tau, the tensor-space action, Schur structure constants
// and the generation algorithm expressing Delta(C, h) through tau-images.
//
// Orientation: Delta(A, f) sends functions on X^(rowSums A) to functions on
// X^(colSums A). compose(op1, op2) applies op1 first.

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "convalg/combinatorics.hpp"
#include "convalg/funcspace.hpp"

namespace convalg {

/// Operands live over different ground spaces.
class GroundMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConvOperator {
 public:
  explicit ConvOperator(GroundSpace ground = ExactLine{});
  static ConvOperator term(const IntMatrix& a, const BlockSymFunction& f);
  /// Sum over v in V(n, d) of Delta(diag v, 1).
  static ConvOperator identity(int n, int d, const GroundSpace& ground);

  const GroundSpace& ground() const { return ground_; }
  const std::map<IntMatrix, BlockSymFunction>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::vector<IntMatrix> support() const;
  /// Function attached to a, or nullptr.
  const BlockSymFunction* find(const IntMatrix& a) const;

  /// Accumulates; exact zero functions are pruned.
  void add_term(const IntMatrix& a, const BlockSymFunction& f);

  ConvOperator operator+(const ConvOperator& other) const;
  ConvOperator operator-(const ConvOperator& other) const;
  ConvOperator operator*(const Rational& c) const;
  ConvOperator scaled(const Complex& c) const;

  /// Exact equality (exact grounds only).
  friend bool operator==(const ConvOperator& a, const ConvOperator& b);

  std::string str() const;

 private:
  GroundSpace ground_;
  std::map<IntMatrix, BlockSymFunction> terms_;
};

/// Composition; uses the diagonal shortcut whenever one factor is diagonal.
ConvOperator compose(const ConvOperator& op1, const ConvOperator& op2);
/// Composition through transfer arrays only.
ConvOperator compose_general(const ConvOperator& op1, const ConvOperator& op2);

/// Delta(diag v, f) . Delta(B, g) = Delta(B, g * rows^* f).
ConvOperator compose_diagonal_left(const IntMatrix& diag, const BlockSymFunction& f, const IntMatrix& b,
                                   const BlockSymFunction& g);
/// Delta(B, g) . Delta(diag w, f) = Delta(B, g * cols^* f).
ConvOperator compose_diagonal_right(const IntMatrix& b, const BlockSymFunction& g, const IntMatrix& diag,
                                    const BlockSymFunction& f);

/// The function of a diagonal term viewed on X^(v), and back.
BlockSymFunction diagonal_to_composition(const IntMatrix& diag, const BlockSymFunction& f);
BlockSymFunction composition_to_diagonal(const Composition& v, const BlockSymFunction& f);

// ---------------------------------------------------------- finite model

/// Operator matrix on functions over the distinct-point locus of a FiniteSet.
/// A basis point is a d-subset S (bitmask over the ground points) together with a
/// labeling of S by [n]. entries[(S, I, J)] is the kernel value K(I, J): with this
/// convention the table of op1 then op2 is the matrix product table(op1) * table(op2).
struct OperatorTable {
  using Key = std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>;
  std::map<Key, Rational> entries;

  friend bool operator==(const OperatorTable& a, const OperatorTable& b) { return a.entries == b.entries; }
  OperatorTable operator+(const OperatorTable& other) const;
  OperatorTable operator*(const Rational& c) const;
};

/// Labeling code: sum over the ordered points of S of label * n^position.
std::uint32_t encode_labeling(const std::vector<int>& labels, int n);
std::vector<int> decode_labeling(std::uint32_t code, int n, int d);

/// Literal fiber sums over a FiniteSet ground with at most 16 points.
OperatorTable operator_table(const ConvOperator& op);
OperatorTable table_product(const OperatorTable& a, const OperatorTable& b);
/// table(op1) * table(op2), the independent oracle for compose.
OperatorTable compose_bruteforce(const ConvOperator& op1, const ConvOperator& op2);
/// Identity table for all v in V(n, d) over a ground of N points.
OperatorTable identity_table(int n, int d, int N);

// ---------------------------------------------------------------- tau

/// Image of E_ij (x) f1 in the degree-d part, f1 univariate.
ConvOperator tau(int i, int j, const BlockSymFunction& f1, int n, int d);

/// Monomial x^k as a univariate function on the given ground.
BlockSymFunction power_function(int k, const GroundSpace& ground);

/// f1 at ground point p (FiniteSet index) or value (ExactLine).
Rational univariate_value_at_index(const BlockSymFunction& f1, int p);

struct TensorState {
  FiniteSet ground;
  /// Point indices of the fixed d-element set, increasing.
  std::vector<int> points;
  int n = 1;
  /// Labelings (label of each point, in the order of `points`) with coefficients.
  std::map<std::vector<int>, Rational> coeffs;

  void add(const std::vector<int>& labels, const Rational& c);
  friend bool operator==(const TensorState& a, const TensorState& b) {
    return a.points == b.points && a.n == b.n && a.coeffs == b.coeffs;
  }
};

/// i != j: move each point of block j to block i with weight f1(point).
/// i == j: multiply e_I by the sum of f1 over block i.
TensorState apply_to_tensor(int i, int j, const BlockSymFunction& f1, const TensorState& state);

/// Matrix of apply_to_tensor in the e_I basis, keyed like OperatorTable:
/// entries[(S, I, J)] = coefficient of e_I in the image of e_J.
OperatorTable tensor_action_table(int i, int j, const BlockSymFunction& f1, int n, int d);

// ---------------------------------------------------------------- Schur

using SchurTable = std::map<std::tuple<IntMatrix, IntMatrix, IntMatrix>, long>;

/// Nonzero structure constants c^C_{AB} of the degree-d Schur algebra on gl_n.
SchurTable schur_structure_constants(int n, int d);
/// Structure constants of one product.
std::map<IntMatrix, long> schur_product(const IntMatrix& a, const IntMatrix& b);
/// Exhaustive associativity check of a table over the basis M(n, d).
bool schur_associative(const SchurTable& table, int n, int d);

// ----------------------------------------------------------- generation

class GeneratorExpr;
using ExprPtr = std::shared_ptr<const GeneratorExpr>;

/// Expression tree over tau-images. Leaves are tau(E_ij (x) x^k) in a fixed
/// degree, or the unit. Products apply their factors left to right.
class GeneratorExpr {
 public:
  enum class Kind { Unit, Tau, Sum, Product, Scale };

  static ExprPtr unit();
  static ExprPtr tau_leaf(int i, int j, int k);
  static ExprPtr sum(std::vector<ExprPtr> parts);
  static ExprPtr product(std::vector<ExprPtr> factors);
  static ExprPtr scale(const Rational& c, ExprPtr e);

  Kind kind() const { return kind_; }
  int i() const { return i_; }
  int j() const { return j_; }
  int power() const { return k_; }
  const Rational& coefficient() const { return c_; }
  const std::vector<ExprPtr>& children() const { return children_; }

  /// Distinct nodes reachable from here.
  std::size_t node_count() const;
  /// Longest path from this node to a leaf.
  std::size_t height() const;
  std::string str() const;

 private:
  Kind kind_ = Kind::Unit;
  int i_ = 0, j_ = 0, k_ = 0;
  Rational c_{1};
  std::vector<ExprPtr> children_;
};

/// Evaluates through compose on the given ground (ExactLine or FiniteSet). Memoized per node.
ConvOperator evaluate_expr(const ExprPtr& e, int n, int d, const GroundSpace& ground);
/// Independent route: leaves from the tensor action, products as table products.
OperatorTable evaluate_expr_table(const ExprPtr& e, int n, int d, const FiniteSet& ground);

struct Expression {
  ExprPtr expr;
  int depth = 0;          // recursion depth of the algorithm
  long length = 0;        // l(C)
  long steps = 0;         // recursive calls made
};

inline constexpr long kExpressBudget = 200000;

/// Expression of Delta(C, h) through tau-images. h must be an ExactLine polynomial on X^(C).
/// Throws BoundExceeded on degree or budget overflow, std::logic_error if an internal
/// invariant (leading term, strict descent of l) fails.
Expression express_in_generators(const IntMatrix& c, const BlockSymFunction& h);

}  // namespace convalg
