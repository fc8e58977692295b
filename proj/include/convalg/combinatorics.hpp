#pragma once

// Integer combinatorics of flag types: compositions, matrices in M(v1, v2),
// three-index transfer arrays, the two partial orders on matrices and the
// permutation machinery behind the Bruhat order.
//
// Indices are 0-based in the API. Serialized forms are positional, so the
// (i, j) entry of a matrix is the j-th element of its i-th row.

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace convalg {

class Composition {
 public:
  Composition() = default;
  explicit Composition(std::vector<int> parts);

  int n() const { return static_cast<int>(parts_.size()); }
  int d() const { return total_; }
  int operator[](int i) const { return parts_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& parts() const { return parts_; }

  /// Half-open range [first, last) of the i-th segment of {0, ..., d-1}.
  std::pair<int, int> segment(int i) const;

  /// Copy with part i changed by delta; throws if a part would go negative.
  Composition adjusted(int i, int delta) const;

  std::string str() const;

  friend bool operator==(const Composition&, const Composition&) = default;
  friend auto operator<=>(const Composition& a, const Composition& b) { return a.parts_ <=> b.parts_; }

 private:
  std::vector<int> parts_;
  int total_ = 0;
};

class IntMatrix {
 public:
  IntMatrix() = default;
  explicit IntMatrix(int n);
  IntMatrix(int n, std::vector<int> row_major);
  static IntMatrix from_rows(const std::vector<std::vector<int>>& rows);
  static IntMatrix diagonal(const Composition& v);
  static IntMatrix unit(int n, int i, int j);

  int n() const { return n_; }
  int at(int i, int j) const { return entries_[static_cast<std::size_t>(i * n_ + j)]; }
  void set(int i, int j, int value);
  void add(int i, int j, int delta);
  const std::vector<int>& entries() const { return entries_; }

  int total() const;
  Composition row_sums() const;
  Composition col_sums() const;
  bool is_diagonal() const;
  bool is_lower_triangular() const;
  bool is_upper_triangular() const;
  std::vector<std::vector<int>> rows() const;
  std::string str() const;

  IntMatrix operator+(const IntMatrix& other) const;

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
  friend auto operator<=>(const IntMatrix& a, const IntMatrix& b) {
    if (auto c = a.n_ <=> b.n_; c != 0) return c;
    return a.entries_ <=> b.entries_;
  }

 private:
  int n_ = 0;
  std::vector<int> entries_;
};

class TransferArray {
 public:
  TransferArray() = default;
  explicit TransferArray(int n);

  int n() const { return n_; }
  int at(int i, int j, int k) const { return entries_[index(i, j, k)]; }
  void set(int i, int j, int k, int value) { entries_[index(i, j, k)] = value; }
  const std::vector<int>& entries() const { return entries_; }
  int total() const;

  /// Pairwise marginals: sum over the index that is not named.
  IntMatrix marginal12() const;
  IntMatrix marginal23() const;
  IntMatrix marginal13() const;

  friend bool operator==(const TransferArray&, const TransferArray&) = default;
  friend auto operator<=>(const TransferArray& a, const TransferArray& b) {
    if (auto c = a.n_ <=> b.n_; c != 0) return c;
    return a.entries_ <=> b.entries_;
  }

 private:
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>((i * n_ + j) * n_ + k);
  }
  int n_ = 0;
  std::vector<int> entries_;
};

/// A permutation of {0, ..., d-1}, stored by images.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> images);
  static Permutation identity(int d);
  /// Simple transposition (i, i+1).
  static Permutation simple(int d, int i);

  int size() const { return static_cast<int>(images_.size()); }
  int operator()(int a) const { return images_[static_cast<std::size_t>(a)]; }
  const std::vector<int>& images() const { return images_; }

  /// Number of inversions.
  int length() const;
  Permutation inverse() const;
  /// (this * other)(a) = this(other(a)).
  Permutation operator*(const Permutation& other) const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation& a, const Permutation& b) { return a.images_ <=> b.images_; }

 private:
  std::vector<int> images_;
};

/// Permutations of d letters are enumerated only up to this size.
inline constexpr int kPermutationEnumerationCap = 8;

std::vector<Composition> enumerate_compositions(int n, int d);

/// All of M(v1, v2), row-major lexicographic order.
std::vector<IntMatrix> enumerate_matrices(const Composition& v1, const Composition& v2);

/// All n x n non-negative integer matrices with entry sum d, row-major lexicographic.
std::vector<IntMatrix> enumerate_all_matrices(int n, int d);

IntMatrix matrix_of_permutation(const Permutation& sigma, const Composition& v1, const Composition& v2);

/// The corner-sum order. Matrices with different marginals are incomparable.
bool preceq(const IntMatrix& a, const IntMatrix& b);

/// Minimal-length permutation in the double coset of a. Requires d <= cap.
Permutation minimal_representative(const IntMatrix& a);

/// Bruhat order on permutations by the subword property of a reduced word.
bool bruhat_leq(const Permutation& sigma, const Permutation& pi);

/// Bruhat order on matrices through minimal double-coset representatives.
bool bruhat_leq(const IntMatrix& a, const IntMatrix& b);

/// A reduced word for sigma as indices of simple transpositions, applied left to right.
std::vector<int> reduced_word(const Permutation& sigma);

/// Sum over off-diagonal entries of binom(|i-j|+1, 2) * c_ij.
long length_statistic(const IntMatrix& c);

/// diag(v) - E_jj + E_ij: column sums v, row sums v + e_i - e_j.
IntMatrix generator_matrix(const Composition& v, int i, int j);

/// All arrays with marginal12 == a and marginal23 == b.
std::vector<TransferArray> transfer_arrays(const IntMatrix& a, const IntMatrix& b);

struct Splitting {
  std::vector<int> shares;
  TransferArray array;
};

/// For a = diag + a_{p,p+1} E_{p,p+1}: the tuples s with 0 <= s_k <= b_{p+1,k},
/// sum s = a_{p,p+1}, each with its array. Lexicographic in s.
std::vector<Splitting> splitting_set(const IntMatrix& a, const IntMatrix& b, int p);

struct LeadingTerm {
  TransferArray array;
  IntMatrix product;
};

/// Greatest array for a = diag + a_{p,p+1} E_{p,p+1}, with
/// C = B + a_{p,p+1} (E_{pm} - E_{p+1,m}), m the last nonzero column of row p+1 of b.
LeadingTerm leading_array(const IntMatrix& a, const IntMatrix& b, int p);

/// Mirror case a = diag + a_{p,p-1} E_{p,p-1}, m the first nonzero column of row p-1 of b.
LeadingTerm leading_array_lower(const IntMatrix& a, const IntMatrix& b, int p);

/// Splitting set of the mirror case.
std::vector<Splitting> splitting_set_lower(const IntMatrix& a, const IntMatrix& b, int p);

}  // namespace convalg
