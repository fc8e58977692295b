#pragma once

// Pairs of partial flags in F_q^d and their relative position matrices.
// Vectors of F_q^d are coded as integers (base-q digits); a subspace is the bitmask of
// its member codes, so q^d <= 32 is required (q in {2, 3}, d <= 3).

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "convalg/combinatorics.hpp"

namespace convalg {

class Subspace {
 public:
  Subspace() = default;
  /// Span of the given vectors (rows of length d, entries mod q).
  static Subspace span(int q, int d, const std::vector<std::vector<int>>& vectors);
  static Subspace zero(int q, int d);
  static Subspace whole(int q, int d);

  int q() const { return q_; }
  int ambient() const { return d_; }
  int dim() const;
  std::uint32_t members() const { return members_; }
  bool contains(const Subspace& other) const { return (other.members_ & ~members_) == 0; }
  Subspace intersect(const Subspace& other) const;
  /// Reduced row echelon basis.
  std::vector<std::vector<int>> basis() const;

  friend bool operator==(const Subspace&, const Subspace&) = default;
  friend auto operator<=>(const Subspace&, const Subspace&) = default;

 private:
  int q_ = 2, d_ = 0;
  std::uint32_t members_ = 1;  // the zero vector
};

/// 0 = D_0 <= D_1 <= ... <= D_n = F_q^d.
struct Flag {
  std::vector<Subspace> chain;
  int steps() const { return static_cast<int>(chain.size()) - 1; }
  Composition type() const;
  bool valid() const;
  friend bool operator==(const Flag&, const Flag&) = default;
};

struct FlagPair {
  Flag first, second;
};

using FqMatrix = std::vector<std::vector<int>>;

/// a_ij = N(i,j) - N(i-1,j) - N(i,j-1) + N(i-1,j-1), N(i,j) = dim(D_i cap D'_j).
IntMatrix orbit_matrix(const FlagPair& fp);

std::vector<Subspace> all_subspaces(int q, int d);
/// All n-step flags of every type.
std::vector<Flag> all_flags(int n, int d, int q);
/// Counts of flag pairs per relative position. Requires n <= 3, d <= 3, q in {2, 3}.
std::map<IntMatrix, long> orbit_census(int n, int d, int q);

FqMatrix random_invertible(int d, int q, std::mt19937_64& rng);
Subspace apply(const FqMatrix& g, const Subspace& s);
Flag apply(const FqMatrix& g, const Flag& f);

/// Full flag whose i-th step is spanned by the first i vectors of sigma's permuted basis:
/// D_i = span(e_{sigma(0)}, ..., e_{sigma(i-1)}).
Flag coordinate_flag(const Permutation& sigma, int q);

}  // namespace convalg
