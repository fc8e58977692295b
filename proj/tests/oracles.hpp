#pragma once

// Independent reference computations used only by the tests. Nothing here calls the
// library routine it is meant to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "convalg/combinatorics.hpp"
#include "convalg/funcspace.hpp"

namespace oracle {

using convalg::Composition;
using convalg::IntMatrix;
using convalg::Rational;

inline std::vector<int> segment_labels(const Composition& v) {
  std::vector<int> out;
  for (int i = 0; i < v.n(); ++i)
    for (int k = 0; k < v[i]; ++k) out.push_back(i);
  return out;
}

/// |S_v1 \ S_d / S_v2| by orbit counting: classes of sigma under row/col label pairs.
inline long double_coset_count(const Composition& v1, const Composition& v2) {
  const int d = v1.d();
  const auto l1 = segment_labels(v1), l2 = segment_labels(v2);
  std::vector<int> p(static_cast<std::size_t>(d));
  std::iota(p.begin(), p.end(), 0);
  std::set<std::vector<int>> classes;
  do {
    // invariant of the double coset: counts of (label1(a), label2(sigma(a)))
    std::vector<int> cnt(static_cast<std::size_t>(v1.n() * v2.n()), 0);
    for (int a = 0; a < d; ++a) ++cnt[static_cast<std::size_t>(l1[a] * v2.n() + l2[p[a]])];
    classes.insert(cnt);
  } while (std::next_permutation(p.begin(), p.end()));
  return static_cast<long>(classes.size());
}

/// Bruhat order on permutations by the rank criterion.
inline bool bruhat_rank(const std::vector<int>& s, const std::vector<int>& t) {
  const int d = static_cast<int>(s.size());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      int rs = 0, rt = 0;
      for (int a = 0; a <= i; ++a) {
        rs += s[a] >= j;
        rt += t[a] >= j;
      }
      if (rs > rt) return false;
    }
  return true;
}

inline int inversions(const std::vector<int>& s) {
  int k = 0;
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = a + 1; b < s.size(); ++b) k += s[a] > s[b];
  return k;
}

/// Schur structure constant c^C_{AB} as a count of middle label sequences.
inline long schur_count(const IntMatrix& a, const IntMatrix& b, const IntMatrix& c) {
  if (a.row_sums() != c.row_sums() || b.col_sums() != c.col_sums() || a.col_sums() != b.row_sums()) return 0;
  const int n = c.n(), d = c.total();
  std::vector<int> I, J;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < c.at(i, j); ++k) I.push_back(i), J.push_back(j);
  long count = 0;
  std::vector<int> K(static_cast<std::size_t>(d), 0);
  while (true) {
    IntMatrix ak(n), kb(n);
    for (int p = 0; p < d; ++p) ak.add(I[p], K[p], 1), kb.add(K[p], J[p], 1);
    count += (ak == a && kb == b);
    int p = 0;
    while (p < d && ++K[p] == n) K[p++] = 0;
    if (p == d) break;
  }
  return count;
}

/// Evaluates an orbit-sum polynomial directly from its definition: every distinct rearrangement
/// of each block's exponent segment, as a product of powers.
inline Rational eval_poly(const convalg::BlockSymFunction& f, const std::vector<std::vector<Rational>>& config) {
  const auto& shape = f.shape();
  Rational total = 0;
  for (const auto& [key, coef] : f.terms()) {
    Rational prod = coef;
    for (int b = 0; b < shape.count(); ++b) {
      std::vector<int> e(key.begin() + shape.offset(b), key.begin() + shape.offset(b) + shape.size(b));
      std::sort(e.begin(), e.end());
      Rational s = 0;
      do {
        Rational m = 1;
        for (std::size_t k = 0; k < e.size(); ++k) {
          Rational x = 1;
          for (int r = 0; r < e[k]; ++r) x *= config[static_cast<std::size_t>(b)][k];
          m *= x;
        }
        s += m;
      } while (std::next_permutation(e.begin(), e.end()));
      prod *= s;
    }
    total += prod;
  }
  return total;
}

/// Transfer along a merge by summing over all ordered splittings of each target block.
template <class Eval>
Rational transfer_at(const convalg::MergeMap& m, const std::vector<std::vector<Rational>>& target_config, Eval eval) {
  const auto& src = m.source();
  std::vector<std::vector<Rational>> src_config(static_cast<std::size_t>(src.count()));
  Rational total = 0;
  std::function<void(int)> rec = [&](int t) {
    if (t == m.target().count()) {
      total += eval(src_config);
      return;
    }
    const auto& fib = m.fiber(t);
    std::vector<int> labels;
    for (std::size_t k = 0; k < fib.size(); ++k)
      for (int r = 0; r < src.size(fib[k]); ++r) labels.push_back(static_cast<int>(k));
    do {
      for (int b : fib) src_config[static_cast<std::size_t>(b)].clear();
      for (std::size_t p = 0; p < labels.size(); ++p)
        src_config[static_cast<std::size_t>(fib[static_cast<std::size_t>(labels[p])])].push_back(
            target_config[static_cast<std::size_t>(t)][p]);
      rec(t + 1);
    } while (std::next_permutation(labels.begin(), labels.end()));
  };
  rec(0);
  return total;
}

/// Theta with characteristics by plain summation over |m| <= 60 in long double.
inline std::complex<double> theta_naive(double a, double b, std::complex<double> z, std::complex<double> tau) {
  using C = std::complex<long double>;
  const long double pi = 3.141592653589793238462643383279502884L;
  const C I(0, 1), zz(z.real(), z.imag()), tt(tau.real(), tau.imag());
  C s = 0;
  for (int m = -60; m <= 60; ++m) {
    const long double ma = m + a;
    s += std::exp(pi * I * ma * ma * tt + 2.0L * pi * I * ma * (zz + C(b, 0)));
  }
  return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
}

/// Kronecker product, row-major convention.
inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace oracle
