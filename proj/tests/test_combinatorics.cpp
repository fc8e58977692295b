#include <doctest.h>

#include "convalg/combinatorics.hpp"
#include "oracles.hpp"

using namespace convalg;

namespace {

IntMatrix M(std::vector<std::vector<int>> rows) { return IntMatrix::from_rows(rows); }
Composition V(std::vector<int> p) { return Composition(std::move(p)); }

}  // namespace

TEST_SUITE("combinatorics") {

TEST_CASE("compositions") {
  std::vector<Composition> expect{V({0, 2}), V({1, 1}), V({2, 0})};
  CHECK(enumerate_compositions(2, 2) == expect);
  CHECK(enumerate_compositions(1, 5) == std::vector<Composition>{V({5})});
  CHECK(enumerate_compositions(3, 0) == std::vector<Composition>{V({0, 0, 0})});
  // stars and bars
  CHECK(enumerate_compositions(3, 4).size() == 15);
}

TEST_CASE("matrices with given marginals") {
  std::vector<IntMatrix> got = enumerate_matrices(V({1, 1}), V({1, 1}));
  std::sort(got.begin(), got.end());
  std::vector<IntMatrix> expect{M({{0, 1}, {1, 0}}), M({{1, 0}, {0, 1}})};
  CHECK(got == expect);
  CHECK(enumerate_matrices(V({2, 0}), V({1, 1})) == std::vector<IntMatrix>{M({{1, 1}, {0, 0}})});
}

TEST_CASE("matrix count equals double coset count, d <= 4") {
  for (int n = 1; n <= 3; ++n)
    for (int d = 0; d <= 4; ++d)
      for (const auto& v1 : enumerate_compositions(n, d))
        for (const auto& v2 : enumerate_compositions(n, d)) {
          const auto ms = enumerate_matrices(v1, v2);
          CHECK(static_cast<long>(ms.size()) == oracle::double_coset_count(v1, v2));
          for (const auto& a : ms) {
            CHECK(a.row_sums() == v1);
            CHECK(a.col_sums() == v2);
          }
        }
}

TEST_CASE("matrix of a permutation") {
  CHECK(matrix_of_permutation(Permutation::identity(3), V({2, 1}), V({2, 1})) == M({{2, 0}, {0, 1}}));
  CHECK(matrix_of_permutation(Permutation({0, 2, 1}), V({2, 1}), V({2, 1})) == M({{1, 1}, {1, 0}}));
}

TEST_CASE("matrix of a permutation is constant on double cosets, d <= 4") {
  for (int d = 1; d <= 4; ++d)
    for (int n = 1; n <= 3; ++n)
      for (const auto& v1 : enumerate_compositions(n, d))
        for (const auto& v2 : enumerate_compositions(n, d)) {
          const auto l1 = oracle::segment_labels(v1), l2 = oracle::segment_labels(v2);
          std::vector<int> p(static_cast<std::size_t>(d));
          std::iota(p.begin(), p.end(), 0);
          std::map<std::vector<int>, IntMatrix> seen;
          do {
            // the double coset is determined by the label-pair multiset
            std::vector<int> key(static_cast<std::size_t>(n * n), 0);
            for (int a = 0; a < d; ++a) ++key[static_cast<std::size_t>(l1[a] * n + l2[p[a]])];
            const auto m = matrix_of_permutation(Permutation(p), v1, v2);
            auto [it, fresh] = seen.emplace(key, m);
            if (!fresh) CHECK(it->second == m);
          } while (std::next_permutation(p.begin(), p.end()));
        }
}

TEST_CASE("corner-sum order examples") {
  CHECK(preceq(M({{1, 0}, {0, 1}}), M({{0, 1}, {1, 0}})));
  CHECK_FALSE(preceq(M({{0, 1}, {1, 0}}), M({{1, 0}, {0, 1}})));
  // different marginals are incomparable
  CHECK_FALSE(preceq(M({{1, 0}, {0, 1}}), M({{2, 0}, {0, 0}})));
}

TEST_CASE("corner-sum order is a partial order, d <= 4") {
  for (int n = 1; n <= 3; ++n)
    for (int d = 0; d <= 4; ++d)
      for (const auto& v1 : enumerate_compositions(n, d))
        for (const auto& v2 : enumerate_compositions(n, d)) {
          const auto ms = enumerate_matrices(v1, v2);
          for (const auto& a : ms) {
            CHECK(preceq(a, a));
            for (const auto& b : ms) {
              if (a != b && preceq(a, b)) CHECK_FALSE(preceq(b, a));
              if (!preceq(a, b)) continue;
              for (const auto& c : ms)
                if (preceq(b, c)) CHECK(preceq(a, c));
            }
          }
        }
}

TEST_CASE("Bruhat order examples") {
  const auto id = M({{1, 0}, {0, 1}}), anti = M({{0, 1}, {1, 0}});
  CHECK(bruhat_leq(id, anti));
  CHECK_FALSE(bruhat_leq(anti, id));
}

TEST_CASE("Bruhat order on permutations agrees with the rank criterion, d <= 5") {
  for (int d = 1; d <= 5; ++d) {
    std::vector<std::vector<int>> perms;
    std::vector<int> p(static_cast<std::size_t>(d));
    std::iota(p.begin(), p.end(), 0);
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    for (const auto& s : perms)
      for (const auto& t : perms) CHECK(bruhat_leq(Permutation(s), Permutation(t)) == oracle::bruhat_rank(s, t));
  }
}

TEST_CASE("Bruhat implies corner-sum order, d <= 4") {
  long comparable = 0;
  for (int d = 0; d <= 4; ++d)
    for (int n = 1; n <= std::max(1, d); ++n)
      for (const auto& v1 : enumerate_compositions(n, d))
        for (const auto& v2 : enumerate_compositions(n, d)) {
          const auto ms = enumerate_matrices(v1, v2);
          for (const auto& a : ms)
            for (const auto& b : ms)
              if (bruhat_leq(a, b)) {
                ++comparable;
                CHECK(preceq(a, b));
              }
        }
  CHECK(comparable > 0);
}

TEST_CASE("minimal representative lies in its double coset and is shortest") {
  for (int d = 1; d <= 4; ++d)
    for (int n = 2; n <= 3; ++n)
      for (const auto& v1 : enumerate_compositions(n, d))
        for (const auto& v2 : enumerate_compositions(n, d))
          for (const auto& a : enumerate_matrices(v1, v2)) {
            const auto w = minimal_representative(a);
            CHECK(matrix_of_permutation(w, v1, v2) == a);
            std::vector<int> p(static_cast<std::size_t>(d));
            std::iota(p.begin(), p.end(), 0);
            do
              if (matrix_of_permutation(Permutation(p), v1, v2) == a) CHECK(w.length() <= oracle::inversions(p));
            while (std::next_permutation(p.begin(), p.end()));
          }
}

TEST_CASE("reduced words") {
  for (int d = 1; d <= 5; ++d) {
    std::vector<int> p(static_cast<std::size_t>(d));
    std::iota(p.begin(), p.end(), 0);
    do {
      const Permutation s(p);
      const auto w = reduced_word(s);
      CHECK(static_cast<int>(w.size()) == oracle::inversions(p));
      Permutation prod = Permutation::identity(d);
      for (int k : w) prod = prod * Permutation::simple(d, k);
      CHECK(prod == s);
    } while (std::next_permutation(p.begin(), p.end()));
  }
}

TEST_CASE("length statistic") {
  CHECK(length_statistic(M({{2, 0}, {0, 1}})) == 0);
  CHECK(length_statistic(M({{0, 1}, {1, 0}})) == 2);
  CHECK(length_statistic(M({{0, 0, 1}, {0, 0, 0}, {1, 0, 0}})) == 6);
}

TEST_CASE("length statistic drops along the recursion step, d <= 4") {
  for (int n = 2; n <= 3; ++n)
    for (int d = 1; d <= 4; ++d)
      for (const auto& c : enumerate_all_matrices(n, d))
        for (int p = 0; p < n; ++p)
          for (int q = p + 1; q < n; ++q) {
            const int cpq = c.at(p, q);
            if (cpq == 0) continue;
            IntMatrix b = c;
            b.add(p + 1, q, cpq);
            b.add(p, q, -cpq);
            CHECK(length_statistic(b) < length_statistic(c));
          }
}

TEST_CASE("generator matrices") {
  CHECK(generator_matrix(V({1, 1}), 0, 1) == M({{1, 1}, {0, 0}}));
  CHECK(generator_matrix(V({0, 2}), 0, 1) == M({{0, 1}, {0, 1}}));
  CHECK(generator_matrix(V({2, 1}), 1, 0) == M({{1, 0}, {1, 1}}));
  for (const auto& v : enumerate_compositions(3, 3))
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (v[j] == 0 || i == j) continue;
        CHECK(generator_matrix(v, i, j).col_sums() == v);
      }
}

TEST_CASE("transfer arrays") {
  const auto a = M({{0, 1}, {0, 1}}), b = M({{0, 0}, {1, 1}});
  const auto ts = transfer_arrays(a, b);
  REQUIRE(ts.size() == 2);
  std::set<IntMatrix> m13;
  for (const auto& t : ts) m13.insert(t.marginal13());
  CHECK(m13 == std::set<IntMatrix>{M({{1, 0}, {0, 1}}), M({{0, 1}, {1, 0}})});

  const auto v = V({2, 1});
  const auto diag = IntMatrix::diagonal(v);
  for (const auto& bb : enumerate_matrices(v, V({1, 2}))) {
    const auto one = transfer_arrays(diag, bb);
    REQUIRE(one.size() == 1);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) CHECK(one[0].at(i, j, k) == (i == j ? bb.at(j, k) : 0));
  }
  const auto dd = transfer_arrays(diag, diag);
  REQUIRE(dd.size() == 1);
  CHECK(dd[0].marginal13() == diag);
}

TEST_CASE("transfer array marginals are exact; count equals brute force, n <= 2, d <= 4") {
  for (int d = 0; d <= 4; ++d) {
    const auto mats = enumerate_all_matrices(2, d);
    for (const auto& a : mats)
      for (const auto& b : mats) {
        if (a.col_sums() != b.row_sums()) {
          CHECK_THROWS_AS(transfer_arrays(a, b), std::invalid_argument);
          continue;
        }
        const auto ts = transfer_arrays(a, b);
        for (const auto& t : ts) {
          CHECK(t.marginal12() == a);
          CHECK(t.marginal23() == b);
        }
        long brute = 0;
        std::vector<int> e(8, 0);
        while (true) {
          TransferArray t(2);
          for (int k = 0; k < 8; ++k) t.set(k >> 2, (k >> 1) & 1, k & 1, e[static_cast<std::size_t>(k)]);
          brute += t.marginal12() == a && t.marginal23() == b;
          int k = 0;
          while (k < 8 && ++e[static_cast<std::size_t>(k)] > d) e[static_cast<std::size_t>(k++)] = 0;
          if (k == 8) break;
        }
        CHECK(static_cast<long>(ts.size()) == brute);
      }
  }
}

TEST_CASE("splitting set and leading array") {
  const auto a = M({{0, 1}, {0, 1}}), b = M({{0, 0}, {1, 1}});
  const auto s = splitting_set(a, b, 0);
  REQUIRE(s.size() == 2);
  std::set<std::vector<int>> shares{s[0].shares, s[1].shares};
  CHECK(shares == std::set<std::vector<int>>{{1, 0}, {0, 1}});
  CHECK(leading_array(a, b, 0).product == M({{0, 1}, {1, 0}}));

  // nothing to move
  const auto diag = IntMatrix::diagonal(V({1, 2}));
  const auto b2 = M({{1, 0}, {1, 1}});
  const auto s0 = splitting_set(diag, b2, 0);
  REQUIRE(s0.size() == 1);
  CHECK(s0[0].array.marginal13() == b2);
  CHECK(leading_array(diag, b2, 0).product == b2);
}

TEST_CASE("splitting sets biject with transfer arrays, d <= 4") {
  for (int n = 2; n <= 3; ++n)
    for (int d = 1; d <= 4; ++d)
      for (const auto& b : enumerate_all_matrices(n, d))
        for (int p = 0; p + 1 < n; ++p) {
          const auto v = b.row_sums();
          for (int mass = 1; mass <= v[p + 1]; ++mass) {
            IntMatrix a = IntMatrix::diagonal(v);
            a.add(p + 1, p + 1, -mass);
            a.set(p, p + 1, mass);
            CHECK(splitting_set(a, b, p).size() == transfer_arrays(a, b).size());
            int m = -1;
            for (int k = 0; k < n; ++k)
              if (b.at(p + 1, k) > 0) m = k;
            if (m < 0 || b.at(p + 1, m) < mass) continue;  // leading term needs the mass in one column
            const auto lead = leading_array(a, b, p);
            CHECK(lead.array.marginal12() == a);
            CHECK(lead.array.marginal23() == b);
            IntMatrix c = b;
            c.add(p, m, mass);
            c.add(p + 1, m, -mass);
            CHECK(lead.product == c);
          }
        }
}

}  // TEST_SUITE
