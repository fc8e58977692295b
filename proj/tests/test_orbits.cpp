#include <doctest.h>

#include "convalg/orbits.hpp"
#include "oracles.hpp"

using namespace convalg;

namespace {

// Rank over F_q of a list of vectors, plain Gaussian elimination.
int rank_mod(std::vector<std::vector<int>> rows, int q) {
  int r = 0;
  const int d = rows.empty() ? 0 : static_cast<int>(rows[0].size());
  for (int col = 0; col < d && r < static_cast<int>(rows.size()); ++col) {
    int piv = -1;
    for (int i = r; i < static_cast<int>(rows.size()); ++i)
      if (rows[i][col] % q) piv = i;
    if (piv < 0) continue;
    std::swap(rows[r], rows[piv]);
    const int inv = rows[r][col] == 1 ? 1 : 2;  // q in {2, 3}
    for (auto& x : rows[r]) x = x * inv % q;
    for (int i = 0; i < static_cast<int>(rows.size()); ++i)
      if (i != r && rows[i][col]) {
        const int f = rows[i][col];
        for (int k = 0; k < d; ++k) rows[i][k] = ((rows[i][k] - f * rows[r][k]) % q + q) % q;
      }
    ++r;
  }
  return r;
}

std::vector<int> perm_of_matrix(const IntMatrix& a) {
  std::vector<int> p(static_cast<std::size_t>(a.n()));
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j)
      if (a.at(i, j)) p[static_cast<std::size_t>(i)] = j;
  return p;
}

long q_int(int q, int k) {
  long s = 0, p = 1;
  for (int i = 0; i < k; ++i) s += p, p *= q;
  return s;
}

}  // namespace

TEST_SUITE("orbits") {

TEST_CASE("subspace dimensions agree with Gaussian elimination") {
  for (int q : {2, 3})
    for (int d = 1; d <= (q == 2 ? 3 : 3); ++d)
      for (const auto& s : all_subspaces(q, d)) {
        CHECK(rank_mod(s.basis(), q) == s.dim());
        CHECK(static_cast<int>(s.basis().size()) == s.dim());
        CHECK(Subspace::span(q, d, s.basis()) == s);
      }
  // number of subspaces of F_2^3: 1 + 7 + 7 + 1
  CHECK(all_subspaces(2, 3).size() == 16);
  CHECK(all_subspaces(3, 2).size() == 6);
}

TEST_CASE("examples") {
  const int q = 2;
  const auto id = coordinate_flag(Permutation::identity(2), q);
  CHECK(orbit_matrix({id, id}) == IntMatrix::from_rows({{1, 0}, {0, 1}}));
  const auto sw = coordinate_flag(Permutation({1, 0}), q);
  CHECK(orbit_matrix({id, sw}) == IntMatrix::from_rows({{0, 1}, {1, 0}}));
  const auto census = orbit_census(2, 2, q);
  CHECK(census.at(IntMatrix::from_rows({{1, 0}, {0, 1}})) > 0);
  CHECK(census.at(IntMatrix::from_rows({{0, 1}, {1, 0}})) > 0);
}

TEST_CASE("census realizes exactly the matrices with given marginals, n <= 3, d <= 3") {
  for (int q : {2, 3})
    for (int n = 1; n <= 3; ++n)
      for (int d = 0; d <= (q == 2 ? 3 : 2); ++d) {
        const auto census = orbit_census(n, d, q);
        const auto flags = all_flags(n, d, q);
        std::set<IntMatrix> got, expect;
        long total = 0;
        for (const auto& [a, c] : census) got.insert(a), total += c;
        for (const auto& a : enumerate_all_matrices(n, d)) expect.insert(a);
        CHECK(got == expect);
        CHECK(total == static_cast<long>(flags.size() * flags.size()));
        for (const auto& f : flags) {
          CHECK(f.valid());
          CHECK(orbit_matrix({f, f}) == IntMatrix::diagonal(f.type()));
        }
      }
}

TEST_CASE("orbit matrix has the flag types as marginals") {
  const auto flags = all_flags(3, 3, 2);
  for (std::size_t i = 0; i < flags.size(); i += 3)
    for (std::size_t j = 0; j < flags.size(); j += 5) {
      const auto a = orbit_matrix({flags[i], flags[j]});
      CHECK(a.row_sums() == flags[i].type());
      CHECK(a.col_sums() == flags[j].type());
    }
}

TEST_CASE("orbit matrix invariant under 20 random group elements, d = 3") {
  std::mt19937_64 rng(17);
  for (int q : {2, 3}) {
    const auto flags = all_flags(3, 3, q);
    for (int s = 0; s < 20; ++s) {
      const auto g = random_invertible(3, q, rng);
      CHECK(rank_mod(g, q) == 3);
      const auto& f1 = flags[rng() % flags.size()];
      const auto& f2 = flags[rng() % flags.size()];
      CHECK(orbit_matrix({apply(g, f1), apply(g, f2)}) == orbit_matrix({f1, f2}));
    }
  }
}

TEST_CASE("orbit sizes of full flag pairs are |Fl| q^length") {
  for (int q : {2, 3})
    for (int d = 1; d <= (q == 2 ? 3 : 2); ++d) {
      std::vector<int> ones(static_cast<std::size_t>(d), 1);
      const Composition full(ones);
      long fl = 1;
      for (int k = 1; k <= d; ++k) fl *= q_int(q, k);
      const auto census = orbit_census(d, d, q);
      for (const auto& a : enumerate_matrices(full, full)) {
        long expect = fl;
        for (int k = 0; k < oracle::inversions(perm_of_matrix(a)); ++k) expect *= q;
        CHECK(census.at(a) == expect);
      }
    }
}

TEST_CASE("closure order on full flags matches Bruhat order by the rank criterion, d <= 3") {
  for (int d = 1; d <= 3; ++d) {
    std::vector<int> p(static_cast<std::size_t>(d));
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> perms;
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    const auto base = coordinate_flag(Permutation::identity(d), 2);
    for (const auto& s : perms)
      for (const auto& t : perms) {
        const auto as = orbit_matrix({base, coordinate_flag(Permutation(s), 2)});
        const auto at = orbit_matrix({base, coordinate_flag(Permutation(t), 2)});
        CHECK(bruhat_leq(as, at) == oracle::bruhat_rank(perm_of_matrix(as), perm_of_matrix(at)));
      }
  }
}

TEST_CASE("bounds") {
  CHECK_THROWS_AS(orbit_census(4, 2, 2), BoundExceeded);
  CHECK_THROWS_AS(orbit_census(2, 4, 2), BoundExceeded);
}

}  // TEST_SUITE
