#include <doctest.h>

#include <numeric>

#include "convalg/heisenberg.hpp"
#include "oracles.hpp"

using namespace convalg;

namespace {

ComplexMatrix dense_rep(const TorsionPoint& a, int c) { return rep_matrix(a, c).dense(); }

}  // namespace

TEST_SUITE("heisenberg") {

TEST_CASE("Weil pairing") {
  CHECK(weil_pairing(TorsionPoint(1, 0, 2), TorsionPoint(0, 1, 2)) == 1);
  CHECK(std::abs(root_of_unity(1, 2) - Complex(-1.0)) < 1e-15);
  std::mt19937_64 rng(2);
  for (int s = 0; s < 20; ++s) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const TorsionPoint a(static_cast<int>(rng() % n), static_cast<int>(rng() % n), n);
    const TorsionPoint b(static_cast<int>(rng() % n), static_cast<int>(rng() % n), n);
    CHECK(weil_pairing(a, a) == 0);
    CHECK((weil_pairing(a, b) + weil_pairing(b, a)) % n == 0);
    // bilinear
    CHECK(weil_pairing(a + b, b) == weil_pairing(a, b));
  }
  CHECK_THROWS_AS(weil_pairing(TorsionPoint(1, 0, 2), TorsionPoint(1, 0, 3)), std::invalid_argument);
}

TEST_CASE("group law is associative with identity") {
  for (int n = 1; n <= 4; ++n)
    for (const auto& a : torsion_points(n))
      for (const auto& b : torsion_points(n)) {
        const HeisenbergElement x{a, 1 % n}, y{b, 0}, z{a + b, n - 1};
        CHECK(heisenberg_product(heisenberg_product(x, y), z) == heisenberg_product(x, heisenberg_product(y, z)));
        CHECK(heisenberg_product(x, HeisenbergElement{TorsionPoint(0, 0, n), 0}) == x);
      }
}

TEST_CASE("charge-1 matrices at n = 2") {
  ComplexMatrix clock(2, 2), shift(2, 2);
  clock << 1, 0, 0, -1;
  shift << 0, 1, 1, 0;
  CHECK((dense_rep(TorsionPoint(1, 0, 2), 1) - clock).norm() < 1e-15);
  CHECK((dense_rep(TorsionPoint(0, 1, 2), 1) - shift).norm() < 1e-15);
}

TEST_CASE("centre acts by zeta^c") {
  for (int n = 1; n <= 6; ++n)
    for (int c = 0; c < n; ++c)
      for (int z = 0; z < n; ++z) {
        const auto m = rep_matrix(HeisenbergElement{TorsionPoint(0, 0, n), z}, c);
        CHECK(m.scalar_exponent() == (c * z) % n);
      }
}

TEST_CASE("clock-shift relation with a fixed sign") {
  for (int n = 1; n <= 8; ++n) {
    const ComplexMatrix lhs = shift_matrix(n).dense() * clock_matrix(n).dense();
    const ComplexMatrix rhs = root_of_unity(kClockShiftSign, n) * clock_matrix(n).dense() * shift_matrix(n).dense();
    CHECK((lhs - rhs).norm() < 1e-12);
  }
}

TEST_CASE("commutator is the Weil pairing to the power sign * c, n <= 6") {
  for (int n = 1; n <= 6; ++n)
    for (int c = 1; c <= n; ++c) {
      if (std::gcd(c, n) != 1) continue;
      for (const auto& a : torsion_points(n))
        for (const auto& b : torsion_points(n)) {
          const ComplexMatrix ta = dense_rep(a, c), tb = dense_rep(b, c);
          const ComplexMatrix comm = ta * tb * ta.inverse() * tb.inverse();
          const Complex expect = root_of_unity(kCommutatorSign * c * weil_pairing(a, b), n);
          CHECK((comm - expect * ComplexMatrix::Identity(n, n)).norm() < 1e-12);
          CHECK(commutator_exponent(a, b, c) == ((kCommutatorSign * c * weil_pairing(a, b)) % n + n) % n);
        }
    }
}

TEST_CASE("monomial arithmetic agrees with dense arithmetic") {
  std::mt19937_64 rng(6);
  for (int n = 1; n <= 5; ++n)
    for (int s = 0; s < 10; ++s) {
      const TorsionPoint a(static_cast<int>(rng() % n), static_cast<int>(rng() % n), n);
      const TorsionPoint b(static_cast<int>(rng() % n), static_cast<int>(rng() % n), n);
      const auto ma = rep_matrix(a, 1), mb = rep_matrix(b, 1);
      CHECK(((ma * mb).dense() - ma.dense() * mb.dense()).norm() < 1e-12);
      CHECK((ma.inverse().dense() - ma.dense().inverse()).norm() < 1e-12);
      CHECK((ma.power(3).dense() - ma.dense() * ma.dense() * ma.dense()).norm() < 1e-12);
      const ComplexMatrix d = ma.dense();
      for (long k = 0; k < d.size(); ++k) {
        const double r = std::abs(d.data()[k]);
        CHECK(std::abs(r * (r - 1.0)) < 1e-14);
      }
      CHECK((d * d.adjoint() - ComplexMatrix::Identity(n, n)).norm() < 1e-12);
    }
}

TEST_CASE("commutant dimension") {
  CHECK(commutant_dimension(3, 1) == 1);
  CHECK(commutant_dimension(2, 1) == 1);
  CHECK(commutant_dimension(4, 2) > 1);
  for (int n = 1; n <= 6; ++n)
    for (int c = 0; c < n; ++c) CHECK((commutant_dimension(n, c) == 1) == (std::gcd(c, n) == 1));
}

TEST_CASE("tensor sum equals n times the flip") {
  for (int n = 1; n <= 5; ++n)
    for (int c = 1; c <= n; ++c) {
      if (std::gcd(c, n) != 1) continue;
      CHECK(tensor_sum_is_flip(n, c));
      ComplexMatrix sum = ComplexMatrix::Zero(n * n, n * n);
      for (const auto& a : torsion_points(n)) sum += oracle::kron(dense_rep(a, c), dense_rep(a, c).inverse());
      CHECK((sum - static_cast<double>(n) * flip_matrix(n)).norm() < 1e-10);
      CHECK((tensor_sum_dense(n, c, false) - sum).norm() < 1e-10);
      CHECK((tensor_sum_dense(n, c, true) - sum + ComplexMatrix::Identity(n * n, n * n)).norm() < 1e-10);
    }
  // the flip swaps tensor legs
  const ComplexMatrix p = flip_matrix(3);
  Eigen::VectorXcd x = Eigen::VectorXcd::Random(3), y = Eigen::VectorXcd::Random(3);
  Eigen::VectorXcd xy(9), yx(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) xy(3 * i + j) = x(i) * y(j), yx(3 * i + j) = y(i) * x(j);
  CHECK((p * xy - yx).norm() < 1e-14);
}

TEST_CASE("functional model") {
  std::mt19937_64 rng(12);
  for (int n = 1; n <= 6; ++n) {
    for (int c = 1; c <= n; ++c)
      if (std::gcd(c, n) == 1) CHECK(functional_space_basis(n, c).cols() == n);
    for (int s = 0; s < 20; ++s) {
      HeisenbergElement x{TorsionPoint(static_cast<int>(rng() % n), static_cast<int>(rng() % n), n), static_cast<int>(rng() % n)};
      HeisenbergElement y{TorsionPoint(static_cast<int>(rng() % n), static_cast<int>(rng() % n), n), static_cast<int>(rng() % n)};
      const ComplexMatrix lhs = functional_model(x, 1) * functional_model(y, 1);
      CHECK((lhs - functional_model(heisenberg_product(x, y), 1)).norm() < 1e-12);
    }
  }
}

TEST_CASE("commutator scalars of the two models") {
  // Similar representations have equal commutator scalars. The functional model's is the
  // pairing squared to the c, the matrix model's the pairing to -c; they agree only when
  // 3c = 0 mod n, so an intertwiner exists exactly for n in {1, 3} at c = 1.
  for (int n = 1; n <= 6; ++n) {
    const TorsionPoint e1(1 % n, 0, n), e2(0, 1 % n, n);
    const ComplexMatrix f1 = functional_model({e1, 0}, 1), f2 = functional_model({e2, 0}, 1);
    const ComplexMatrix fc = f1 * f2 * f1.inverse() * f2.inverse();
    const Complex functional_scalar = fc(0, 0);
    CHECK((fc - functional_scalar * ComplexMatrix::Identity(n, n)).norm() < 1e-12);
    CHECK(std::abs(functional_scalar - root_of_unity(2 * weil_pairing(e1, e2), n)) < 1e-12);
    const bool same = std::abs(functional_scalar - root_of_unity(commutator_exponent(e1, e2, 1), n)) < 1e-9;
    CHECK(same == (n == 1 || n == 3));
    const auto r = find_intertwiner(n, 1, true);
    CHECK(r.found == same);
    if (r.found) CHECK(r.residual < 1e-9);
  }
}

}  // TEST_SUITE
