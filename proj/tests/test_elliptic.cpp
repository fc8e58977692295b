#include <doctest.h>

#include "convalg/elliptic.hpp"
#include "oracles.hpp"

using namespace convalg;

namespace {

const Complex kI(0.0, 1.0);
const Complex kTau2(0.3, 1.1);

ComplexMatrix random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix m(n, n);
  for (long k = 0; k < m.size(); ++k) m.data()[k] = Complex(g(rng), g(rng));
  return m;
}

}  // namespace

TEST_SUITE("elliptic") {

TEST_CASE("theta with characteristics") {
  for (Complex tau : {kI, kTau2}) {
    CHECK(std::abs(theta_char(0.5, 0.5, 0.0, tau)) < 1e-12);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int s = 0; s < 10; ++s) {
      const double a = u(rng), b = u(rng);
      const Complex z(u(rng), u(rng));
      const Complex t = theta_char(a, b, z, tau);
      CHECK(std::abs(t - oracle::theta_naive(a, b, z, tau)) < 1e-12 * std::max(1.0, std::abs(t)));
      CHECK(std::abs(theta_char(a, b, z + 1.0, tau) - std::exp(2.0 * M_PI * kI * a) * t) < 1e-12 * std::max(1.0, std::abs(t)));
      const Complex shifted = std::exp(-M_PI * kI * tau - 2.0 * M_PI * kI * (z + b)) * t;
      CHECK(std::abs(theta_char(a, b, z + tau, tau) - shifted) < 1e-11 * std::max(1.0, std::abs(shifted)));
      // derivative against a central difference
      const double h = 1e-5;
      const Complex fd = (theta_char(a, b, z + h, tau) - theta_char(a, b, z - h, tau)) / (2 * h);
      CHECK(std::abs(theta_char_prime(a, b, z, tau) - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
  const Complex t00 = theta_char(0.0, 0.0, 0.0, kI);
  CHECK(std::abs(t00 - 1.0864348112133080) < 1e-14);
  CHECK(std::abs(theta_char(0.0, 0.0, 0.0, kI, 2.0) - t00) < 1e-14);
  CHECK_THROWS_AS(theta_char(0.0, 0.0, 0.0, Complex(0.0, -1.0)), std::invalid_argument);
}

TEST_CASE("w functions satisfy both defining conditions") {
  std::mt19937_64 rng(3);
  for (int n : {2, 3})
    for (Complex tau : {kI, kTau2}) {
      const Lattice lat(tau, n);
      for (const auto& a : torsion_points(n)) {
        const WFunction w(a, lat);
        if (a.is_zero()) {
          CHECK(w(Complex(0.31, 0.17)) == Complex(1.0));
          continue;
        }
        CHECK(w.calibration().accepted);
        CHECK(std::abs(w.residue() - 1.0) < 1e-9);
        for (const auto& u : sample_points(lat, 8, rng, 0.1 / n)) {
          const Complex wu = w(u);
          CHECK(std::isfinite(std::abs(wu)));
          for (const auto& b : torsion_points(n))
            CHECK(std::abs(w(u + lat.torsion(b)) - root_of_unity(weil_pairing(b, a), n) * wu) / std::abs(wu) < 1e-9);
          // full lattice periods
          CHECK(std::abs(w(u + 1.0) - wu) / std::abs(wu) < 1e-9);
          CHECK(std::abs(w(u + tau) - wu) / std::abs(wu) < 1e-9);
        }
      }
    }
}

TEST_CASE("pole guard") {
  const Lattice lat(kI, 2);
  CHECK_THROWS_AS(check_pole_guard(Complex(0.5, 0.0004), lat, "test"), std::domain_error);
  CHECK_NOTHROW(check_pole_guard(Complex(0.25, 0.25), lat, "test"));
  const BelavinRMatrix r(lat, 1);
  CHECK_THROWS_AS(r(Complex(1e-4, 0.0)), std::domain_error);
  CHECK(distance_to_torsion(Complex(0.5, 0.5), lat) < 1e-15);
}

TEST_CASE("r-matrix basics") {
  const Lattice lat(kI, 2);
  const BelavinRMatrix r(lat, 1);
  const ComplexMatrix m = r(Complex(0.3, 0.0));
  CHECK(m.allFinite());
  CHECK(m.norm() > 0);
  const Complex u(0.41, 0.13), v(0.12, -0.2);
  CHECK((r(u, v) - r(u - v)).norm() < 1e-14);
  // direct sum of w_alpha T (x) T^-1
  ComplexMatrix direct = ComplexMatrix::Zero(4, 4);
  for (const auto& w : r.w())
    if (!w.alpha().is_zero()) {
      const ComplexMatrix t = rep_matrix(w.alpha(), 1).dense();
      direct += w(u) * oracle::kron(t, t.inverse());
    }
  CHECK((direct - r(u)).norm() < 1e-12);
}

TEST_CASE("residue limit nP - I") {
  for (auto [n, c] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {3, 2}}) {
    const BelavinRMatrix r(Lattice(kI, n), c);
    const ComplexMatrix expect = static_cast<double>(n) * flip_matrix(n) - ComplexMatrix::Identity(n * n, n * n);
    CHECK((r.residue() - expect).norm() < 1e-6);
  }
}

TEST_CASE("leg embeddings") {
  std::mt19937_64 rng(4);
  const int n = 2;
  const ComplexMatrix a = random_matrix(n, rng), b = random_matrix(n, rng);
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix ab = oracle::kron(a, b);
  CHECK((leg12(ab, n) - oracle::kron(oracle::kron(a, b), id)).norm() < 1e-13);
  CHECK((leg23(ab, n) - oracle::kron(id, oracle::kron(a, b))).norm() < 1e-13);
  CHECK((leg13(ab, n) - oracle::kron(oracle::kron(a, id), b)).norm() < 1e-13);
}

TEST_CASE("classical Yang-Baxter equation") {
  const BelavinRMatrix r2(Lattice(kI, 2), 1);
  const auto one = cybe_residual(Complex(0.23, 0.11), Complex(0.37, -0.05), r2);
  CHECK(one.residual < 1e-8);
  CHECK_FALSE(one.variants.empty());

  const BelavinRMatrix r3(Lattice(kTau2, 3), 1), r3_long(Lattice(kTau2, 3), 1, 2.0);
  std::mt19937_64 rng(7);
  int done = 0;
  while (done < 20) {
    const auto p = sample_points(r3.lattice(), 2, rng, 0.02);
    if (distance_to_torsion(p[0] + p[1], r3.lattice()) < 0.02) continue;
    const double res = cybe_residual(p[0], p[1], r3).residual;
    CHECK(res < 1e-8);
    CHECK(std::abs(res - cybe_residual(p[0], p[1], r3_long).residual) < 1e-12);
    ++done;
  }
}

TEST_CASE("automorphy") {
  const int n = 3, c = 1;
  const Lattice lat(kTau2, n);
  const BelavinRMatrix r(lat, c);
  std::mt19937_64 rng(5);
  const auto xs = sample_points(lat, 8, rng, 0.05);
  const ComplexMatrix s = Complex(2.0, 1.0) * ComplexMatrix::Identity(n, n);
  CHECK(automorphy_check([s](Complex) { return s; }, c, lat, xs).max_deviation < 1e-10);
  for (const auto& b : torsion_points(n)) {
    if (b.is_zero()) continue;
    CHECK(automorphy_check(section(r, b.scaled(kCommutatorSign * c), b), c, lat, xs).max_deviation < 1e-9);
    const auto raw = automorphy_check(section(r, b, b), c, lat, xs, &b);
    CHECK(raw.exponent_correction == ((1 - kCommutatorSign * c) % n + n) % n);
    const TorsionPoint other = b + TorsionPoint(1, 0, n);
    if (!other.is_zero()) CHECK(automorphy_check(section(r, b.scaled(kCommutatorSign * c), other), c, lat, xs).max_deviation > 0.1);
  }
}

TEST_CASE("E_n action on degree-1 operators, n = 2") {
  const int n = 2, c = 1;
  for (Complex tau : {kI, kTau2}) {
    const Lattice lat(tau, n);
    const BelavinRMatrix r(lat, c);
    std::mt19937_64 rng(9);
    // Lambda-periodic matrix function
    std::vector<ComplexMatrix> coeff;
    for (int k = 0; k <= n * n; ++k) coeff.push_back(random_matrix(n, rng));
    const MatrixFunction f = [&r, coeff](Complex x) {
      ComplexMatrix out = coeff[0];
      for (std::size_t k = 0; k < r.w().size(); ++k) out += r.w()[k](x) * coeff[k + 1];
      return out;
    };
    const auto op = operator_of_matrix_function(f, n, lat);
    CHECK(sampled_deviation(en_action(op, TorsionPoint(0, 0, n), c, lat), op, 4, rng, lat) < 1e-12);
    for (const auto& a : torsion_points(n))
      for (const auto& b : torsion_points(n)) {
        const auto lhs = en_action(en_action(op, b, c, lat), a, c, lat);
        CHECK(sampled_deviation(lhs, en_action(op, a + b, c, lat), 3, rng, lat) < 1e-10);
      }
    for (const auto& b : torsion_points(n)) {
      const auto sec = operator_of_matrix_function(section(r, b.scaled(kCommutatorSign * c), b), n, lat);
      for (const auto& a : torsion_points(n)) CHECK(sampled_deviation(en_action(sec, a, c, lat), sec, 3, rng, lat) < 1e-9);
    }
    // a non-automorphic operator moves
    double moved = 0;
    for (const auto& a : torsion_points(n)) moved = std::max(moved, sampled_deviation(en_action(op, a, c, lat), op, 3, rng, lat));
    CHECK(moved > 0.1);
  }
}

TEST_CASE("E_n action rejects a foreign lattice") {
  const Lattice lat(kI, 2), other(kTau2, 2);
  const BelavinRMatrix r(lat, 1);
  const auto op = operator_of_matrix_function(section(r, TorsionPoint(1, 0, 2), TorsionPoint(1, 0, 2)), 2, lat);
  CHECK_THROWS_AS(en_action(op, TorsionPoint(1, 1, 2), 1, other), std::invalid_argument);
}

}  // TEST_SUITE
