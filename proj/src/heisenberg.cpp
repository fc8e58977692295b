#include "convalg/heisenberg.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace convalg {

namespace {

int mod(long a, int n) { return static_cast<int>(((a % n) + n) % n); }

// Null space of m (columns of the result), via SVD with an absolute tolerance.
ComplexMatrix null_space(const ComplexMatrix& m, double tol) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  long rank = 0;
  for (long k = 0; k < s.size(); ++k)
    if (s(k) > tol) ++rank;
  const long cols = m.cols();
  return svd.matrixV().rightCols(cols - rank);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Integer polynomials, coefficient k for x^k.
using IntPoly = std::vector<long>;

IntPoly poly_divide_exact(IntPoly num, const IntPoly& den) {
  const long dd = static_cast<long>(den.size()) - 1;
  IntPoly q(static_cast<std::size_t>(std::max<long>(static_cast<long>(num.size()) - dd, 1)), 0);
  for (long k = static_cast<long>(num.size()) - 1; k >= dd; --k) {
    long c = num[static_cast<std::size_t>(k)] / den.back();
    q[static_cast<std::size_t>(k - dd)] = c;
    for (long t = 0; t <= dd; ++t) num[static_cast<std::size_t>(k - dd + t)] -= c * den[static_cast<std::size_t>(t)];
  }
  return q;
}

IntPoly cyclotomic(int n) {
  IntPoly p(static_cast<std::size_t>(n) + 1, 0);
  p[0] = -1;
  p[static_cast<std::size_t>(n)] = 1;
  for (int d = 1; d < n; ++d)
    if (n % d == 0) p = poly_divide_exact(p, cyclotomic(d));
  return p;
}

IntPoly poly_mod(IntPoly a, const IntPoly& m) {
  const std::size_t deg = m.size() - 1;
  for (std::size_t k = a.size(); k-- > deg;) {
    long c = a[k];  // m is monic
    if (c == 0) continue;
    for (std::size_t t = 0; t <= deg; ++t) a[k - deg + t] -= c * m[t];
  }
  a.resize(std::max<std::size_t>(deg, 1));
  return a;
}

}  // namespace

TorsionPoint::TorsionPoint(int a1_, int a2_, int n_) : n(n_) {
  if (n_ < 1) throw std::invalid_argument("torsion level must be positive");
  a1 = mod(a1_, n_);
  a2 = mod(a2_, n_);
}

TorsionPoint TorsionPoint::operator+(const TorsionPoint& o) const {
  if (o.n != n) throw std::invalid_argument("torsion points of different levels");
  return {a1 + o.a1, a2 + o.a2, n};
}

TorsionPoint TorsionPoint::operator-() const { return {-a1, -a2, n}; }

TorsionPoint TorsionPoint::scaled(int k) const { return {k * a1, k * a2, n}; }

std::vector<TorsionPoint> torsion_points(int n) {
  std::vector<TorsionPoint> out;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out.emplace_back(a, b, n);
  return out;
}

int weil_pairing(const TorsionPoint& a, const TorsionPoint& b) {
  if (a.n != b.n) throw std::invalid_argument("weil_pairing: points of different levels");
  return mod(static_cast<long>(a.a1) * b.a2 - static_cast<long>(a.a2) * b.a1, a.n);
}

HeisenbergElement heisenberg_product(const HeisenbergElement& x, const HeisenbergElement& y) {
  const int n = x.point.n;
  return {x.point + y.point, mod(weil_pairing(x.point, y.point) + x.central + y.central, n)};
}

std::complex<double> root_of_unity(int k, int n) {
  k = mod(k, n);
  // exact values where cheap, so |entry| is exactly 1 on the axes
  if (k == 0) return {1.0, 0.0};
  if (2 * k == n) return {-1.0, 0.0};
  if (4 * k == n) return {0.0, 1.0};
  if (4 * k == 3 * n) return {0.0, -1.0};
  double t = 2.0 * std::numbers::pi * k / n;
  return {std::cos(t), std::sin(t)};
}

MonomialMatrix::MonomialMatrix(int n, std::vector<int> perm, std::vector<int> exps)
    : n_(n), perm_(std::move(perm)), exps_(std::move(exps)) {
  if (static_cast<int>(perm_.size()) != n || static_cast<int>(exps_.size()) != n) {
    throw std::invalid_argument("MonomialMatrix: size mismatch");
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int j = 0; j < n; ++j) {
    int r = perm_[static_cast<std::size_t>(j)];
    if (r < 0 || r >= n || seen[static_cast<std::size_t>(r)]) throw std::invalid_argument("MonomialMatrix: not a permutation");
    seen[static_cast<std::size_t>(r)] = true;
    exps_[static_cast<std::size_t>(j)] = mod(exps_[static_cast<std::size_t>(j)], n);
  }
}

MonomialMatrix MonomialMatrix::identity(int n) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) perm[static_cast<std::size_t>(j)] = j;
  return {n, perm, std::vector<int>(static_cast<std::size_t>(n), 0)};
}

MonomialMatrix MonomialMatrix::operator*(const MonomialMatrix& o) const {
  if (o.n_ != n_) throw std::invalid_argument("MonomialMatrix: size mismatch");
  std::vector<int> perm(static_cast<std::size_t>(n_)), exps(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) {
    int mid = o.row_of(j);
    perm[static_cast<std::size_t>(j)] = row_of(mid);
    exps[static_cast<std::size_t>(j)] = o.exponent_of(j) + exponent_of(mid);
  }
  return {n_, perm, exps};
}

MonomialMatrix MonomialMatrix::inverse() const {
  std::vector<int> perm(static_cast<std::size_t>(n_)), exps(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) {
    perm[static_cast<std::size_t>(row_of(j))] = j;
    exps[static_cast<std::size_t>(row_of(j))] = -exponent_of(j);
  }
  return {n_, perm, exps};
}

MonomialMatrix MonomialMatrix::power(int k) const {
  MonomialMatrix base = k < 0 ? inverse() : *this, out = identity(n_);
  for (int e = std::abs(k); e > 0; --e) out = out * base;
  return out;
}

MonomialMatrix MonomialMatrix::times_root(int k) const {
  auto exps = exps_;
  for (auto& e : exps) e += k;
  return {n_, perm_, exps};
}

int MonomialMatrix::scalar_exponent() const {
  for (int j = 0; j < n_; ++j)
    if (row_of(j) != j || exponent_of(j) != exponent_of(0)) return -1;
  return n_ == 0 ? 0 : exponent_of(0);
}

ComplexMatrix MonomialMatrix::dense() const {
  ComplexMatrix m = ComplexMatrix::Zero(n_, n_);
  for (int j = 0; j < n_; ++j) m(row_of(j), j) = root_of_unity(exponent_of(j), n_);
  return m;
}

MonomialMatrix clock_matrix(int n) {
  std::vector<int> perm(static_cast<std::size_t>(n)), exps(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    perm[static_cast<std::size_t>(k)] = k;
    exps[static_cast<std::size_t>(k)] = k;
  }
  return {n, perm, exps};
}

MonomialMatrix shift_matrix(int n) {
  // column j carries its 1 in row j - 1
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) perm[static_cast<std::size_t>(j)] = mod(j - 1, n);
  return {n, perm, std::vector<int>(static_cast<std::size_t>(n), 0)};
}

MonomialMatrix rep_matrix(const HeisenbergElement& h, int c) {
  const int n = h.point.n;
  auto m = clock_matrix(n).power(mod(static_cast<long>(c) * h.point.a1, n)) * shift_matrix(n).power(h.point.a2);
  return m.times_root(c * h.central);
}

MonomialMatrix rep_matrix(const TorsionPoint& alpha, int c) { return rep_matrix(HeisenbergElement{alpha, 0}, c); }

int commutator_exponent(const TorsionPoint& a, const TorsionPoint& b, int c) {
  auto ta = rep_matrix(a, c), tb = rep_matrix(b, c);
  return (ta * tb * ta.inverse() * tb.inverse()).scalar_exponent();
}

int commutant_dimension(int n, int c) {
  if (n < 1 || n > 8) throw std::invalid_argument("commutant_dimension supports 1 <= n <= 8");
  const long nn = static_cast<long>(n) * n;
  auto pts = torsion_points(n);
  ComplexMatrix stacked(static_cast<long>(pts.size()) * nn, nn);
  ComplexMatrix eye = ComplexMatrix::Identity(n, n);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    ComplexMatrix t = rep_matrix(pts[k], c).dense();
    // vec(X T - T X) with column-major vec
    stacked.block(static_cast<long>(k) * nn, 0, nn, nn) = kron(t.transpose(), eye) - kron(eye, t);
  }
  return static_cast<int>(null_space(stacked, 1e-9).cols());
}

ComplexMatrix flip_matrix(int n) {
  ComplexMatrix p = ComplexMatrix::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p(j * n + i, i * n + j) = 1.0;
  return p;
}

ComplexMatrix tensor_sum_dense(int n, int c, bool skip_zero) {
  ComplexMatrix sum = ComplexMatrix::Zero(n * n, n * n);
  for (const auto& a : torsion_points(n)) {
    if (skip_zero && a.is_zero()) continue;
    auto t = rep_matrix(a, c);
    sum += kron(t.dense(), t.inverse().dense());
  }
  return sum;
}

bool tensor_sum_is_flip(int n, int c) {
  if (n < 1) throw std::invalid_argument("tensor_sum_is_flip needs n >= 1");
  const auto phi = cyclotomic(n);
  // counts[(row, col)][k]: multiplicity of omega^k
  std::vector<IntPoly> counts(static_cast<std::size_t>(n * n * n * n), IntPoly(static_cast<std::size_t>(n), 0));
  for (const auto& a : torsion_points(n)) {
    auto t = rep_matrix(a, c), ti = t.inverse();
    for (int c1 = 0; c1 < n; ++c1)
      for (int c2 = 0; c2 < n; ++c2) {
        int row = t.row_of(c1) * n + ti.row_of(c2), col = c1 * n + c2;
        int e = mod(t.exponent_of(c1) + ti.exponent_of(c2), n);
        ++counts[static_cast<std::size_t>(row * n * n + col)][static_cast<std::size_t>(e)];
      }
  }
  for (int row = 0; row < n * n; ++row)
    for (int col = 0; col < n * n; ++col) {
      auto r = poly_mod(counts[static_cast<std::size_t>(row * n * n + col)], phi);
      const bool flip = (row / n == col % n) && (row % n == col / n);
      for (std::size_t k = 0; k < r.size(); ++k) {
        long expect = (k == 0 && flip) ? n : 0;
        if (r[k] != expect) return false;
      }
    }
  return true;
}

ComplexMatrix functional_space_basis(int n, int c) {
  const long nn = static_cast<long>(n) * n;
  std::vector<Eigen::VectorXcd> rows;
  for (const auto& a : torsion_points(n))
    for (int g = 0; g < n; ++g) {
      TorsionPoint gamma(g, 0, n);
      auto shifted = a + gamma;
      Eigen::VectorXcd r = Eigen::VectorXcd::Zero(nn);
      r(shifted.a1 * n + shifted.a2) += 1.0;
      r(a.a1 * n + a.a2) -= root_of_unity(c * weil_pairing(a, gamma), n);
      rows.push_back(r);
    }
  ComplexMatrix m(static_cast<long>(rows.size()), nn);
  for (std::size_t k = 0; k < rows.size(); ++k) m.row(static_cast<long>(k)) = rows[k].transpose();
  return null_space(m, 1e-9);
}

ComplexMatrix functional_model(const HeisenbergElement& beta, int c) {
  const int n = beta.point.n;
  // column k: coefficients g(0, m) of g = T(beta) f_k
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < n; ++m) {
      TorsionPoint alpha(0, m, n);
      auto moved = alpha + beta.point;
      if (moved.a2 != k) continue;
      int e = c * beta.central + c * weil_pairing(alpha, beta.point) - c * k * moved.a1;
      out(m, k) = root_of_unity(e, n);
    }
  return out;
}

IntertwinerResult find_intertwiner(int n, int c, bool allow_twist) {
  IntertwinerResult best;
  best.residual = INFINITY;
  const long nn = static_cast<long>(n) * n;
  ComplexMatrix eye = ComplexMatrix::Identity(n, n);
  const std::vector<HeisenbergElement> gens{{TorsionPoint(1, 0, n), 0}, {TorsionPoint(0, 1, n), 0}, {TorsionPoint(0, 0, n), 1}};
  const int range = allow_twist ? n : 1;
  for (int l1 = 0; l1 < range; ++l1)
    for (int l2 = 0; l2 < range; ++l2) {
      ComplexMatrix stacked(3 * nn, nn);
      for (std::size_t g = 0; g < gens.size(); ++g) {
        const auto& h = gens[g];
        std::complex<double> twist = root_of_unity(l1 * h.point.a1 + l2 * h.point.a2, n);
        ComplexMatrix f = functional_model(h, c) * twist;
        ComplexMatrix t = rep_matrix(h, c).dense();
        stacked.block(static_cast<long>(g) * nn, 0, nn, nn) = kron(f.transpose(), eye) - kron(eye, t);
      }
      auto ns = null_space(stacked, 1e-9);
      if (ns.cols() == 0) continue;
      ComplexMatrix x = Eigen::Map<ComplexMatrix>(ns.col(0).data(), n, n);
      Eigen::JacobiSVD<ComplexMatrix> svd(x);
      double smin = svd.singularValues()(n - 1) / svd.singularValues()(0);
      double residual = 0.0;
      for (const auto& h : gens) {
        std::complex<double> twist = root_of_unity(l1 * h.point.a1 + l2 * h.point.a2, n);
        residual = std::max(residual, (x * functional_model(h, c) * twist - rep_matrix(h, c).dense() * x).norm());
      }
      if (smin > 1e-9) {
        best = {true, l1, l2, residual, smin, x};
        return best;
      }
    }
  best.found = false;
  return best;
}

}  // namespace convalg
