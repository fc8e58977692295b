#include "convalg/elliptic.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace convalg {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

int mod(long a, int n) { return static_cast<int>(((a % n) + n) % n); }

struct ThetaPair {
  Complex value, derivative;
};

ThetaPair theta_series(double a, double b, Complex z, Complex tau, double scale) {
  if (!(tau.imag() > 0)) throw std::invalid_argument("theta_char: Im(tau) must be positive");
  const long center = std::lround(-z.imag() / tau.imag() - a);
  auto term = [&](long m) {
    const double x = static_cast<double>(m) + a;
    return std::exp(kI * kPi * x * x * tau + 2.0 * kPi * kI * x * (z + b));
  };
  ThetaPair sum{term(center), 2.0 * kPi * kI * (static_cast<double>(center) + a) * term(center)};
  double biggest = std::abs(sum.value);
  long m0 = 0;
  for (long j = 1;; ++j) {
    if (j > 100000) throw std::runtime_error("theta_char: series failed to converge");
    Complex up = term(center + j), down = term(center - j);
    sum.value += up + down;
    sum.derivative += 2.0 * kPi * kI * ((static_cast<double>(center + j) + a) * up + (static_cast<double>(center - j) + a) * down);
    biggest = std::max({biggest, std::abs(up), std::abs(down)});
    if (std::max(std::abs(up), std::abs(down)) < 1e-16 * biggest) {
      m0 = j;
      break;
    }
  }
  const long m = static_cast<long>(std::ceil(scale * static_cast<double>(m0)));
  for (long j = m0 + 1; j <= m; ++j) {
    Complex up = term(center + j), down = term(center - j);
    sum.value += up + down;
    sum.derivative += 2.0 * kPi * kI * ((static_cast<double>(center + j) + a) * up + (static_cast<double>(center - j) + a) * down);
  }
  return sum;
}

// f(h), f(-h) symmetric average at h, h/2, h/4, two Richardson sweeps.
template <class F>
auto richardson_even(F f, double h) {
  using T = decltype(f(h));
  auto s = [&](double t) -> T { return (f(t) + f(-t)) * 0.5; };
  const T s0 = s(h), s1 = s(h / 2), s2 = s(h / 4);
  const T r0 = (4.0 * s1 - s0) / 3.0, r1 = (4.0 * s2 - s1) / 3.0;
  return T((16.0 * r1 - r0) / 15.0);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

Lattice::Lattice(Complex tau_, int n_) : tau(tau_), n(n_) {
  if (!(tau.imag() > 0)) throw std::invalid_argument("lattice needs Im(tau) > 0");
  if (n < 1) throw std::invalid_argument("lattice needs n >= 1");
}

Complex Lattice::torsion(const TorsionPoint& a) const {
  return (static_cast<double>(a.a1) + static_cast<double>(a.a2) * tau) / static_cast<double>(n);
}

double distance_to_torsion(Complex u, const Lattice& lattice) {
  const Complex z = u * static_cast<double>(lattice.n);
  const double y = z.imag() / lattice.tau.imag();
  const double x = z.real() - y * lattice.tau.real();
  double best = INFINITY;
  for (long i = std::lround(x) - 1; i <= std::lround(x) + 1; ++i)
    for (long j = std::lround(y) - 1; j <= std::lround(y) + 1; ++j)
      best = std::min(best, std::abs(z - (static_cast<double>(i) + static_cast<double>(j) * lattice.tau)));
  return best / lattice.n;
}

void check_pole_guard(Complex u, const Lattice& lattice, const std::string& what) {
  if (distance_to_torsion(u, lattice) < kPoleGuard) {
    throw std::domain_error(what + ": argument within pole guard of an n-torsion point");
  }
}

Complex theta_char(double a, double b, Complex z, Complex tau, double scale) {
  return theta_series(a, b, z, tau, scale).value;
}

Complex theta_char_prime(double a, double b, Complex z, Complex tau, double scale) {
  return theta_series(a, b, z, tau, scale).derivative;
}

// ---------------------------------------------------------------- WFunction

WFunction::WFunction(const TorsionPoint& alpha, const Lattice& lattice, double trunc_scale)
    : alpha_(alpha), lattice_(lattice), scale_(trunc_scale) {
  if (alpha.n != lattice.n) throw std::invalid_argument("WFunction: torsion level differs from lattice");
  if (alpha.is_zero()) {
    WCalibration cal;
    cal.branch = "constant";
    cal.accepted = true;
    attempts_.push_back(cal);
    return;
  }
  for (const std::string branch : {"literal", "swapped"}) {
    attempts_.push_back(calibrate(branch));
    if (attempts_.back().accepted) break;
  }
  if (!attempts_.back().accepted) throw std::runtime_error("WFunction: no characteristic branch satisfies the conditions");
}

Complex WFunction::raw(Complex u, const WCalibration& cal) const {
  const bool scaled = cal.branch == "swapped";
  const double n = lattice_.n;
  const double a = scaled ? alpha_.a2 / n : alpha_.a1 / n;
  const double b = scaled ? alpha_.a1 / n : alpha_.a2 / n;
  const Complex z = scaled ? u * n : u;
  return cal.k * std::exp(cal.lambda * u) * theta_char(0.5 + a, 0.5 + b, z, lattice_.tau, scale_) /
         theta_char(0.5, 0.5, z, lattice_.tau, scale_);
}

WCalibration WFunction::calibrate(const std::string& branch) const {
  const int n = lattice_.n;
  WCalibration cal;
  cal.branch = branch;
  // lambda from the shift by 1/n, branch of the logarithm from the shift by tau/n
  const Complex u0 = Complex(0.137, 0.0) + 0.271 * lattice_.tau;
  const Complex t1 = root_of_unity(weil_pairing(TorsionPoint(1, 0, n), alpha_), n);
  const Complex t2 = root_of_unity(weil_pairing(TorsionPoint(0, 1, n), alpha_), n);
  const Complex s1 = lattice_.torsion(TorsionPoint(1, 0, n)), s2 = lattice_.torsion(TorsionPoint(0, 1, n));
  const Complex m1 = raw(u0 + s1, cal) / raw(u0, cal), m2 = raw(u0 + s2, cal) / raw(u0, cal);
  const Complex base = std::log(t1 / m1) * static_cast<double>(n);
  double best = INFINITY;
  for (int k = -n; k <= n; ++k) {
    Complex lam = base + 2.0 * kPi * kI * static_cast<double>(k * n);
    double miss = std::abs(std::exp(lam * s2) * m2 - t2);
    if (miss < best) {
      best = miss;
      cal.lambda = lam;
    }
  }
  if (std::abs(cal.lambda) < 1e-12) cal.lambda = 0.0;
  cal.k = 1.0;
  const double h = 1e-2 / n;
  const Complex r0 = richardson_even([&](double t) { return Complex(t) * raw(Complex(t), cal); }, h);
  cal.k = 1.0 / r0;

  // conditions at 16 sample points, all beta
  std::mt19937_64 rng(0x5eed + static_cast<unsigned>(alpha_.a1 * 31 + alpha_.a2));
  const auto pts = sample_points(lattice_, 16, rng, 0.1 / n);
  for (const auto& u : pts) {
    const Complex wu = raw(u, cal);
    for (const auto& beta : torsion_points(n)) {
      const Complex expect = root_of_unity(weil_pairing(beta, alpha_), n) * wu;
      cal.quasi_periodicity = std::max(cal.quasi_periodicity, std::abs(raw(u + lattice_.torsion(beta), cal) - expect) / std::abs(wu));
    }
  }
  const Complex res = richardson_even([&](double t) { return Complex(t) * raw(Complex(t), cal); }, h / 2);
  cal.residue_error = std::abs(res - 1.0);
  const bool scaled = branch == "swapped";
  const double a = scaled ? alpha_.a2 / static_cast<double>(n) : alpha_.a1 / static_cast<double>(n);
  const double b = scaled ? alpha_.a1 / static_cast<double>(n) : alpha_.a2 / static_cast<double>(n);
  const Complex analytic = (scaled ? static_cast<double>(n) : 1.0) * theta_char_prime(0.5, 0.5, 0.0, lattice_.tau, scale_) /
                           theta_char(0.5 + a, 0.5 + b, 0.0, lattice_.tau, scale_);
  cal.residue_crosscheck = std::abs(cal.k - analytic) / std::abs(cal.k);
  cal.accepted = cal.quasi_periodicity < 1e-9 && cal.residue_error < 1e-9 && cal.residue_crosscheck < 1e-9;
  return cal;
}

Complex WFunction::operator()(Complex u) const {
  if (alpha_.is_zero()) return 1.0;
  return raw(u, attempts_.back());
}

Complex WFunction::residue(double h) const {
  if (alpha_.is_zero()) return 0.0;
  return richardson_even([&](double t) { return Complex(t) * (*this)(Complex(t)); }, h);
}

std::vector<Complex> sample_points(const Lattice& lattice, int count, std::mt19937_64& rng, double margin) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Complex> out;
  while (static_cast<int>(out.size()) < count) {
    Complex u = unit(rng) + unit(rng) * lattice.tau;
    if (distance_to_torsion(u, lattice) >= margin) out.push_back(u);
  }
  return out;
}

// ----------------------------------------------------------------- r-matrix

BelavinRMatrix::BelavinRMatrix(const Lattice& lattice, int c, double trunc_scale) : lattice_(lattice), c_(c) {
  for (const auto& a : torsion_points(lattice.n)) {
    if (a.is_zero()) continue;
    w_.emplace_back(a, lattice, trunc_scale);
    auto t = rep_matrix(a, c);
    kron_.push_back(kron(t.dense(), t.inverse().dense()));
  }
}

ComplexMatrix BelavinRMatrix::unguarded(Complex u) const {
  const int nn = lattice_.n * lattice_.n;
  ComplexMatrix r = ComplexMatrix::Zero(nn, nn);
  for (std::size_t k = 0; k < w_.size(); ++k) r += w_[k](u) * kron_[k];
  return r;
}

ComplexMatrix BelavinRMatrix::operator()(Complex u) const {
  check_pole_guard(u, lattice_, "r_matrix");
  return unguarded(u);
}

ComplexMatrix BelavinRMatrix::residue(double h) const {
  return richardson_even([&](double t) -> ComplexMatrix { return Complex(t) * unguarded(Complex(t)); }, h);
}

ComplexMatrix leg12(const ComplexMatrix& r, int n) { return kron(r, ComplexMatrix::Identity(n, n)); }

ComplexMatrix leg23(const ComplexMatrix& r, int n) { return kron(ComplexMatrix::Identity(n, n), r); }

ComplexMatrix leg13(const ComplexMatrix& r, int n) {
  const int N = n * n * n;
  ComplexMatrix out = ComplexMatrix::Zero(N, N);
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i3 = 0; i3 < n; ++i3)
        for (int j1 = 0; j1 < n; ++j1)
          for (int j3 = 0; j3 < n; ++j3)
            out((i1 * n + i2) * n + i3, (j1 * n + i2) * n + j3) = r(i1 * n + i3, j1 * n + j3);
  return out;
}

CybeResult cybe_residual(Complex u, Complex v, const BelavinRMatrix& r) {
  const int n = r.n();
  auto comm = [](const ComplexMatrix& a, const ComplexMatrix& b) -> ComplexMatrix { return a * b - b * a; };
  const ComplexMatrix r12 = leg12(r(u), n), r23 = leg23(r(v), n);
  auto residual_with = [&](Complex w13) {
    const ComplexMatrix r13 = leg13(r(w13), n);
    return (comm(r13, r23 - r12) - comm(r23, r12)).norm() / r12.norm();
  };
  CybeResult out;
  out.residual = residual_with(u + v);
  for (const auto& [name, arg] : std::vector<std::pair<std::string, Complex>>{{"r13(u-v)", u - v}, {"r13(v-u)", v - u}, {"r13(-u-v)", -u - v}}) {
    if (distance_to_torsion(arg, r.lattice()) < kPoleGuard) continue;
    out.variants[name] = residual_with(arg);
  }
  return out;
}

// --------------------------------------------------------------- automorphy

AutomorphyReport automorphy_check(const MatrixFunction& a, int c, const Lattice& lattice,
                                  const std::vector<Complex>& samples, const TorsionPoint* beta) {
  const int n = lattice.n;
  AutomorphyReport rep;
  std::vector<double> best_k(static_cast<std::size_t>(n), 0.0);
  for (const auto& alpha : torsion_points(n)) {
    const auto t = rep_matrix(alpha, c);
    const ComplexMatrix td = t.dense(), tinv = t.inverse().dense();
    double dev = 0.0;
    for (const auto& x : samples) {
      const ComplexMatrix ax = a(x), shifted = a(x + lattice.torsion(alpha));
      if (!shifted.allFinite() || !ax.allFinite()) throw std::runtime_error("automorphy_check: evaluation failed");
      const ComplexMatrix conj = td * ax * tinv;
      const double scale = ax.norm();
      dev = std::max(dev, (shifted - conj).norm() / scale);
      if (beta) {
        const int pair = weil_pairing(alpha, *beta);
        for (int k = 0; k < n; ++k) {
          double d = (shifted - root_of_unity(k * pair, n) * conj).norm() / scale;
          best_k[static_cast<std::size_t>(k)] = std::max(best_k[static_cast<std::size_t>(k)], d);
        }
      }
    }
    rep.deviations.push_back(dev);
    rep.max_deviation = std::max(rep.max_deviation, dev);
  }
  if (beta) {
    for (int k = 0; k < n; ++k)
      if (best_k[static_cast<std::size_t>(k)] < 1e-9) {
        rep.exponent_correction = k;
        break;
      }
  }
  return rep;
}

MatrixFunction section(const BelavinRMatrix& r, const TorsionPoint& gamma, const TorsionPoint& beta) {
  const ComplexMatrix t = rep_matrix(beta, r.c()).dense();
  const WFunction* w = nullptr;
  for (const auto& f : r.w())
    if (f.alpha() == gamma) w = &f;
  if (gamma.is_zero()) return [t](Complex) { return t; };
  if (!w) throw std::invalid_argument("section: unknown torsion point");
  return [t, w](Complex x) -> ComplexMatrix { return (*w)(x) * t; };
}

// ------------------------------------------------------------ E_n on operators

ConvOperator en_action(const ConvOperator& op, const TorsionPoint& alpha, int c, const Lattice& lattice,
                       PhaseConvention convention) {
  const auto* ts = std::get_if<TorusSampled>(&op.ground());
  if (!ts) throw std::invalid_argument("en_action: operator ground is not a torus");
  if (std::abs(ts->tau - lattice.tau) > 1e-15) throw std::invalid_argument("en_action: lattice mismatch");
  const int n = lattice.n;
  if (alpha.n != n) throw std::invalid_argument("en_action: torsion level differs from lattice");
  const Complex shift = lattice.torsion(alpha);
  auto rep = [&](int x) {
    int r = mod(x, n);
    if (convention == PhaseConvention::Symmetric && r > n - 1 - n / 2) r -= n;
    return r;
  };
  ConvOperator out(op.ground());
  for (const auto& [b_mat, f] : op.terms()) {
    if (b_mat.n() != n) throw std::invalid_argument("en_action: block labels must range over Z/n");
    IntMatrix a(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a.set(i, j, b_mat.at(mod(i + alpha.a2, n), mod(j - alpha.a2, n)));
    long e = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) e += static_cast<long>(c) * alpha.a1 * a.at(i, j) * rep(i - j);
    const Complex phase = root_of_unity(mod(e, n), n);
    const auto src = BlockShape::of_matrix(a), dst = f.shape();
    // variable of block (i,j) in a sits in block (i+alpha2, j-alpha2) of b_mat
    std::vector<int> where(static_cast<std::size_t>(src.d()));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const int sb = i * n + j, db = mod(i + alpha.a2, n) * n + mod(j - alpha.a2, n);
        for (int k = 0; k < src.size(sb); ++k) where[static_cast<std::size_t>(src.offset(sb) + k)] = dst.offset(db) + k;
      }
    auto g = [f, where, shift, phase](const std::vector<Complex>& z) {
      std::vector<Complex> moved(z.size());
      for (std::size_t k = 0; k < z.size(); ++k) moved[static_cast<std::size_t>(where[k])] = z[k] + shift;
      return phase * f.evaluate_complex(moved);
    };
    out.add_term(a, BlockSymFunction::rule(src, *ts, g, "en_action(" + f.provenance() + ")"));
  }
  return out;
}

ConvOperator operator_of_matrix_function(const MatrixFunction& a, int n, const Lattice& lattice) {
  TorusSampled ground{lattice.tau};
  ConvOperator out(ground);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      const auto e = IntMatrix::unit(n, b, c);
      auto rule = [a, b, c](const std::vector<Complex>& z) { return a(z[0])(b, c); };
      out.add_term(e, BlockSymFunction::rule(BlockShape::of_matrix(e), ground, rule,
                                             "A_" + std::to_string(b + 1) + std::to_string(c + 1)));
    }
  return out;
}

double sampled_deviation(const ConvOperator& a, const ConvOperator& b, int samples, std::mt19937_64& rng,
                         const Lattice& lattice) {
  std::set<IntMatrix> mats;
  for (const auto& [m, f] : a.terms()) mats.insert(m);
  for (const auto& [m, f] : b.terms()) mats.insert(m);
  double worst = 0.0;
  for (const auto& m : mats) {
    const auto* fa = a.find(m);
    const auto* fb = b.find(m);
    for (int s = 0; s < samples; ++s) {
      auto z = sample_points(lattice, m.total(), rng, 0.05);
      Complex va = fa ? fa->evaluate_complex(z) : 0.0, vb = fb ? fb->evaluate_complex(z) : 0.0;
      worst = std::max(worst, std::abs(va - vb));
    }
  }
  return worst;
}

}  // namespace convalg
