#include "convalg/verify.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "convalg/elliptic.hpp"
#include "convalg/heisenberg.hpp"
#include "convalg/orbits.hpp"

namespace convalg {

namespace {

struct Check {
  std::string name, anchor;
  bool pass = true;
  double residual = 0.0;
  Json details;
};

class ReportBuilder {
 public:
  ReportBuilder(std::string suite, const SuiteConfig& cfg) : suite_(std::move(suite)), cfg_(cfg) {}

  void add(const std::string& name, const std::string& anchor, bool pass, double residual, Json details = Json::object()) {
    checks_.push_back({name, anchor, pass, residual, std::move(details)});
  }

  SuiteResult finish(Json tolerances, Json extra = Json::object()) const {
    Json checks = Json::array();
    bool pass = true;
    double max_residual = 0.0;
    for (const auto& c : checks_) {
      pass = pass && c.pass;
      max_residual = std::max(max_residual, c.residual);
      checks.push_back({{"name", c.name}, {"anchor", c.anchor}, {"pass", c.pass}, {"residual", c.residual}, {"details", c.details}});
    }
    Json report = {
        {"suite", suite_},
        {"parameters",
         {{"n", cfg_.n}, {"d", cfg_.d}, {"c", cfg_.c}, {"tau", to_json(cfg_.tau)}, {"seed", cfg_.seed}, {"tol", cfg_.tol}, {"trunc", cfg_.trunc}}},
        {"checks", checks},
        {"max_residual", max_residual},
        {"tolerances", std::move(tolerances)},
        {"pass", pass},
        {"timestamp", iso_timestamp()},
    };
    for (auto& [k, v] : extra.items()) report[k] = v;
    return {pass, report};
  }

 private:
  std::string suite_;
  SuiteConfig cfg_;
  std::vector<Check> checks_;
};

ConvOperator bracket(const ConvOperator& a, const ConvOperator& b) { return compose(a, b) - compose(b, a); }

/// Number of matrices where two exact operators differ.
long mismatch_count(const ConvOperator& a, const ConvOperator& b) {
  std::set<IntMatrix> mats;
  for (const auto& [m, f] : a.terms()) mats.insert(m);
  for (const auto& [m, f] : b.terms()) mats.insert(m);
  long bad = 0;
  for (const auto& m : mats) {
    const auto *fa = a.find(m), *fb = b.find(m);
    if (!fa || !fb || !(*fa == *fb)) ++bad;
  }
  return bad;
}

long mismatch_count(const OperatorTable& a, const OperatorTable& b) {
  long bad = 0;
  for (const auto& [k, v] : a.entries) {
    auto it = b.entries.find(k);
    if (it == b.entries.end() || it->second != v) ++bad;
  }
  for (const auto& [k, v] : b.entries)
    if (!a.entries.contains(k)) ++bad;
  return bad;
}

/// All orbit sums of total degree <= 2 on the shape.
std::vector<BlockSymFunction> monomials_deg2(const BlockShape& shape) {
  std::vector<std::vector<int>> zero;
  for (int b = 0; b < shape.count(); ++b) zero.emplace_back(static_cast<std::size_t>(shape.size(b)), 0);
  std::vector<std::vector<std::vector<int>>> exps{zero};
  for (int b = 0; b < shape.count(); ++b) {
    if (shape.size(b) == 0) continue;
    for (int e = 1; e <= 2; ++e) {
      auto m = zero;
      m[static_cast<std::size_t>(b)][0] = e;
      exps.push_back(m);
    }
    if (shape.size(b) > 1) {
      auto m = zero;
      m[static_cast<std::size_t>(b)][0] = m[static_cast<std::size_t>(b)][1] = 1;
      exps.push_back(m);
    }
    for (int b2 = b + 1; b2 < shape.count(); ++b2) {
      if (shape.size(b2) == 0) continue;
      auto m = zero;
      m[static_cast<std::size_t>(b)][0] = m[static_cast<std::size_t>(b2)][0] = 1;
      exps.push_back(m);
    }
  }
  std::vector<BlockSymFunction> out;
  for (const auto& e : exps) out.push_back(BlockSymFunction::orbit_sum(shape, e));
  return out;
}

void require_range(bool ok, const std::string& what) {
  if (!ok) throw BoundExceeded(what);
}

// ------------------------------------------------------------------- suites

SuiteResult suite_tau(const SuiteConfig& cfg) {
  require_range(cfg.n >= 1 && cfg.n <= 3 && cfg.d >= 0 && cfg.d <= 3, "tau-homomorphism supports n <= 3, d <= 3");
  ReportBuilder rb("tau-homomorphism", cfg);
  const int n = cfg.n, d = cfg.d;
  std::map<std::tuple<int, int, int>, ConvOperator> img;
  auto tau_of = [&](int i, int j, int k) -> const ConvOperator& {
    auto key = std::make_tuple(i, j, k);
    auto it = img.find(key);
    if (it == img.end()) it = img.emplace(key, tau(i, j, power_function(k, ExactLine{}), n, d)).first;
    return it->second;
  };
  long pairs = 0, bad = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int f = 0; f <= 2; ++f)
            for (int g = 0; g <= 2; ++g) {
              ConvOperator lhs(ExactLine{});
              if (j == k) lhs = lhs + tau_of(i, l, f + g);
              if (l == i) lhs = lhs - tau_of(k, j, f + g);
              bad += mismatch_count(lhs, bracket(tau_of(i, j, f), tau_of(k, l, g))) > 0 ? 1 : 0;
              ++pairs;
            }
  rb.add("bracket of generator images equals image of bracket", "current algebra homomorphism", bad == 0,
         static_cast<double>(bad), {{"pairs", pairs}, {"failures", bad}, {"functions", "1, x, x^2"}});

  const int N = std::max(2 * d, 3);
  const auto ground = integer_points(N);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> coef(-5, 5);
  std::vector<Rational> rnd(static_cast<std::size_t>(N));
  for (auto& r : rnd) r = coef(rng);
  std::vector<std::pair<std::string, BlockSymFunction>> fns{{"1", power_function(0, ground)},
                                                            {"x", power_function(1, ground)},
                                                            {"x^2", power_function(2, ground)},
                                                            {"random", BlockSymFunction::table(BlockShape::single(1), ground, rnd)}};
  long tables = 0, tbad = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (const auto& [name, f] : fns) {
        ++tables;
        if (mismatch_count(operator_table(tau(i, j, f, n, d)), tensor_action_table(i, j, f, n, d)) != 0) ++tbad;
      }
  rb.add("tensor action matrices equal convolution matrices", "tensor space action of the current algebra", tbad == 0,
         static_cast<double>(tbad), {{"generators", tables}, {"failures", tbad}, {"points", N}});
  return rb.finish({{"exact", true}});
}

SuiteResult suite_express(const SuiteConfig& cfg) {
  const int n = cfg.n_set ? cfg.n : 2, dmax = cfg.d_set ? cfg.d : 3;
  require_range(n >= 1 && n <= 3 && dmax >= 0 && dmax <= 3, "express-residual supports n <= 3, d <= 3");
  ReportBuilder rb("express-residual", cfg);
  long cases = 0, exact_bad = 0, table_bad = 0, depth_bad = 0, max_depth = 0, max_steps = 0;
  Json failures = Json::array();
  for (int d = 0; d <= dmax; ++d) {
    const auto ground = integer_points(d + 1);
    for (const auto& c : enumerate_all_matrices(n, d)) {
      for (const auto& h : monomials_deg2(BlockShape::of_matrix(c))) {
        ++cases;
        const auto ex = express_in_generators(c, h);
        const auto target = ConvOperator::term(c, h);
        const bool exact = mismatch_count(evaluate_expr(ex.expr, n, d, ExactLine{}), target) == 0;
        const bool table = mismatch_count(evaluate_expr_table(ex.expr, n, d, ground),
                                          operator_table(ConvOperator::term(c, h.on_points(ground)))) == 0;
        const bool depth = ex.depth <= ex.length;
        exact_bad += !exact;
        table_bad += !table;
        depth_bad += !depth;
        max_depth = std::max<long>(max_depth, ex.depth);
        max_steps = std::max(max_steps, ex.steps);
        if ((!exact || !table || !depth) && failures.size() < 10) failures.push_back({{"matrix", to_json(c)}, {"function", h.str()}});
      }
    }
  }
  rb.add("expression evaluates to the target operator", "generation by generator images, induction on l(C)",
         exact_bad == 0, static_cast<double>(exact_bad), {{"cases", cases}, {"failures", failures}});
  rb.add("expression evaluated through the tensor action on a finite set", "generation, finite model evaluation",
         table_bad == 0, static_cast<double>(table_bad), {{"cases", cases}});
  rb.add("recursion depth bounded by l(C)", "generation, termination by descent of l", depth_bad == 0,
         static_cast<double>(depth_bad), {{"max_depth", max_depth}, {"max_steps", max_steps}});
  return rb.finish({{"exact", true}});
}

SuiteResult suite_bruhat(const SuiteConfig& cfg) {
  const int dmax = cfg.d_set ? cfg.d : 4;
  require_range(dmax >= 0 && dmax <= 5, "bruhat-monotone supports d <= 5");
  ReportBuilder rb("bruhat-monotone", cfg);
  long pairs = 0, comparable = 0, bad = 0, order_bad = 0;
  for (int d = 0; d <= dmax; ++d)
    for (int n = 1; n <= std::max(d, 1); ++n) {
      const auto comps = enumerate_compositions(n, d);
      for (const auto& v1 : comps)
        for (const auto& v2 : comps) {
          const auto ms = enumerate_matrices(v1, v2);
          for (const auto& a : ms)
            for (const auto& b : ms) {
              ++pairs;
              const bool br = bruhat_leq(a, b), pq = preceq(a, b);
              comparable += br;
              if (br && !pq) ++bad;
              if (a != b && pq && preceq(b, a)) ++order_bad;  // antisymmetry
            }
        }
    }
  rb.add("Bruhat order implies the corner-sum order", "monotonicity of the matrix orders", bad == 0,
         static_cast<double>(bad), {{"pairs", pairs}, {"bruhat_pairs", comparable}, {"max_d", dmax}});
  rb.add("corner-sum order is antisymmetric", "partial order on matrices with fixed marginals", order_bad == 0,
         static_cast<double>(order_bad));
  return rb.finish({{"exact", true}});
}

SuiteResult suite_orbits(const SuiteConfig& cfg) {
  const int nmax = cfg.n_set ? cfg.n : 3, dmax = cfg.d_set ? cfg.d : 3;
  require_range(nmax >= 1 && nmax <= 3 && dmax >= 0 && dmax <= 3, "orbit-census supports n <= 3, d <= 3");
  ReportBuilder rb("orbit-census", cfg);
  const int q = 2;
  Json classes = Json::array();
  long bad_sets = 0, bad_totals = 0, bad_diag = 0;
  for (int n = 1; n <= nmax; ++n)
    for (int d = 0; d <= dmax; ++d) {
      const auto census = orbit_census(n, d, q);
      const auto flags = all_flags(n, d, q);
      std::set<IntMatrix> expect;
      for (const auto& a : enumerate_all_matrices(n, d)) expect.insert(a);
      std::set<IntMatrix> got;
      long total = 0;
      for (const auto& [a, cnt] : census) {
        got.insert(a);
        total += cnt;
      }
      bad_sets += got != expect;
      bad_totals += total != static_cast<long>(flags.size() * flags.size());
      for (const auto& f : flags)
        if (orbit_matrix({f, f}) != IntMatrix::diagonal(f.type())) ++bad_diag;
      classes.push_back({{"n", n}, {"d", d}, {"flags", flags.size()}, {"classes", census.size()}, {"matrices", expect.size()}});
    }
  rb.add("census realizes exactly the matrices with given marginals", "orbits on pairs of flags are classified by matrices",
         bad_sets == 0, static_cast<double>(bad_sets), {{"field", q}, {"sizes", classes}});
  rb.add("every flag pair lands in one class", "partition of pairs of flags", bad_totals == 0, static_cast<double>(bad_totals));
  rb.add("pairs (D, D) lie in diagonal classes", "diagonal orbits", bad_diag == 0, static_cast<double>(bad_diag));

  std::mt19937_64 rng(cfg.seed);
  long inv_bad = 0;
  const auto flags = all_flags(std::min(nmax, 3), dmax, q);
  std::uniform_int_distribution<std::size_t> pick(0, flags.size() - 1);
  for (int s = 0; s < 20; ++s) {
    const auto g = random_invertible(dmax, q, rng);
    const auto& f1 = flags[pick(rng)];
    const auto& f2 = flags[pick(rng)];
    if (orbit_matrix({apply(g, f1), apply(g, f2)}) != orbit_matrix({f1, f2})) ++inv_bad;
  }
  rb.add("orbit matrix invariant under the general linear group", "group invariance of relative position", inv_bad == 0,
         static_cast<double>(inv_bad), {{"samples", 20}});
  return rb.finish({{"exact", true}});
}

SuiteResult suite_heisenberg(const SuiteConfig& cfg) {
  const int nmax = cfg.n_set ? cfg.n : 6;
  require_range(nmax >= 1 && nmax <= 8, "heisenberg supports n <= 8");
  ReportBuilder rb("heisenberg", cfg);

  long sign_bad = 0;
  for (int n = 1; n <= nmax; ++n)
    if (shift_matrix(n) * clock_matrix(n) != (clock_matrix(n) * shift_matrix(n)).times_root(kClockShiftSign)) ++sign_bad;
  rb.add("clock-shift relation with one sign", "clock and shift matrices", sign_bad == 0, static_cast<double>(sign_bad),
         {{"sign", kClockShiftSign}});

  long comm_bad = 0, comm_checked = 0;
  for (int n = 1; n <= nmax; ++n)
    for (int c = 0; c < n || (n == 1 && c == 0); ++c) {
      if (std::gcd(c, n) != 1) continue;
      for (const auto& a : torsion_points(n))
        for (const auto& b : torsion_points(n)) {
          ++comm_checked;
          const int expect = ((kCommutatorSign * c * weil_pairing(a, b)) % n + n) % n;
          if (commutator_exponent(a, b, c) != expect) ++comm_bad;
        }
      if (n == 1) break;
    }
  rb.add("group commutator is the Weil pairing to a fixed power", "commutator law of the charge-c representation",
         comm_bad == 0, static_cast<double>(comm_bad), {{"sign", kCommutatorSign}, {"pairs", comm_checked}});

  Json dims = Json::array();
  long dim_bad = 0;
  for (int n = 1; n <= nmax; ++n)
    for (int c = 0; c < n; ++c) {
      const int dim = commutant_dimension(n, c);
      if ((dim == 1) != (std::gcd(c, n) == 1)) ++dim_bad;
      dims.push_back({{"n", n}, {"c", c}, {"dim", dim}});
    }
  rb.add("commutant is one-dimensional exactly for gcd(c, n) = 1", "irreducibility of the charge-c representation",
         dim_bad == 0, static_cast<double>(dim_bad), {{"dimensions", dims}});

  double unit_dev = 0.0;
  for (int n = 1; n <= nmax; ++n)
    for (const auto& a : torsion_points(n)) {
      ComplexMatrix m = rep_matrix(a, 1).dense();
      for (long i = 0; i < m.size(); ++i) {
        double r = std::abs(m.data()[i]);
        unit_dev = std::max(unit_dev, std::abs(r * (r - 1.0)));
      }
    }
  rb.add("representation entries are roots of unity or zero", "clock and shift matrices", unit_dev < 1e-14, unit_dev);

  long fdim_bad = 0, mult_bad = 0;
  std::mt19937_64 rng(cfg.seed);
  for (int n = 1; n <= nmax; ++n) {
    for (int c = 1; c <= n; ++c) {
      if (std::gcd(c, n) != 1) continue;
      if (functional_space_basis(n, c % n == 0 ? n : c).cols() != n) ++fdim_bad;
    }
    std::uniform_int_distribution<int> u(0, n - 1);
    for (int s = 0; s < 20; ++s) {
      HeisenbergElement x{TorsionPoint(u(rng), u(rng), n), u(rng)}, y{TorsionPoint(u(rng), u(rng), n), u(rng)};
      const ComplexMatrix lhs = functional_model(x, 1) * functional_model(y, 1);
      if ((lhs - functional_model(heisenberg_product(x, y), 1)).norm() > 1e-12) ++mult_bad;
    }
  }
  rb.add("functional model space has dimension n", "functional model of the Heisenberg representation", fdim_bad == 0,
         static_cast<double>(fdim_bad));
  rb.add("functional model is multiplicative with the group cocycle", "functional model of the Heisenberg representation",
         mult_bad == 0, static_cast<double>(mult_bad), {{"samples_per_n", 20}});

  Json inter = Json::array();
  long inter_bad = 0;
  for (int n = 1; n <= std::min(nmax, 4); ++n) {
    const auto r = find_intertwiner(n, 1, true);
    if (!r.found) ++inter_bad;
    // commutator scalars are similarity invariants; record both for the diagnosis
    const TorsionPoint e1(1, 0, n), e2(0, 1, n);
    const ComplexMatrix f1 = functional_model({e1, 0}, 1), f2 = functional_model({e2, 0}, 1);
    const ComplexMatrix fc = f1 * f2 * f1.inverse() * f2.inverse();
    inter.push_back({{"n", n},
                     {"found", r.found},
                     {"residual", r.found ? r.residual : -1.0},
                     {"matrix_model_commutator_exponent", commutator_exponent(e1, e2, 1)},
                     {"functional_model_commutator", to_json(Complex(fc(0, 0)))}});
  }
  rb.add("an invertible intertwiner joins the functional and matrix models", "agreement of the two Heisenberg models",
         inter_bad == 0, static_cast<double>(inter_bad), {{"per_n", inter}, {"c", 1}});

  long flip_bad = 0;
  for (int n = 1; n <= std::min(nmax, 5); ++n)
    for (int c = 1; c <= n; ++c)
      if (std::gcd(c, n) == 1 && !tensor_sum_is_flip(n, c)) ++flip_bad;
  rb.add("sum over E_n of T(a) (x) T(a)^-1 equals n times the flip", "residue of the elliptic r-matrix, exact part",
         flip_bad == 0, static_cast<double>(flip_bad), {{"arithmetic", "cyclotomic integers"}});
  return rb.finish({{"unit_modulus", 1e-14}, {"rank", 1e-9}, {"model_product", 1e-12}});
}

std::vector<Lattice> lattices_for(const SuiteConfig& cfg, const std::vector<int>& default_ns) {
  std::vector<int> ns = cfg.n_set ? std::vector<int>{cfg.n} : default_ns;
  std::vector<Complex> taus = cfg.tau_set ? std::vector<Complex>{cfg.tau} : std::vector<Complex>{{0.0, 1.0}, {0.3, 1.1}};
  std::vector<Lattice> out;
  for (int n : ns)
    for (auto t : taus) out.emplace_back(t, n);
  return out;
}

Json lattice_json(const Lattice& l) { return {{"n", l.n}, {"tau", to_json(l.tau)}}; }

SuiteResult suite_w(const SuiteConfig& cfg) {
  ReportBuilder rb("w-calibration", cfg);
  std::mt19937_64 rng(cfg.seed);
  for (const auto& lat : lattices_for(cfg, {2, 3})) {
    require_range(lat.n >= 1 && lat.n <= 6, "w-calibration supports n <= 6");
    double qp = 0.0, res = 0.0, cross = 0.0, sweep = 0.0, finite_min = INFINITY;
    Json branches = Json::array();
    bool ok = true;
    for (const auto& a : torsion_points(lat.n)) {
      if (a.is_zero()) {
        WFunction w0(a, lat);
        const bool one = w0(Complex(0.123, 0.456)) == Complex(1.0) && w0(Complex(0.7, 0.2)) == Complex(1.0);
        ok = ok && one;
        continue;
      }
      WFunction w(a, lat);
      for (const auto& att : w.attempts())
        branches.push_back({{"alpha", {a.a1, a.a2}},
                            {"branch", att.branch},
                            {"accepted", att.accepted},
                            {"quasi_periodicity", att.quasi_periodicity},
                            {"lambda", to_json(att.lambda)}});
      const auto& cal = w.calibration();
      qp = std::max(qp, cal.quasi_periodicity);
      res = std::max(res, cal.residue_error);
      cross = std::max(cross, cal.residue_crosscheck);
      // 8 fresh points, all beta
      for (const auto& u : sample_points(lat, 8, rng, 0.1 / lat.n)) {
        const Complex wu = w(u);
        finite_min = std::min(finite_min, std::isfinite(std::abs(wu)) ? 1.0 : 0.0);
        for (const auto& b : torsion_points(lat.n))
          sweep = std::max(sweep, std::abs(w(u + lat.torsion(b)) - root_of_unity(weil_pairing(b, a), lat.n) * wu) / std::abs(wu));
      }
    }
    const std::string tag = "n=" + std::to_string(lat.n) + " tau=(" + std::to_string(lat.tau.real()) + "," + std::to_string(lat.tau.imag()) + ")";
    rb.add("w_0 is the constant 1 [" + tag + "]", "characterization of w_alpha", ok, 0.0, lattice_json(lat));
    rb.add("quasi-periodicity under n-torsion [" + tag + "]", "characterization of w_alpha, translation law",
           std::max(qp, sweep) < 1e-9, std::max(qp, sweep), {{"calibration_points", qp}, {"random_points", sweep}, {"branches", branches}});
    rb.add("unit residue at 0 [" + tag + "]", "characterization of w_alpha, residue normalization",
           std::max(res, cross) < 1e-9, std::max(res, cross), {{"extrapolated", res}, {"theta_derivative_crosscheck", cross}});
    rb.add("finite away from E_n [" + tag + "]", "characterization of w_alpha, poles", finite_min > 0.5, 0.0);
  }
  return rb.finish({{"quasi_periodicity", 1e-9}, {"residue", 1e-9}});
}

SuiteResult suite_cybe(const SuiteConfig& cfg) {
  require_range(cfg.n >= 2 && cfg.n <= 4, "cybe supports 2 <= n <= 4");
  if (std::gcd(cfg.c, cfg.n) != 1) throw BoundExceeded("cybe needs gcd(c, n) = 1");
  ReportBuilder rb("cybe", cfg);
  const Lattice lat(cfg.tau, cfg.n);
  const BelavinRMatrix r(lat, cfg.c), r_long(lat, cfg.c, cfg.trunc);
  std::mt19937_64 rng(cfg.seed);
  double worst = 0.0, trunc_diff = 0.0;
  Json residuals = Json::array(), variants = Json::object();
  int done = 0;
  while (done < 20) {
    const auto p = sample_points(lat, 2, rng, 0.02);
    if (distance_to_torsion(p[0] + p[1], lat) < 0.02) continue;
    const auto res = cybe_residual(p[0], p[1], r);
    const auto res_long = cybe_residual(p[0], p[1], r_long);
    worst = std::max(worst, res.residual);
    trunc_diff = std::max(trunc_diff, std::abs(res.residual - res_long.residual));
    residuals.push_back(res.residual);
    for (const auto& [k, v] : res.variants)
      variants[k] = std::max(variants.contains(k) ? variants[k].get<double>() : 0.0, v);
    ++done;
  }
  rb.add("classical Yang-Baxter equation as printed", "classical Yang-Baxter equation for r_{n,c}", worst < cfg.tol, worst,
         {{"residuals", residuals}, {"other_argument_conventions_max", variants}, {"samples", 20}});
  rb.add("truncation doubling changes residuals by < 1e-12", "theta series truncation", trunc_diff < 1e-12, trunc_diff,
         {{"multiplier", cfg.trunc}});
  return rb.finish({{"cybe", cfg.tol}, {"truncation", 1e-12}}, {{"truncation", {{"rule", "relative 1e-16"}, {"multiplier", cfg.trunc}}}});
}

SuiteResult suite_residue(const SuiteConfig& cfg) {
  ReportBuilder rb("residue", cfg);
  long flip_bad = 0;
  for (int n = 1; n <= 5; ++n)
    for (int c = 1; c <= n; ++c)
      if (std::gcd(c, n) == 1 && !tensor_sum_is_flip(n, c)) ++flip_bad;
  rb.add("exact sum over E_n of T (x) T^-1 equals nP, n <= 5", "residue structure of r_{n,c}", flip_bad == 0,
         static_cast<double>(flip_bad));
  std::vector<std::pair<int, int>> cases;
  if (cfg.n_set) cases.emplace_back(cfg.n, cfg.c);
  else cases = {{2, 1}, {3, 1}, {3, 2}};
  for (const auto& [n, c] : cases) {
    require_range(n >= 2 && n <= 4 && std::gcd(c, n) == 1, "residue supports 2 <= n <= 4 with gcd(c, n) = 1");
    const BelavinRMatrix r(Lattice(cfg.tau, n), c);
    const ComplexMatrix expect = static_cast<double>(n) * flip_matrix(n) - ComplexMatrix::Identity(n * n, n * n);
    const double err = (r.residue() - expect).norm();
    rb.add("lim u r(u) = nP - I [n=" + std::to_string(n) + " c=" + std::to_string(c) + "]", "residue structure of r_{n,c}",
           err < 1e-6, err, {{"extrapolation", "Richardson over h, h/2, h/4"}});
  }
  return rb.finish({{"limit", 1e-6}});
}

SuiteResult suite_automorphy(const SuiteConfig& cfg) {
  require_range(cfg.n >= 2 && cfg.n <= 4 && std::gcd(cfg.c, cfg.n) == 1, "automorphy supports 2 <= n <= 4, gcd(c, n) = 1");
  ReportBuilder rb("automorphy", cfg);
  const int n = cfg.n, c = cfg.c;
  const Lattice lat(cfg.tau, n);
  const BelavinRMatrix r(lat, c);
  std::mt19937_64 rng(cfg.seed);
  const auto xs = sample_points(lat, 8, rng, 0.05);

  const ComplexMatrix scalar = Complex(1.7, -0.4) * ComplexMatrix::Identity(n, n);
  const auto sc = automorphy_check([scalar](Complex) { return scalar; }, c, lat, xs);
  rb.add("scalar sections are automorphic", "automorphy condition", sc.max_deviation < 1e-10, sc.max_deviation);

  Json raw = Json::array();
  double fixed_worst = 0.0, neg_best = INFINITY;
  std::set<int> corrections;
  for (const auto& b : torsion_points(n)) {
    if (b.is_zero()) continue;
    const auto rr = automorphy_check(section(r, b, b), c, lat, xs, &b);
    corrections.insert(rr.exponent_correction);
    raw.push_back({{"beta", {b.a1, b.a2}}, {"deviation", rr.max_deviation}, {"exponent", rr.exponent_correction}});
    const TorsionPoint gamma = b.scaled(kCommutatorSign * c);
    fixed_worst = std::max(fixed_worst, automorphy_check(section(r, gamma, b), c, lat, xs).max_deviation);
    TorsionPoint other = b + TorsionPoint(1, 0, n);
    if (other.is_zero()) other = b + TorsionPoint(0, 1, n);
    neg_best = std::min(neg_best, automorphy_check(section(r, gamma, other), c, lat, xs).max_deviation);
  }
  const int expected_k = (((1 - kCommutatorSign * c) % n) + n) % n;
  rb.add("measured exponent for w_beta T(beta) is a power of the pairing", "automorphy of basis sections",
         corrections.size() == 1 && *corrections.begin() == expected_k, 0.0,
         {{"sections", raw}, {"exponent", corrections.size() == 1 ? *corrections.begin() : -1}, {"predicted", expected_k}});
  rb.add("w_{eps c beta} T(beta) satisfies automorphy", "automorphy condition with the recorded sign", fixed_worst < 1e-9,
         fixed_worst, {{"sign", kCommutatorSign}});
  rb.add("negative control: wrong section violates automorphy", "automorphy condition, negative control", neg_best > 0.1,
         0.0, {{"min_deviation", neg_best}});
  return rb.finish({{"automorphic", 1e-9}, {"scalar", 1e-10}, {"negative_control", 0.1}});
}

// Lambda-periodic random matrix function: sum of w_gamma(x) M_gamma.
MatrixFunction random_periodic(const BelavinRMatrix& r, std::mt19937_64& rng) {
  const int n = r.n();
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::pair<const WFunction*, ComplexMatrix>> parts;
  ComplexMatrix m0(n, n);
  for (long k = 0; k < m0.size(); ++k) m0.data()[k] = Complex(g(rng), g(rng));
  for (const auto& w : r.w()) {
    ComplexMatrix m(n, n);
    for (long k = 0; k < m.size(); ++k) m.data()[k] = Complex(g(rng), g(rng));
    parts.emplace_back(&w, m);
  }
  return [parts, m0](Complex x) -> ComplexMatrix {
    ComplexMatrix out = m0;
    for (const auto& [w, m] : parts) out += (*w)(x)*m;
    return out;
  };
}

SuiteResult suite_en(const SuiteConfig& cfg) {
  const int n = cfg.n_set ? cfg.n : 2;
  require_range(n >= 2 && n <= 4 && std::gcd(cfg.c, n) == 1, "en-invariance supports 2 <= n <= 4, gcd(c, n) = 1");
  ReportBuilder rb("en-invariance", cfg);
  const int c = cfg.c;
  const Lattice lat(cfg.tau, n);
  const BelavinRMatrix r(lat, c);
  std::mt19937_64 rng(cfg.seed);
  const auto op = operator_of_matrix_function(random_periodic(r, rng), n, lat);
  const auto op2 = operator_of_matrix_function(random_periodic(r, rng), n, lat);
  const auto pts = torsion_points(n);

  const double id_dev = sampled_deviation(en_action(op, TorsionPoint(0, 0, n), c, lat), op, 4, rng, lat);
  rb.add("alpha = 0 acts as the identity", "E_n action on operators", id_dev < 1e-12, id_dev);

  double act = 0.0, conv = 0.0, eq = 0.0;
  for (const auto& a : pts) {
    const auto a_op = en_action(op, a, c, lat);
    for (const auto& b : pts)
      act = std::max(act, sampled_deviation(en_action(a_op, b, c, lat), en_action(op, a + b, c, lat), 3, rng, lat));
    conv = std::max(conv, sampled_deviation(a_op, en_action(op, a, c, lat, PhaseConvention::Symmetric), 3, rng, lat));
    eq = std::max(eq, sampled_deviation(en_action(compose(op, op2), a, c, lat),
                                        compose(a_op, en_action(op2, a, c, lat)), 3, rng, lat));
  }
  rb.add("group action: alpha.(beta.op) = (alpha+beta).op", "E_n action on operators", act < 1e-10, act,
         {{"degree", 1}});
  rb.add("phase representatives {0..n-1} and symmetric agree", "E_n action phase convention", conv < 1e-12, conv);
  rb.add("action preserves composition", "E_n equivariance of the convolution product", eq < 1e-9, eq);

  double inv = 0.0;
  for (const auto& b : pts) {
    const auto sec = operator_of_matrix_function(section(r, b.scaled(kCommutatorSign * c), b), n, lat);
    for (const auto& a : pts) inv = std::max(inv, sampled_deviation(en_action(sec, a, c, lat), sec, 3, rng, lat));
  }
  rb.add("images of automorphic sections are E_n-invariant", "invariance of the degree-1 images", inv < 1e-9, inv);

  const auto xs = sample_points(lat, 8, rng, 0.05);
  double neg = INFINITY;
  for (const auto& b : pts) {
    if (b.is_zero()) continue;
    TorsionPoint other = b + TorsionPoint(1, 0, n);
    if (other.is_zero()) other = b + TorsionPoint(0, 1, n);
    neg = std::min(neg, automorphy_check(section(r, b.scaled(kCommutatorSign * c), other), c, lat, xs).max_deviation);
  }
  rb.add("negative control: wrong section violates automorphy", "automorphy condition, negative control", neg > 0.1, 0.0,
         {{"min_deviation", neg}});
  return rb.finish({{"action", 1e-10}, {"invariance", 1e-9}, {"negative_control", 0.1}});
}

SuiteResult suite_oracle(const SuiteConfig& cfg) {
  ReportBuilder rb("oracle", cfg);
  std::mt19937_64 rng(cfg.seed);
  const auto ground = integer_points(8);
  long singles = 0, bad = 0;
  Json fails = Json::array();
  for (int n = 1; n <= 3; ++n)
    for (int d = 0; d <= 3; ++d) {
      const auto mats = enumerate_all_matrices(n, d);
      std::map<IntMatrix, BlockSymFunction> fn;
      for (const auto& a : mats) fn.emplace(a, random_polynomial(BlockShape::of_matrix(a), 1, rng, 2).on_points(ground));
      for (const auto& a : mats)
        for (const auto& b : mats) {
          if (a.col_sums() != b.row_sums()) continue;
          ++singles;
          const auto o1 = ConvOperator::term(a, fn.at(a)), o2 = ConvOperator::term(b, fn.at(b));
          if (mismatch_count(operator_table(compose(o1, o2)), compose_bruteforce(o1, o2)) != 0) {
            ++bad;
            if (fails.size() < 10) fails.push_back({{"a", to_json(a)}, {"b", to_json(b)}});
          }
        }
    }
  rb.add("compose equals the fiber-sum oracle on all single-term pairs", "composition of convolution operators",
         bad == 0, static_cast<double>(bad), {{"pairs", singles}, {"points", 8}, {"failures", fails}});

  long rnd_bad = 0;
  std::uniform_int_distribution<int> dd(0, 3);
  for (int s = 0; s < 100; ++s) {
    const int d = dd(rng);
    const auto mats = enumerate_all_matrices(2, d);
    std::uniform_int_distribution<std::size_t> pick(0, mats.size() - 1);
    IntMatrix a = mats[pick(rng)], b;
    std::vector<IntMatrix> partners;
    for (const auto& m : mats)
      if (m.row_sums() == a.col_sums()) partners.push_back(m);
    b = partners[std::uniform_int_distribution<std::size_t>(0, partners.size() - 1)(rng)];
    const auto f = random_polynomial(BlockShape::of_matrix(a), 2, rng), g = random_polynomial(BlockShape::of_matrix(b), 2, rng);
    const auto exact = compose(ConvOperator::term(a, f), ConvOperator::term(b, g));
    ConvOperator tabulated(ground);
    for (const auto& [m, h] : exact.terms()) tabulated.add_term(m, h.on_points(ground));
    const auto oracle = compose_bruteforce(ConvOperator::term(a, f.on_points(ground)), ConvOperator::term(b, g.on_points(ground)));
    if (mismatch_count(operator_table(tabulated), oracle) != 0) ++rnd_bad;
  }
  rb.add("polynomial compose equals the oracle on 100 random pairs", "composition of convolution operators",
         rnd_bad == 0, static_cast<double>(rnd_bad), {{"n", 2}, {"max_degree", 2}});
  return rb.finish({{"exact", true}, {"runtime_target_seconds", 60}});
}

SuiteResult suite_shortcut(const SuiteConfig& cfg) {
  ReportBuilder rb("shortcut", cfg);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> nn(1, 3), dd(0, 4), side(0, 1);
  long bad = 0;
  for (int s = 0; s < 50; ++s) {
    const int n = nn(rng), d = dd(rng);
    const auto comps = enumerate_compositions(n, d);
    const auto v = comps[std::uniform_int_distribution<std::size_t>(0, comps.size() - 1)(rng)];
    std::vector<IntMatrix> partners;
    const bool left = side(rng) == 0;
    for (const auto& m : enumerate_all_matrices(n, d))
      if ((left ? m.row_sums() : m.col_sums()) == v) partners.push_back(m);
    const auto b = partners[std::uniform_int_distribution<std::size_t>(0, partners.size() - 1)(rng)];
    const auto diag = IntMatrix::diagonal(v);
    const auto f = random_polynomial(BlockShape::of_matrix(diag), 2, rng), g = random_polynomial(BlockShape::of_matrix(b), 2, rng);
    const auto od = ConvOperator::term(diag, f), ob = ConvOperator::term(b, g);
    const auto fast = left ? compose(od, ob) : compose(ob, od);
    const auto slow = left ? compose_general(od, ob) : compose_general(ob, od);
    if (mismatch_count(fast, slow) != 0) ++bad;
  }
  rb.add("diagonal shortcut equals the transfer-array formula", "composition with a diagonal operator", bad == 0,
         static_cast<double>(bad), {{"instances", 50}});
  return rb.finish({{"exact", true}});
}

SuiteResult suite_leading(const SuiteConfig& cfg) {
  ReportBuilder rb("leading-term", cfg);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> nn(2, 3), dd(1, 5);
  long bad = 0, tried = 0, split_bad = 0;
  Json fails = Json::array();
  for (int lower = 0; lower <= 1; ++lower) {
    int found = 0;
    while (found < 50) {
      ++tried;
      const int n = nn(rng), d = dd(rng);
      const int p = lower ? std::uniform_int_distribution<int>(1, n - 1)(rng) : std::uniform_int_distribution<int>(0, n - 2)(rng);
      const int src = lower ? p - 1 : p + 1;  // the row of B that loses mass
      const auto mats = enumerate_all_matrices(n, d);
      const auto b = mats[std::uniform_int_distribution<std::size_t>(0, mats.size() - 1)(rng)];
      // m: last (upper) or first (lower) nonzero column of row src
      int m = -1;
      for (int k = 0; k < n; ++k)
        if (b.at(src, k) > 0 && (m < 0 || !lower)) m = k;
      if (m < 0) continue;
      const int mass = std::uniform_int_distribution<int>(1, b.at(src, m))(rng);
      // A: columns sum to rowSums(B), one off-diagonal entry a_{p,src}
      auto v = b.row_sums().parts();
      IntMatrix a(n);
      for (int i = 0; i < n; ++i) a.set(i, i, v[static_cast<std::size_t>(i)]);
      a.add(src, src, -mass);
      a.set(p, src, mass);
      const auto lead = lower ? leading_array_lower(a, b, p) : leading_array(a, b, p);
      IntMatrix c = b;
      c.add(p, m, mass);
      c.add(src, m, -mass);
      const auto prod = compose(ConvOperator::term(a, BlockSymFunction::constant(BlockShape::of_matrix(a), ExactLine{}, 1)),
                                ConvOperator::term(b, BlockSymFunction::constant(BlockShape::of_matrix(b), ExactLine{}, 1)));
      bool ok = lead.product == c && prod.find(c) != nullptr;
      for (const auto& [cp, h] : prod.terms())
        if (cp != c && !(preceq(cp, c) && cp != c)) ok = false;
      const auto splits = lower ? splitting_set_lower(a, b, p) : splitting_set(a, b, p);
      if (splits.size() != transfer_arrays(a, b).size()) ++split_bad;
      if (!ok) {
        ++bad;
        if (fails.size() < 10) fails.push_back({{"a", to_json(a)}, {"b", to_json(b)}, {"lower", lower == 1}});
      }
      ++found;
    }
  }
  rb.add("support is the leading matrix plus strictly smaller ones", "leading term of a product with a generator",
         bad == 0, static_cast<double>(bad), {{"instances", 100}, {"failures", fails}});
  rb.add("splitting set is in bijection with the transfer arrays", "splitting of transfer arrays", split_bad == 0,
         static_cast<double>(split_bad));
  return rb.finish({{"exact", true}});
}

struct SuiteEntry {
  std::string name;
  std::vector<std::string> aliases;
  SuiteResult (*run)(const SuiteConfig&);
};

const std::vector<SuiteEntry>& registry() {
  static const std::vector<SuiteEntry> r{
      {"tau-homomorphism", {"tau"}, suite_tau},
      {"express-residual", {"express"}, suite_express},
      {"bruhat-monotone", {"bruhat"}, suite_bruhat},
      {"orbit-census", {"orbits", "census"}, suite_orbits},
      {"heisenberg", {}, suite_heisenberg},
      {"w-calibration", {"w"}, suite_w},
      {"cybe", {}, suite_cybe},
      {"residue", {}, suite_residue},
      {"automorphy", {}, suite_automorphy},
      {"en-invariance", {"en"}, suite_en},
      {"oracle", {"compose"}, suite_oracle},
      {"shortcut", {"diagonal"}, suite_shortcut},
      {"leading-term", {"leading"}, suite_leading},
  };
  return r;
}

}  // namespace

std::optional<std::string> canonical_suite(const std::string& name) {
  for (const auto& e : registry()) {
    if (e.name == name) return e.name;
    for (const auto& a : e.aliases)
      if (a == name) return e.name;
  }
  return std::nullopt;
}

std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (const auto& e : registry()) out.push_back(e.name);
  return out;
}

SuiteResult run_suite(const std::string& name, const SuiteConfig& cfg) {
  const auto canon = canonical_suite(name);
  if (!canon) throw std::out_of_range("unknown suite '" + name + "'");
  for (const auto& e : registry())
    if (e.name == *canon) return e.run(cfg);
  throw std::logic_error("suite registry inconsistent");
}

SuiteResult schur_report(int n, int d) {
  require_range(n >= 1 && n <= 3 && d >= 0 && d <= 4, "schur supports n <= 3, d <= 4");
  const auto table = schur_structure_constants(n, d);
  const auto basis = enumerate_all_matrices(n, d);
  Json jb = Json::array(), jt = Json::array();
  for (const auto& a : basis) jb.push_back(to_json(a));
  bool nonneg = true;
  for (const auto& [key, v] : table) {
    const auto& [a, b, c] = key;
    nonneg = nonneg && v > 0;
    jt.push_back({{"a", to_json(a)}, {"b", to_json(b)}, {"c", to_json(c)}, {"value", v}});
  }
  const bool assoc = schur_associative(table, n, d);
  Json report = {{"command", "schur"},
                 {"n", n},
                 {"d", d},
                 {"basis_size", basis.size()},
                 {"basis", jb},
                 {"structure_constants", jt},
                 {"nonnegative_integers", nonneg},
                 {"associative", assoc},
                 {"pass", assoc && nonneg},
                 {"timestamp", iso_timestamp()}};
  return {assoc && nonneg, report};
}

BlockSymFunction random_polynomial(const BlockShape& shape, int max_degree, std::mt19937_64& rng, int terms) {
  std::uniform_int_distribution<int> num(-3, 3), den(1, 2), deg(0, max_degree), nterms(1, std::max(terms, 1));
  PolyTerms out;
  const int count = nterms(rng);
  for (int t = 0; t < count; ++t) {
    OrbitKey key(static_cast<std::size_t>(shape.d()), 0);
    if (shape.d() > 0) {
      std::uniform_int_distribution<int> var(0, shape.d() - 1);
      for (int k = deg(rng); k > 0; --k) ++key[static_cast<std::size_t>(var(rng))];
    }
    Rational c(num(rng), den(rng));
    c.canonicalize();
    auto one = BlockSymFunction::polynomial(shape, PolyTerms{{key, c}});
    for (const auto& [k, v] : one.terms()) out[k] += v;
  }
  return BlockSymFunction::polynomial(shape, out);
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace convalg
