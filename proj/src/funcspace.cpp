#include "convalg/funcspace.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace convalg {

// ------------------------------------------------------------------ shapes

std::string BlockLabel::str() const {
  std::ostringstream os;
  os << '(';
  for (int k = 0; k < arity; ++k) os << (k ? "," : "") << idx[static_cast<std::size_t>(k)] + 1;
  os << ')';
  return os.str();
}

BlockShape::BlockShape(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  std::set<BlockLabel> seen;
  for (const auto& b : blocks_) {
    if (b.size < 0) throw std::invalid_argument("block size is negative");
    if (!seen.insert(b.label).second && blocks_.size() > 1) {
      throw std::invalid_argument("duplicate block label " + b.label.str());
    }
    offsets_.push_back(total_);
    total_ += b.size;
  }
}

BlockShape BlockShape::of_matrix(const IntMatrix& a) {
  std::vector<Block> blocks;
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j) blocks.push_back({BlockLabel::of(i, j), a.at(i, j)});
  return BlockShape(std::move(blocks));
}

BlockShape BlockShape::of_composition(const Composition& v) {
  std::vector<Block> blocks;
  for (int i = 0; i < v.n(); ++i) blocks.push_back({BlockLabel::of(i), v[i]});
  return BlockShape(std::move(blocks));
}

BlockShape BlockShape::of_array(const TransferArray& t) {
  std::vector<Block> blocks;
  const int n = t.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) blocks.push_back({BlockLabel::of(i, j, k), t.at(i, j, k)});
  return BlockShape(std::move(blocks));
}

BlockShape BlockShape::single(int size) { return BlockShape({{BlockLabel::none(), size}}); }

int BlockShape::find(const BlockLabel& label) const {
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    if (blocks_[b].label == label) return static_cast<int>(b);
  return -1;
}

std::vector<int> BlockShape::sizes() const {
  std::vector<int> s;
  for (const auto& b : blocks_) s.push_back(b.size);
  return s;
}

std::string BlockShape::str() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t b = 0; b < blocks_.size(); ++b) os << (b ? " " : "") << blocks_[b].label.str() << ':' << blocks_[b].size;
  os << '}';
  return os.str();
}

MergeMap::MergeMap(BlockShape source, BlockShape target, std::vector<int> target_of)
    : source_(std::move(source)), target_(std::move(target)), target_of_(std::move(target_of)) {
  if (static_cast<int>(target_of_.size()) != source_.count()) throw std::invalid_argument("merge map arity mismatch");
  fibers_.assign(static_cast<std::size_t>(target_.count()), {});
  std::vector<int> sums(static_cast<std::size_t>(target_.count()), 0);
  for (int s = 0; s < source_.count(); ++s) {
    int t = target_of_[static_cast<std::size_t>(s)];
    if (t < 0 || t >= target_.count()) throw std::invalid_argument("merge map target out of range");
    fibers_[static_cast<std::size_t>(t)].push_back(s);
    sums[static_cast<std::size_t>(t)] += source_.size(s);
  }
  for (int t = 0; t < target_.count(); ++t) {
    if (sums[static_cast<std::size_t>(t)] != target_.size(t)) {
      throw std::invalid_argument("merge map sizes are not additive at target block " + target_.block(t).label.str());
    }
  }
}

namespace {

MergeMap array_projection(const TransferArray& t, int drop) {
  const int n = t.n();
  IntMatrix m = drop == 2 ? t.marginal12() : drop == 0 ? t.marginal23() : t.marginal13();
  std::vector<int> target_of;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        std::array<int, 3> ijk{i, j, k};
        std::vector<int> kept;
        for (int x = 0; x < 3; ++x)
          if (x != drop) kept.push_back(ijk[static_cast<std::size_t>(x)]);
        target_of.push_back(kept[0] * n + kept[1]);
      }
  return MergeMap(BlockShape::of_array(t), BlockShape::of_matrix(m), std::move(target_of));
}

}  // namespace

MergeMap MergeMap::pr12(const TransferArray& t) { return array_projection(t, 2); }
MergeMap MergeMap::pr23(const TransferArray& t) { return array_projection(t, 0); }
MergeMap MergeMap::pr13(const TransferArray& t) { return array_projection(t, 1); }

MergeMap MergeMap::rows(const IntMatrix& a) {
  std::vector<int> target_of;
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j) target_of.push_back(i);
  return MergeMap(BlockShape::of_matrix(a), BlockShape::of_composition(a.row_sums()), std::move(target_of));
}

MergeMap MergeMap::cols(const IntMatrix& a) {
  std::vector<int> target_of;
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j) target_of.push_back(j);
  return MergeMap(BlockShape::of_matrix(a), BlockShape::of_composition(a.col_sums()), std::move(target_of));
}

// ------------------------------------------------------------------ grounds

void validate_ground(const GroundSpace& g) {
  if (const auto* fs = std::get_if<FiniteSet>(&g)) {
    std::set<Rational> seen(fs->points.begin(), fs->points.end());
    if (seen.size() != fs->points.size()) throw std::invalid_argument("finite ground has repeated points");
    if (fs->points.empty()) throw std::invalid_argument("finite ground is empty");
  } else if (const auto* ts = std::get_if<TorusSampled>(&g)) {
    if (!(ts->tau.imag() > 0)) throw std::invalid_argument("torus ground needs Im(tau) > 0");
  }
}

std::string ground_name(const GroundSpace& g) {
  switch (g.index()) {
    case 0: return "exact_line";
    case 1: return "finite_set";
    default: return "torus";
  }
}

FiniteSet integer_points(int n) {
  FiniteSet fs;
  for (int k = 0; k < n; ++k) fs.points.emplace_back(k);
  return fs;
}

// ------------------------------------------------- combinatorial helpers

namespace {

long binom(long n, long k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (long x = 1; x <= k; ++x) r = r * (n - k + x) / x;
  return r;
}

std::vector<int> multiplicities(const std::vector<int>& sorted_values) {
  std::vector<int> out;
  for (std::size_t a = 0; a < sorted_values.size();) {
    std::size_t b = a;
    while (b < sorted_values.size() && sorted_values[b] == sorted_values[a]) ++b;
    out.push_back(static_cast<int>(b - a));
    a = b;
  }
  return out;
}

template <class Seq>
Rational multiplicity_factorials(const Seq& s) {
  // s sorted (either direction)
  Rational r(1);
  for (std::size_t a = 0; a < s.size();) {
    std::size_t b = a;
    while (b < s.size() && s[b] == s[a]) ++b;
    r *= factorial(static_cast<int>(b - a));
    a = b;
  }
  return r;
}

OrbitKey sorted_desc(OrbitKey k) {
  std::sort(k.begin(), k.end(), std::greater<>());
  return k;
}

int key_degree(const OrbitKey& k) { return std::accumulate(k.begin(), k.end(), 0); }

}  // namespace

const std::vector<std::vector<int>>& multisets(int N, int m) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<std::vector<int>>> cache;
  std::lock_guard lock(mu);
  auto key = std::make_pair(N, m);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  std::vector<std::vector<int>> all(static_cast<std::size_t>(binom(N + m - 1, m)));
  if (m == 0) all.assign(1, {});
  std::vector<int> cur(static_cast<std::size_t>(m));
  auto rec = [&](auto&& self, int pos, int lo) -> void {
    if (pos == m) {
      all[multiset_rank(cur)] = cur;
      return;
    }
    for (int x = lo; x < N; ++x) {
      cur[static_cast<std::size_t>(pos)] = x;
      self(self, pos + 1, x);
    }
  };
  if (m > 0) rec(rec, 0, 0);
  return cache.emplace(key, std::move(all)).first->second;
}

std::size_t multiset_rank(const std::vector<int>& s) {
  long r = 0;
  for (std::size_t i = 0; i < s.size(); ++i) r += binom(s[i] + static_cast<long>(i), static_cast<long>(i) + 1);
  return static_cast<std::size_t>(r);
}

Rational orbit_size(const OrbitKey& lambda) {
  return factorial(static_cast<int>(lambda.size())) / multiplicity_factorials(lambda);
}

const std::vector<std::pair<OrbitKey, Rational>>& orbit_product(const OrbitKey& lambda, const OrbitKey& mu) {
  static std::mutex mu_lock;
  static std::map<std::pair<OrbitKey, OrbitKey>, std::vector<std::pair<OrbitKey, Rational>>> cache;
  std::lock_guard lock(mu_lock);
  auto key = std::make_pair(lambda, mu);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  if (lambda.size() != mu.size()) throw std::invalid_argument("orbit_product: length mismatch");
  std::map<OrbitKey, long> counts;
  OrbitKey beta = mu;
  std::sort(beta.begin(), beta.end());
  do {
    OrbitKey nu(lambda.size());
    for (std::size_t a = 0; a < nu.size(); ++a) {
      int s = lambda[a] + beta[a];
      if (s > 255) throw BoundExceeded("exponent overflow in orbit product");
      nu[a] = static_cast<std::uint8_t>(s);
    }
    ++counts[sorted_desc(std::move(nu))];
  } while (std::next_permutation(beta.begin(), beta.end()));
  std::vector<std::pair<OrbitKey, Rational>> out;
  Rational ol = orbit_size(lambda);
  for (auto& [nu, c] : counts) {
    Rational coef = Rational(c) * ol / orbit_size(nu);
    coef.canonicalize();
    out.emplace_back(nu, coef);
  }
  return cache.emplace(key, std::move(out)).first->second;
}

namespace {

// All ways to split multiset lambda (descending) into ordered parts of the given sizes,
// each part descending. Memoized.
const std::vector<std::vector<OrbitKey>>& distributions(const OrbitKey& lambda, const std::vector<int>& sizes) {
  static std::mutex mu;
  static std::map<std::pair<OrbitKey, std::vector<int>>, std::vector<std::vector<OrbitKey>>> cache;
  std::lock_guard lock(mu);
  auto key = std::make_pair(lambda, sizes);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  // distinct values with multiplicities
  std::vector<std::uint8_t> values;
  std::vector<int> mult;
  for (std::size_t a = 0; a < lambda.size();) {
    std::size_t b = a;
    while (b < lambda.size() && lambda[b] == lambda[a]) ++b;
    values.push_back(lambda[a]);
    mult.push_back(static_cast<int>(b - a));
    a = b;
  }
  std::vector<std::vector<OrbitKey>> out;
  std::vector<OrbitKey> parts(sizes.size());
  // choose counts for part p, value index v
  auto rec = [&](auto&& self, std::size_t p, std::size_t v, int need) -> void {
    if (p == sizes.size()) {
      out.push_back(parts);
      return;
    }
    if (v == values.size()) {
      if (need == 0) self(self, p + 1, 0, p + 1 < sizes.size() ? sizes[p + 1] : 0);
      return;
    }
    int hi = std::min(need, mult[v]);
    for (int x = hi; x >= 0; --x) {
      mult[v] -= x;
      for (int r = 0; r < x; ++r) parts[p].push_back(values[v]);
      self(self, p, v + 1, need - x);
      for (int r = 0; r < x; ++r) parts[p].pop_back();
      mult[v] += x;
    }
  };
  if (sizes.empty()) {
    out.push_back({});
  } else {
    rec(rec, 0, 0, sizes[0]);
  }
  return cache.emplace(key, std::move(out)).first->second;
}

// Per-block configuration indexing for tables.
struct TableLayout {
  int N = 0;
  std::vector<const std::vector<std::vector<int>>*> lists;
  std::vector<std::size_t> strides;
  std::size_t total = 1;

  TableLayout(const BlockShape& shape, int points) : N(points) {
    for (int b = 0; b < shape.count(); ++b) lists.push_back(&multisets(N, shape.size(b)));
    strides.assign(lists.size(), 1);
    for (std::size_t b = lists.size(); b-- > 0;) {
      strides[b] = total;
      total *= lists[b]->size();
    }
  }

  std::size_t index_of(const std::vector<std::vector<int>>& config) const {
    std::size_t idx = 0;
    for (std::size_t b = 0; b < lists.size(); ++b) idx += multiset_rank(config[b]) * strides[b];
    return idx;
  }

  // Calls fn(index, per-block multiset pointers) for every configuration.
  template <class Fn>
  void for_each(Fn&& fn) const {
    std::vector<std::size_t> pick(lists.size(), 0);
    std::vector<const std::vector<int>*> cfg(lists.size());
    for (std::size_t b = 0; b < lists.size(); ++b) cfg[b] = &(*lists[b])[0];
    for (std::size_t idx = 0; idx < total; ++idx) {
      fn(idx, cfg);
      for (std::size_t b = lists.size(); b-- > 0;) {
        if (++pick[b] < lists[b]->size()) {
          cfg[b] = &(*lists[b])[pick[b]];
          break;
        }
        pick[b] = 0;
        cfg[b] = &(*lists[b])[0];
      }
    }
  }
};

int point_count(const GroundSpace& g) { return static_cast<int>(std::get<FiniteSet>(g).points.size()); }

void require_same(const BlockSymFunction& f, const BlockSymFunction& g, const char* what) {
  if (!(f.shape() == g.shape())) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch " + f.shape().str() + " vs " + g.shape().str());
  }
  if (!(f.ground() == g.ground())) throw std::invalid_argument(std::string(what) + ": ground mismatch");
}

std::vector<std::vector<int>> collect(const std::vector<const std::vector<int>*>& cfg) {
  std::vector<std::vector<int>> out;
  for (const auto* c : cfg) out.push_back(*c);
  return out;
}

Rational monomial_symmetric_value(const OrbitKey& lambda, const std::vector<Rational>& xs) {
  OrbitKey alpha = lambda;
  std::sort(alpha.begin(), alpha.end());
  Rational total(0);
  do {
    Rational term(1);
    for (std::size_t a = 0; a < alpha.size(); ++a) {
      Rational p(1);
      for (int e = 0; e < alpha[a]; ++e) p *= xs[a];
      term *= p;
    }
    total += term;
  } while (std::next_permutation(alpha.begin(), alpha.end()));
  return total;
}

Complex monomial_symmetric_value(const OrbitKey& lambda, const Complex* xs) {
  OrbitKey alpha = lambda;
  std::sort(alpha.begin(), alpha.end());
  Complex total(0);
  do {
    Complex term(1);
    for (std::size_t a = 0; a < alpha.size(); ++a) term *= std::pow(xs[a], static_cast<int>(alpha[a]));
    total += term;
  } while (std::next_permutation(alpha.begin(), alpha.end()));
  return total;
}

OrbitKey segment(const OrbitKey& key, const BlockShape& shape, int b) {
  auto first = key.begin() + shape.offset(b);
  return OrbitKey(first, first + shape.size(b));
}

}  // namespace

// -------------------------------------------------------------- functions

BlockSymFunction BlockSymFunction::constant(const BlockShape& shape, const GroundSpace& ground, const Rational& c) {
  validate_ground(ground);
  BlockSymFunction f;
  f.shape_ = shape;
  f.ground_ = ground;
  switch (ground.index()) {
    case 0:
      if (c != 0) f.terms_.emplace(OrbitKey(static_cast<std::size_t>(shape.d()), 0), c);
      break;
    case 1:
      f.values_.assign(TableLayout(shape, point_count(ground)).total, c);
      break;
    default: {
      double v = c.get_d();
      f.rule_ = std::make_shared<const TorusRule>([v](const std::vector<Complex>&) { return Complex(v); });
      f.provenance_ = "const(" + to_string(c) + ")";
      f.torus_zero_ = c == 0;
    }
  }
  return f;
}

BlockSymFunction BlockSymFunction::polynomial(const BlockShape& shape, const PolyTerms& terms, int degree_cap) {
  BlockSymFunction f;
  f.shape_ = shape;
  f.ground_ = ExactLine{};
  f.degree_cap_ = degree_cap;
  for (const auto& [k, c] : terms) {
    if (static_cast<int>(k.size()) != shape.d()) throw std::invalid_argument("polynomial key length differs from d");
    if (c == 0) continue;
    OrbitKey key;
    for (int b = 0; b < shape.count(); ++b) {
      auto seg = sorted_desc(segment(k, shape, b));
      key.insert(key.end(), seg.begin(), seg.end());
    }
    if (key_degree(key) > degree_cap) {
      throw BoundExceeded("polynomial degree " + std::to_string(key_degree(key)) + " exceeds cap " +
                          std::to_string(degree_cap));
    }
    auto& slot = f.terms_[key];
    slot += c;
    if (slot == 0) f.terms_.erase(key);
  }
  return f;
}

BlockSymFunction BlockSymFunction::orbit_sum(const BlockShape& shape, const std::vector<std::vector<int>>& exponents,
                                             const Rational& c, int degree_cap) {
  if (static_cast<int>(exponents.size()) != shape.count()) throw std::invalid_argument("orbit_sum: block count mismatch");
  OrbitKey key;
  for (int b = 0; b < shape.count(); ++b) {
    const auto& e = exponents[static_cast<std::size_t>(b)];
    if (static_cast<int>(e.size()) != shape.size(b)) throw std::invalid_argument("orbit_sum: block size mismatch");
    for (int x : e) {
      if (x < 0 || x > 255) throw std::invalid_argument("orbit_sum: exponent out of range");
      key.push_back(static_cast<std::uint8_t>(x));
    }
  }
  return polynomial(shape, {{key, c}}, degree_cap);
}

BlockSymFunction BlockSymFunction::univariate(const std::vector<Rational>& coeffs, int degree_cap) {
  PolyTerms t;
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    if (coeffs[k] != 0) t[OrbitKey{static_cast<std::uint8_t>(k)}] += coeffs[k];
  return polynomial(BlockShape::single(1), t, degree_cap);
}

BlockSymFunction BlockSymFunction::table(const BlockShape& shape, const FiniteSet& ground, std::vector<Rational> values) {
  validate_ground(ground);
  BlockSymFunction f;
  f.shape_ = shape;
  f.ground_ = ground;
  if (values.size() != TableLayout(shape, static_cast<int>(ground.points.size())).total) {
    throw std::invalid_argument("table size does not match the configuration count");
  }
  f.values_ = std::move(values);
  return f;
}

BlockSymFunction BlockSymFunction::rule(const BlockShape& shape, const TorusSampled& ground, TorusRule r,
                                        std::string provenance) {
  validate_ground(ground);
  BlockSymFunction f;
  f.shape_ = shape;
  f.ground_ = ground;
  f.rule_ = std::make_shared<const TorusRule>(std::move(r));
  f.provenance_ = std::move(provenance);
  return f;
}

bool BlockSymFunction::is_zero() const {
  switch (ground_.index()) {
    case 0: return terms_.empty();
    case 1: return std::all_of(values_.begin(), values_.end(), [](const Rational& q) { return q == 0; });
    default: return torus_zero_;
  }
}

const PolyTerms& BlockSymFunction::terms() const {
  if (!is_polynomial()) throw std::invalid_argument("terms() needs an exact-line function");
  return terms_;
}

int BlockSymFunction::degree() const {
  int d = 0;
  for (const auto& [k, c] : terms()) d = std::max(d, key_degree(k));
  return d;
}

const std::vector<Rational>& BlockSymFunction::values() const {
  if (!is_table()) throw std::invalid_argument("values() needs a finite-set function");
  return values_;
}

Rational BlockSymFunction::evaluate(const std::vector<std::vector<Rational>>& config) const {
  if (static_cast<int>(config.size()) != shape_.count()) throw std::invalid_argument("evaluate: block count mismatch");
  for (int b = 0; b < shape_.count(); ++b)
    if (static_cast<int>(config[static_cast<std::size_t>(b)].size()) != shape_.size(b)) {
      throw std::invalid_argument("evaluate: block size mismatch");
    }
  if (is_polynomial()) {
    Rational total(0);
    for (const auto& [k, c] : terms_) {
      Rational term = c;
      for (int b = 0; b < shape_.count() && term != 0; ++b) {
        term *= monomial_symmetric_value(segment(k, shape_, b), config[static_cast<std::size_t>(b)]);
      }
      total += term;
    }
    return total;
  }
  if (is_table()) {
    const auto& pts = std::get<FiniteSet>(ground_).points;
    std::vector<std::vector<int>> idx;
    for (const auto& block : config) {
      std::vector<int> ids;
      for (const auto& x : block) {
        auto it = std::find(pts.begin(), pts.end(), x);
        if (it == pts.end()) throw std::invalid_argument("evaluate: value is not a ground point");
        ids.push_back(static_cast<int>(it - pts.begin()));
      }
      idx.push_back(std::move(ids));
    }
    return evaluate_indices(idx);
  }
  throw std::invalid_argument("evaluate: torus functions take complex arguments");
}

Rational BlockSymFunction::evaluate_indices(const std::vector<std::vector<int>>& config) const {
  if (!is_table()) throw std::invalid_argument("evaluate_indices needs a finite-set function");
  const long N = point_count(ground_);
  std::size_t idx = 0;
  std::vector<int> sorted;
  for (int b = 0; b < shape_.count(); ++b) {
    sorted = config[static_cast<std::size_t>(b)];
    if (static_cast<int>(sorted.size()) != shape_.size(b)) throw std::invalid_argument("evaluate_indices: block size mismatch");
    std::sort(sorted.begin(), sorted.end());
    idx = idx * static_cast<std::size_t>(binom(N + shape_.size(b) - 1, shape_.size(b))) + multiset_rank(sorted);
  }
  return values_[idx];
}

Complex BlockSymFunction::evaluate_complex(const std::vector<Complex>& flat) const {
  if (static_cast<int>(flat.size()) != shape_.d()) throw std::invalid_argument("evaluate_complex: arity mismatch");
  if (is_torus()) return (*rule_)(flat);
  if (is_polynomial()) {
    Complex total(0);
    for (const auto& [k, c] : terms_) {
      Complex term(c.get_d());
      for (int b = 0; b < shape_.count(); ++b) {
        term *= monomial_symmetric_value(segment(k, shape_, b), flat.data() + shape_.offset(b));
      }
      total += term;
    }
    return total;
  }
  throw std::invalid_argument("evaluate_complex: finite-set functions take point indices");
}

BlockSymFunction BlockSymFunction::on_points(const FiniteSet& ground) const {
  if (is_table()) {
    if (!(std::get<FiniteSet>(ground_) == ground)) throw std::invalid_argument("on_points: different point set");
    return *this;
  }
  if (!is_polynomial()) throw std::invalid_argument("on_points needs an exact function");
  TableLayout layout(shape_, static_cast<int>(ground.points.size()));
  std::vector<Rational> vals(layout.total);
  layout.for_each([&](std::size_t idx, const std::vector<const std::vector<int>*>& cfg) {
    std::vector<std::vector<Rational>> pts;
    for (const auto* c : cfg) {
      std::vector<Rational> block;
      for (int p : *c) block.push_back(ground.points[static_cast<std::size_t>(p)]);
      pts.push_back(std::move(block));
    }
    vals[idx] = evaluate(pts);
  });
  return table(shape_, ground, std::move(vals));
}

BlockSymFunction BlockSymFunction::with_ground(const TorusSampled& ground) const {
  if (!is_polynomial()) throw std::invalid_argument("with_ground needs a polynomial");
  auto self = *this;
  auto r = rule(shape_, ground, [self](const std::vector<Complex>& z) { return self.evaluate_complex(z); }, str());
  r.torus_zero_ = is_zero();
  return r;
}

BlockSymFunction BlockSymFunction::relabeled(const BlockShape& shape) const {
  if (shape.sizes() != shape_.sizes()) throw std::invalid_argument("relabeled: block sizes differ");
  auto f = *this;
  f.shape_ = shape;
  return f;
}

BlockSymFunction BlockSymFunction::operator+(const BlockSymFunction& other) const {
  require_same(*this, other, "add");
  auto f = *this;
  switch (ground_.index()) {
    case 0:
      f.degree_cap_ = std::max(degree_cap_, other.degree_cap_);
      for (const auto& [k, c] : other.terms_) {
        auto& slot = f.terms_[k];
        slot += c;
        if (slot == 0) f.terms_.erase(k);
      }
      break;
    case 1:
      for (std::size_t a = 0; a < f.values_.size(); ++a) f.values_[a] += other.values_[a];
      break;
    default: {
      if (other.torus_zero_) return f;
      if (torus_zero_) return other;
      auto r1 = rule_, r2 = other.rule_;
      f.rule_ = std::make_shared<const TorusRule>([r1, r2](const std::vector<Complex>& z) { return (*r1)(z) + (*r2)(z); });
      f.provenance_ = "(" + provenance_ + " + " + other.provenance_ + ")";
    }
  }
  return f;
}

BlockSymFunction BlockSymFunction::operator-(const BlockSymFunction& other) const { return *this + (-other); }

BlockSymFunction BlockSymFunction::operator*(const Rational& c) const {
  auto f = *this;
  switch (ground_.index()) {
    case 0:
      if (c == 0) {
        f.terms_.clear();
      } else {
        for (auto& [k, v] : f.terms_) v *= c;
      }
      break;
    case 1:
      for (auto& v : f.values_) v *= c;
      break;
    default:
      return scaled(Complex(c.get_d()));
  }
  return f;
}

BlockSymFunction BlockSymFunction::scaled(const Complex& c) const {
  if (!is_torus()) {
    if (c.imag() != 0) throw std::invalid_argument("complex scaling of an exact function");
    return *this * Rational(c.real());
  }
  auto f = *this;
  if (c == Complex(0)) {
    f.torus_zero_ = true;
    f.rule_ = std::make_shared<const TorusRule>([](const std::vector<Complex>&) { return Complex(0); });
    f.provenance_ = "0";
    return f;
  }
  auto r = rule_;
  f.rule_ = std::make_shared<const TorusRule>([r, c](const std::vector<Complex>& z) { return c * (*r)(z); });
  std::ostringstream os;
  os << "(" << c.real() << "," << c.imag() << ")*" << provenance_;
  f.provenance_ = os.str();
  return f;
}

bool operator==(const BlockSymFunction& a, const BlockSymFunction& b) {
  if (!(a.shape_ == b.shape_) || !(a.ground_ == b.ground_)) return false;
  switch (a.ground_.index()) {
    case 0: return a.terms_ == b.terms_;
    case 1: return a.values_ == b.values_;
    default: throw std::invalid_argument("torus functions have no exact equality; compare samples instead");
  }
}

void BlockSymFunction::check_invariants() const {
  if (is_polynomial()) {
    for (const auto& [k, c] : terms_) {
      if (static_cast<int>(k.size()) != shape_.d()) throw std::logic_error("polynomial key has wrong length");
      if (c == 0) throw std::logic_error("polynomial stores a zero coefficient");
      for (int b = 0; b < shape_.count(); ++b) {
        auto seg = segment(k, shape_, b);
        if (!std::is_sorted(seg.begin(), seg.end(), std::greater<>())) {
          throw std::logic_error("polynomial key not block-sorted: block symmetry broken");
        }
      }
    }
  } else if (is_table()) {
    if (values_.size() != TableLayout(shape_, point_count(ground_)).total) throw std::logic_error("table size is wrong");
  }
}

std::string BlockSymFunction::str() const {
  std::ostringstream os;
  if (is_polynomial()) {
    if (terms_.empty()) return "0";
    bool first = true;
    for (const auto& [k, c] : terms_) {
      os << (first ? "" : " + ") << to_string(c) << "*m[";
      for (int b = 0; b < shape_.count(); ++b) {
        os << (b ? "|" : "");
        auto seg = segment(k, shape_, b);
        for (std::size_t x = 0; x < seg.size(); ++x) os << (x ? "," : "") << int(seg[x]);
      }
      os << ']';
      first = false;
    }
  } else if (is_table()) {
    os << "table[" << values_.size() << "]";
  } else {
    os << provenance_;
  }
  return os.str();
}

// -------------------------------------------------------------- operations

BlockSymFunction multiply(const BlockSymFunction& f, const BlockSymFunction& g) {
  require_same(f, g, "multiply");
  BlockSymFunction r = f;
  switch (f.ground_.index()) {
    case 0: {
      r.terms_.clear();
      r.degree_cap_ = std::max(f.degree_cap_, g.degree_cap_);
      const auto& shape = f.shape_;
      for (const auto& [kf, cf] : f.terms_) {
        for (const auto& [kg, cg] : g.terms_) {
          if (key_degree(kf) + key_degree(kg) > r.degree_cap_) {
            throw BoundExceeded("product degree " + std::to_string(key_degree(kf) + key_degree(kg)) + " exceeds cap " +
                                std::to_string(r.degree_cap_));
          }
          std::vector<const std::vector<std::pair<OrbitKey, Rational>>*> per_block;
          for (int b = 0; b < shape.count(); ++b) {
            per_block.push_back(&orbit_product(segment(kf, shape, b), segment(kg, shape, b)));
          }
          Rational base = cf * cg;
          OrbitKey key(static_cast<std::size_t>(shape.d()));
          auto rec = [&](auto&& self, int b, const Rational& coef) -> void {
            if (b == shape.count()) {
              auto& slot = r.terms_[key];
              slot += coef;
              if (slot == 0) r.terms_.erase(key);
              return;
            }
            for (const auto& [nu, c] : *per_block[static_cast<std::size_t>(b)]) {
              std::copy(nu.begin(), nu.end(), key.begin() + shape.offset(b));
              self(self, b + 1, coef * c);
            }
          };
          rec(rec, 0, base);
        }
      }
      break;
    }
    case 1:
      for (std::size_t a = 0; a < r.values_.size(); ++a) r.values_[a] *= g.values_[a];
      break;
    default: {
      if (f.torus_zero_ || g.torus_zero_) return f.torus_zero_ ? f : g;
      auto r1 = f.rule_, r2 = g.rule_;
      r.rule_ = std::make_shared<const TorusRule>([r1, r2](const std::vector<Complex>& z) { return (*r1)(z) * (*r2)(z); });
      r.provenance_ = "(" + f.provenance_ + " * " + g.provenance_ + ")";
    }
  }
  return r;
}

BlockSymFunction pullback(const BlockSymFunction& f, const MergeMap& m) {
  if (!(f.shape_ == m.target())) throw std::invalid_argument("pullback: function does not live on the merge target");
  const auto& src = m.source();
  const auto& tgt = m.target();
  BlockSymFunction r = f;
  r.shape_ = src;
  switch (f.ground_.index()) {
    case 0: {
      r.terms_.clear();
      for (const auto& [k, c] : f.terms_) {
        std::vector<const std::vector<std::vector<OrbitKey>>*> per_target;
        for (int t = 0; t < tgt.count(); ++t) {
          std::vector<int> sizes;
          for (int s : m.fiber(t)) sizes.push_back(src.size(s));
          per_target.push_back(&distributions(segment(k, tgt, t), sizes));
        }
        OrbitKey key(static_cast<std::size_t>(src.d()));
        auto rec = [&](auto&& self, int t) -> void {
          if (t == tgt.count()) {
            auto& slot = r.terms_[key];
            slot += c;
            if (slot == 0) r.terms_.erase(key);
            return;
          }
          const auto& fib = m.fiber(t);
          for (const auto& parts : *per_target[static_cast<std::size_t>(t)]) {
            for (std::size_t x = 0; x < fib.size(); ++x) {
              std::copy(parts[x].begin(), parts[x].end(), key.begin() + src.offset(fib[x]));
            }
            self(self, t + 1);
          }
        };
        rec(rec, 0);
      }
      break;
    }
    case 1: {
      int N = point_count(f.ground_);
      TableLayout sl(src, N), tl(tgt, N);
      r.values_.assign(sl.total, Rational(0));
      std::vector<int> merged;
      sl.for_each([&](std::size_t idx, const std::vector<const std::vector<int>*>& cfg) {
        std::size_t t_idx = 0;
        for (int t = 0; t < tgt.count(); ++t) {
          merged.clear();
          for (int s : m.fiber(t)) merged.insert(merged.end(), cfg[static_cast<std::size_t>(s)]->begin(), cfg[static_cast<std::size_t>(s)]->end());
          std::sort(merged.begin(), merged.end());
          t_idx += multiset_rank(merged) * tl.strides[static_cast<std::size_t>(t)];
        }
        r.values_[idx] = f.values_[t_idx];
      });
      break;
    }
    default: {
      if (f.torus_zero_) break;
      // target flat = per target block, concatenation of its fiber's source blocks
      std::vector<int> order;
      for (int t = 0; t < tgt.count(); ++t)
        for (int s : m.fiber(t))
          for (int x = 0; x < src.size(s); ++x) order.push_back(src.offset(s) + x);
      auto rule = f.rule_;
      r.rule_ = std::make_shared<const TorusRule>([rule, order](const std::vector<Complex>& z) {
        std::vector<Complex> w(order.size());
        for (std::size_t a = 0; a < order.size(); ++a) w[a] = z[static_cast<std::size_t>(order[a])];
        return (*rule)(w);
      });
      r.provenance_ = "pullback(" + f.provenance_ + ")";
    }
  }
  return r;
}

BlockSymFunction transfer(const BlockSymFunction& f, const MergeMap& m) {
  if (!(f.shape_ == m.source())) throw std::invalid_argument("transfer: function does not live on the merge source");
  const auto& src = m.source();
  const auto& tgt = m.target();
  BlockSymFunction r = f;
  r.shape_ = tgt;
  switch (f.ground_.index()) {
    case 0: {
      r.terms_.clear();
      for (const auto& [k, c] : f.terms_) {
        OrbitKey key;
        Rational coef = c;
        for (int t = 0; t < tgt.count(); ++t) {
          OrbitKey uni;
          for (int s : m.fiber(t)) {
            auto seg = segment(k, src, s);
            coef /= multiplicity_factorials(seg);
            uni.insert(uni.end(), seg.begin(), seg.end());
          }
          uni = sorted_desc(std::move(uni));
          coef *= multiplicity_factorials(uni);
          key.insert(key.end(), uni.begin(), uni.end());
        }
        auto& slot = r.terms_[key];
        slot += coef;
        if (slot == 0) r.terms_.erase(key);
      }
      break;
    }
    case 1: {
      int N = point_count(f.ground_);
      TableLayout sl(src, N), tl(tgt, N);
      r.values_.assign(tl.total, Rational(0));
      std::vector<int> merged;
      sl.for_each([&](std::size_t idx, const std::vector<const std::vector<int>*>& cfg) {
        if (f.values_[idx] == 0) return;
        std::size_t t_idx = 0;
        Rational weight(1);
        bool trivial = true;
        for (int t = 0; t < tgt.count(); ++t) {
          merged.clear();
          for (int s : m.fiber(t)) {
            const auto& part = *cfg[static_cast<std::size_t>(s)];
            merged.insert(merged.end(), part.begin(), part.end());
            for (int mlt : multiplicities(part))
              if (mlt > 1) {
                weight /= factorial(mlt);
                trivial = false;
              }
          }
          std::sort(merged.begin(), merged.end());
          for (int mlt : multiplicities(merged))
            if (mlt > 1) {
              weight *= factorial(mlt);
              trivial = false;
            }
          t_idx += multiset_rank(merged) * tl.strides[static_cast<std::size_t>(t)];
        }
        if (trivial) {
          r.values_[t_idx] += f.values_[idx];
        } else {
          r.values_[t_idx] += f.values_[idx] * weight;
        }
      });
      break;
    }
    default: {
      if (f.torus_zero_) break;
      // enumerate assignments of target positions to fiber blocks, per target block
      struct Fiber {
        std::vector<int> sources;
        int offset;
        int size;
      };
      std::vector<Fiber> fibers;
      for (int t = 0; t < tgt.count(); ++t) fibers.push_back({m.fiber(t), tgt.offset(t), tgt.size(t)});
      std::vector<int> src_offsets, src_sizes;
      for (int s = 0; s < src.count(); ++s) {
        src_offsets.push_back(src.offset(s));
        src_sizes.push_back(src.size(s));
      }
      int d = src.d();
      auto rule = f.rule_;
      r.rule_ = std::make_shared<const TorusRule>([rule, fibers, src_offsets, src_sizes, d](const std::vector<Complex>& z) {
        std::vector<Complex> w(static_cast<std::size_t>(d));
        Complex total(0);
        // label[pos] = which source block the target position goes to
        std::vector<int> labels(static_cast<std::size_t>(d));
        auto rec = [&](auto&& self, std::size_t fi) -> void {
          if (fi == fibers.size()) {
            total += (*rule)(w);
            return;
          }
          const auto& fb = fibers[fi];
          std::vector<int> lab;
          for (int s : fb.sources)
            for (int x = 0; x < src_sizes[static_cast<std::size_t>(s)]; ++x) lab.push_back(s);
          std::sort(lab.begin(), lab.end());
          do {
            std::vector<int> fill(src_offsets.size(), 0);
            for (int p = 0; p < fb.size; ++p) {
              int s = lab[static_cast<std::size_t>(p)];
              w[static_cast<std::size_t>(src_offsets[static_cast<std::size_t>(s)] + fill[static_cast<std::size_t>(s)]++)] =
                  z[static_cast<std::size_t>(fb.offset + p)];
            }
            self(self, fi + 1);
          } while (std::next_permutation(lab.begin(), lab.end()));
        };
        rec(rec, 0);
        return total;
      });
      r.provenance_ = "transfer(" + f.provenance_ + ")";
    }
  }
  return r;
}

BlockSymFunction embed(const BlockSymFunction& f, const BlockShape& shape, const std::vector<int>& positions) {
  if (static_cast<int>(positions.size()) != f.shape_.count()) throw std::invalid_argument("embed: position count mismatch");
  std::vector<int> owner(static_cast<std::size_t>(shape.count()), -1);
  for (std::size_t b = 0; b < positions.size(); ++b) {
    int p = positions[b];
    if (p < 0 || p >= shape.count() || owner[static_cast<std::size_t>(p)] >= 0) {
      throw std::invalid_argument("embed: bad block position");
    }
    if (shape.size(p) != f.shape_.size(static_cast<int>(b))) throw std::invalid_argument("embed: block size mismatch");
    owner[static_cast<std::size_t>(p)] = static_cast<int>(b);
  }
  BlockSymFunction r = f;
  r.shape_ = shape;
  switch (f.ground_.index()) {
    case 0: {
      r.terms_.clear();
      for (const auto& [k, c] : f.terms_) {
        OrbitKey key(static_cast<std::size_t>(shape.d()), 0);
        for (std::size_t b = 0; b < positions.size(); ++b) {
          auto seg = segment(k, f.shape_, static_cast<int>(b));
          std::copy(seg.begin(), seg.end(), key.begin() + shape.offset(positions[b]));
        }
        r.terms_.emplace(std::move(key), c);
      }
      break;
    }
    case 1: {
      int N = point_count(f.ground_);
      TableLayout big(shape, N), small(f.shape_, N);
      r.values_.assign(big.total, Rational(0));
      big.for_each([&](std::size_t idx, const std::vector<const std::vector<int>*>& cfg) {
        std::size_t s_idx = 0;
        for (std::size_t b = 0; b < positions.size(); ++b) {
          s_idx += multiset_rank(*cfg[static_cast<std::size_t>(positions[b])]) * small.strides[b];
        }
        r.values_[idx] = f.values_[s_idx];
      });
      break;
    }
    default: {
      if (f.torus_zero_) break;
      std::vector<int> order;
      for (std::size_t b = 0; b < positions.size(); ++b)
        for (int x = 0; x < shape.size(positions[b]); ++x) order.push_back(shape.offset(positions[b]) + x);
      auto rule = f.rule_;
      r.rule_ = std::make_shared<const TorusRule>([rule, order](const std::vector<Complex>& z) {
        std::vector<Complex> w(order.size());
        for (std::size_t a = 0; a < order.size(); ++a) w[a] = z[static_cast<std::size_t>(order[a])];
        return (*rule)(w);
      });
    }
  }
  return r;
}

BlockSymFunction lift_pij(const BlockSymFunction& f1, const IntMatrix& a, int i, int j) {
  if (f1.shape().count() != 1) throw std::invalid_argument("lift_pij: f1 must live on a single block");
  if (f1.shape().size(0) != a.at(i, j)) {
    throw std::invalid_argument("lift_pij: block (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                ") has size " + std::to_string(a.at(i, j)) + ", f1 has " +
                                std::to_string(f1.shape().size(0)));
  }
  return embed(f1, BlockShape::of_matrix(a), {i * a.n() + j});
}

BlockSymFunction lift_pii(const BlockSymFunction& f1, const Composition& v, int i) {
  if (f1.shape().count() != 1 || f1.shape().size(0) != 1) throw std::invalid_argument("lift_pii: f1 must be univariate");
  auto target = BlockShape::of_composition(v);
  if (v[i] == 0) return BlockSymFunction::zero(target, f1.ground());
  // split block i into a marked point and the rest, extend, push back
  std::vector<Block> blocks;
  std::vector<int> target_of;
  int marked = -1;
  for (int r = 0; r < v.n(); ++r) {
    if (r == i) {
      marked = static_cast<int>(blocks.size());
      blocks.push_back({BlockLabel::of(r, 0), 1});
      blocks.push_back({BlockLabel::of(r, 1), v[r] - 1});
      target_of.push_back(r);
      target_of.push_back(r);
    } else {
      blocks.push_back({BlockLabel::of(r, 0), v[r]});
      target_of.push_back(r);
    }
  }
  BlockShape split(std::move(blocks));
  auto extended = embed(f1, split, {marked});
  return transfer(extended, MergeMap(split, target, target_of));
}

}  // namespace convalg
