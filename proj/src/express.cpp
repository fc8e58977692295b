// Generation of Delta(C, h) by tau-images, by induction on l(C).

#include <algorithm>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>

#include "convalg/convolution.hpp"

namespace convalg {

// ------------------------------------------------------------ expr nodes

ExprPtr GeneratorExpr::unit() {
  auto e = std::make_shared<GeneratorExpr>();
  e->kind_ = Kind::Unit;
  return e;
}

ExprPtr GeneratorExpr::tau_leaf(int i, int j, int k) {
  auto e = std::make_shared<GeneratorExpr>();
  e->kind_ = Kind::Tau;
  e->i_ = i;
  e->j_ = j;
  e->k_ = k;
  return e;
}

ExprPtr GeneratorExpr::sum(std::vector<ExprPtr> parts) {
  auto e = std::make_shared<GeneratorExpr>();
  e->kind_ = Kind::Sum;
  e->children_ = std::move(parts);
  return e;
}

ExprPtr GeneratorExpr::product(std::vector<ExprPtr> factors) {
  if (factors.size() == 1) return factors.front();
  auto e = std::make_shared<GeneratorExpr>();
  e->kind_ = Kind::Product;
  e->children_ = std::move(factors);
  return e;
}

ExprPtr GeneratorExpr::scale(const Rational& c, ExprPtr inner) {
  if (c == 1) return inner;
  auto e = std::make_shared<GeneratorExpr>();
  e->kind_ = Kind::Scale;
  e->c_ = c;
  e->children_ = {std::move(inner)};
  return e;
}

std::size_t GeneratorExpr::node_count() const {
  std::set<const GeneratorExpr*> seen;
  std::function<void(const GeneratorExpr*)> walk = [&](const GeneratorExpr* e) {
    if (!seen.insert(e).second) return;
    for (const auto& c : e->children_) walk(c.get());
  };
  walk(this);
  return seen.size();
}

std::size_t GeneratorExpr::height() const {
  std::unordered_map<const GeneratorExpr*, std::size_t> memo;
  std::function<std::size_t(const GeneratorExpr*)> h = [&](const GeneratorExpr* e) -> std::size_t {
    if (auto it = memo.find(e); it != memo.end()) return it->second;
    std::size_t best = 0;
    for (const auto& c : e->children_) best = std::max(best, 1 + h(c.get()));
    return memo[e] = best;
  };
  return h(this);
}

std::string GeneratorExpr::str() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Unit: os << "1"; break;
    case Kind::Tau: os << "tau(E" << i_ + 1 << j_ + 1 << "*x^" << k_ << ")"; break;
    case Kind::Scale: os << to_string(c_) << "*" << children_[0]->str(); break;
    case Kind::Sum:
    case Kind::Product: {
      os << '(';
      for (std::size_t a = 0; a < children_.size(); ++a) {
        os << (a ? (kind_ == Kind::Sum ? " + " : " . ") : "") << children_[a]->str();
      }
      os << ')';
    }
  }
  return os.str();
}

ConvOperator evaluate_expr(const ExprPtr& root, int n, int d, const GroundSpace& ground) {
  std::unordered_map<const GeneratorExpr*, ConvOperator> memo;
  std::map<int, BlockSymFunction> powers;
  std::function<const ConvOperator&(const GeneratorExpr*)> eval = [&](const GeneratorExpr* e) -> const ConvOperator& {
    if (auto it = memo.find(e); it != memo.end()) return it->second;
    ConvOperator r(ground);
    switch (e->kind()) {
      case GeneratorExpr::Kind::Unit: r = ConvOperator::identity(n, d, ground); break;
      case GeneratorExpr::Kind::Tau: {
        auto pit = powers.find(e->power());
        if (pit == powers.end()) pit = powers.emplace(e->power(), power_function(e->power(), ground)).first;
        r = tau(e->i(), e->j(), pit->second, n, d);
        break;
      }
      case GeneratorExpr::Kind::Scale: r = eval(e->children()[0].get()) * e->coefficient(); break;
      case GeneratorExpr::Kind::Sum:
        for (const auto& c : e->children()) r = r + eval(c.get());
        break;
      case GeneratorExpr::Kind::Product: {
        r = eval(e->children()[0].get());
        for (std::size_t a = 1; a < e->children().size() && !r.empty(); ++a) r = compose(r, eval(e->children()[a].get()));
        break;
      }
    }
    return memo.emplace(e, std::move(r)).first->second;
  };
  return eval(root.get());
}

OperatorTable evaluate_expr_table(const ExprPtr& root, int n, int d, const FiniteSet& ground) {
  std::unordered_map<const GeneratorExpr*, OperatorTable> memo;
  const int N = static_cast<int>(ground.points.size());
  std::function<const OperatorTable&(const GeneratorExpr*)> eval = [&](const GeneratorExpr* e) -> const OperatorTable& {
    if (auto it = memo.find(e); it != memo.end()) return it->second;
    OperatorTable r;
    switch (e->kind()) {
      case GeneratorExpr::Kind::Unit: r = identity_table(n, d, N); break;
      case GeneratorExpr::Kind::Tau:
        r = tensor_action_table(e->i(), e->j(), power_function(e->power(), ground), n, d);
        break;
      case GeneratorExpr::Kind::Scale: r = eval(e->children()[0].get()) * e->coefficient(); break;
      case GeneratorExpr::Kind::Sum:
        for (const auto& c : e->children()) r = r + eval(c.get());
        break;
      case GeneratorExpr::Kind::Product: {
        r = eval(e->children()[0].get());
        for (std::size_t a = 1; a < e->children().size() && !r.entries.empty(); ++a) {
          r = table_product(r, eval(e->children()[a].get()));
        }
        break;
      }
    }
    return memo.emplace(e, std::move(r)).first->second;
  };
  return eval(root.get());
}

// ----------------------------------------------- symmetric function tools

namespace {

using Partition = std::vector<int>;  // descending, positive parts

OrbitKey zeros(int m) { return OrbitKey(static_cast<std::size_t>(m), 0); }

// p_mu in m variables, expanded in monomial symmetric functions.
const PolyTerms& power_sum_product(int m, const Partition& mu) {
  static std::mutex lock;
  static std::map<std::pair<int, Partition>, PolyTerms> cache;
  {
    std::lock_guard g(lock);
    if (auto it = cache.find({m, mu}); it != cache.end()) return it->second;
  }
  PolyTerms acc{{zeros(m), Rational(1)}};
  if (m == 0 && !mu.empty()) acc.clear();  // power sums of no variables vanish
  for (int k : mu) {
    if (m == 0) break;
    OrbitKey pk = zeros(m);
    pk[0] = static_cast<std::uint8_t>(k);
    PolyTerms next;
    for (const auto& [lam, c] : acc)
      for (const auto& [nu, w] : orbit_product(lam, pk)) {
        auto& slot = next[nu];
        slot += c * w;
        if (slot == 0) next.erase(nu);
      }
    acc = std::move(next);
  }
  std::lock_guard g(lock);
  return cache.emplace(std::make_pair(m, mu), std::move(acc)).first->second;
}

Partition partition_of(const OrbitKey& key) {
  Partition p;
  for (auto e : key)
    if (e > 0) p.push_back(e);
  return p;
}

// m_lambda = sum_mu c_mu p_mu, in lambda.size() variables.
const std::map<Partition, Rational>& monomial_to_power_sums(const OrbitKey& lambda) {
  static std::mutex lock;
  static std::map<OrbitKey, std::map<Partition, Rational>> cache;
  {
    std::lock_guard g(lock);
    if (auto it = cache.find(lambda); it != cache.end()) return it->second;
  }
  const int m = static_cast<int>(lambda.size());
  std::map<Partition, Rational> out;
  PolyTerms rest{{lambda, Rational(1)}};
  // p_mu only involves m_nu with nu a coarsening of mu, lexicographically >= mu:
  // peeling the smallest key first terminates.
  while (!rest.empty()) {
    auto [lam0, a] = *rest.begin();
    Partition mu = partition_of(lam0);
    const auto& expansion = power_sum_product(m, mu);
    Rational kappa = expansion.at(lam0);
    Rational coef = a / kappa;
    out[mu] += coef;
    for (const auto& [nu, w] : expansion) {
      auto& slot = rest[nu];
      slot -= coef * w;
      if (slot == 0) rest.erase(nu);
    }
    if (rest.count(lam0)) throw std::logic_error("power-sum conversion failed to cancel the leading key");
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  std::lock_guard g(lock);
  return cache.emplace(lambda, std::move(out)).first->second;
}

Partition merged(const Partition& a, const Partition& b) {
  Partition r = a;
  r.insert(r.end(), b.begin(), b.end());
  std::sort(r.begin(), r.end(), std::greater<>());
  return r;
}

// m_beta(y) through the union U = x + y:
// sum of c * p_mu(U) * p_nu(x), substituting p_k(y) = p_k(U) - p_k(x).
std::map<std::pair<Partition, Partition>, Rational> rewrite_through_union(const OrbitKey& beta) {
  std::map<std::pair<Partition, Partition>, Rational> out;
  for (const auto& [mu, c] : monomial_to_power_sums(beta)) {
    const std::size_t len = mu.size();
    for (std::uint32_t pick = 0; pick < (1u << len); ++pick) {
      Partition u, x;
      for (std::size_t t = 0; t < len; ++t) ((pick >> t) & 1u ? x : u).push_back(mu[t]);
      Rational sign = (x.size() % 2) ? Rational(-1) : Rational(1);
      out[{u, x}] += c * sign;
    }
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

// m_alpha(x) * p_nu(x) in the monomial basis of |alpha| variables.
PolyTerms times_power_sums(const OrbitKey& alpha, const Partition& nu) {
  PolyTerms out;
  for (const auto& [lam, c] : power_sum_product(static_cast<int>(alpha.size()), nu))
    for (const auto& [mu, w] : orbit_product(alpha, lam)) {
      auto& slot = out[mu];
      slot += c * w;
      if (slot == 0) out.erase(mu);
    }
  return out;
}

OrbitKey segment_of(const OrbitKey& key, const BlockShape& shape, int b) {
  auto first = key.begin() + shape.offset(b);
  return OrbitKey(first, first + shape.size(b));
}

// ------------------------------------------------------------ the algorithm

class Expresser {
 public:
  Expresser(int n, int d) : n_(n), d_(d) {}

  std::pair<ExprPtr, int> run(const IntMatrix& c, const BlockSymFunction& h) {
    if (++steps_ > kExpressBudget) throw BoundExceeded("express_in_generators: iteration budget exhausted");
    auto key = std::make_pair(c, h.terms());
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::pair<ExprPtr, int> result;
    if (h.is_zero()) {
      result = {GeneratorExpr::sum({}), 0};
    } else if (c.is_diagonal()) {
      result = {diagonal(c.row_sums(), diagonal_to_composition(c, h)), 0};
    } else if (auto ab = single_adjacent_entry(c)) {
      result = {adjacent(c, ab->first, ab->second, h), 1};
    } else {
      result = induction_step(c, h);
    }
    memo_.emplace(key, result);
    return result;
  }

  long steps() const { return steps_; }

 private:
  ExprPtr tau_node(int i, int j, int k) {
    auto key = std::make_tuple(i, j, k);
    if (auto it = leaves_.find(key); it != leaves_.end()) return it->second;
    return leaves_[key] = GeneratorExpr::tau_leaf(i, j, k);
  }

  // Delta(diag v, 1) = prod_i prod_{k != v_i} (tau(E_ii * 1) - k) / (v_i - k).
  ExprPtr projector(const Composition& v) {
    if (auto it = projectors_.find(v); it != projectors_.end()) return it->second;
    std::vector<ExprPtr> factors;
    for (int i = 0; i < n_; ++i) {
      for (int k = 0; k <= d_; ++k) {
        if (k == v[i]) continue;
        auto shifted = GeneratorExpr::sum({tau_node(i, i, 0), GeneratorExpr::scale(Rational(-k), unit())});
        factors.push_back(GeneratorExpr::scale(Rational(1) / Rational(v[i] - k), shifted));
      }
    }
    ExprPtr p = factors.empty() ? unit() : GeneratorExpr::product(std::move(factors));
    return projectors_[v] = p;
  }

  ExprPtr unit() {
    if (!unit_) unit_ = GeneratorExpr::unit();
    return unit_;
  }

  // Delta(diag v, g) for g on X^(v): power sums of each block come from tau(E_ii * x^k).
  ExprPtr diagonal(const Composition& v, const BlockSymFunction& g) {
    auto shape = BlockShape::of_composition(v);
    std::vector<ExprPtr> parts;
    for (const auto& [key, coef] : g.terms()) {
      std::vector<std::vector<std::pair<Partition, Rational>>> per_block;
      for (int i = 0; i < n_; ++i) {
        const auto& ps = monomial_to_power_sums(segment_of(key, shape, i));
        per_block.emplace_back(ps.begin(), ps.end());
      }
      std::vector<ExprPtr> factors{projector(v)};
      auto rec = [&](auto&& self, int i, Rational c) -> void {
        if (i == n_) {
          parts.push_back(GeneratorExpr::scale(c, GeneratorExpr::product(factors)));
          return;
        }
        for (const auto& [mu, w] : per_block[static_cast<std::size_t>(i)]) {
          for (int k : mu) factors.push_back(tau_node(i, i, k));
          self(self, i + 1, c * w);
          for (std::size_t t = 0; t < mu.size(); ++t) factors.pop_back();
        }
      };
      rec(rec, 0, coef);
    }
    return GeneratorExpr::sum(std::move(parts));
  }

  static std::optional<std::pair<int, int>> single_adjacent_entry(const IntMatrix& c) {
    std::optional<std::pair<int, int>> found;
    for (int i = 0; i < c.n(); ++i)
      for (int j = 0; j < c.n(); ++j) {
        if (i == j || c.at(i, j) == 0) continue;
        if (found || std::abs(i - j) != 1) return std::nullopt;
        found = std::make_pair(i, j);
      }
    return found;
  }

  // C = D + c E_ab with D diagonal and |a - b| = 1.
  // Rows see x + z_aa, columns see x + z_bb; Delta(C, m_lambda(x)) is a product of
  // c copies of tau(E_ab * x^k) after the source projector.
  ExprPtr adjacent(const IntMatrix& cm, int a, int b, const BlockSymFunction& h) {
    const int c = cm.at(a, b);
    const auto shape = BlockShape::of_matrix(cm);
    const auto v1 = cm.row_sums(), v2 = cm.col_sums();
    const auto s1 = BlockShape::of_composition(v1), s2 = BlockShape::of_composition(v2);
    const int xb = a * n_ + b, zaa = a * n_ + a, zbb = b * n_ + b;
    // (lambda, G2 key) -> G1 terms
    std::map<std::pair<OrbitKey, OrbitKey>, PolyTerms> pieces;
    for (const auto& [key, coef] : h.terms()) {
      auto alpha = segment_of(key, shape, xb);
      auto rows = rewrite_through_union(segment_of(key, shape, zaa));
      auto cols = rewrite_through_union(segment_of(key, shape, zbb));
      for (const auto& [rc, w1] : rows) {
        for (const auto& [cc, w2] : cols) {
          auto xs = times_power_sums(alpha, merged(rc.second, cc.second));
          const auto& rpoly = power_sum_product(v1[a], rc.first);
          const auto& cpoly = power_sum_product(v2[b], cc.first);
          for (const auto& [lam, wx] : xs)
            for (const auto& [rk, wr] : rpoly)
              for (const auto& [ck, wc] : cpoly) {
                OrbitKey g1;
                for (int i = 0; i < n_; ++i) {
                  OrbitKey seg = i == a ? rk : i == b ? zeros(v1[i]) : segment_of(key, shape, i * n_ + i);
                  g1.insert(g1.end(), seg.begin(), seg.end());
                }
                OrbitKey g2;
                for (int i = 0; i < n_; ++i) {
                  OrbitKey seg = i == b ? ck : zeros(v2[i]);
                  g2.insert(g2.end(), seg.begin(), seg.end());
                }
                auto& slot = pieces[{lam, g2}][g1];
                slot += coef * w1 * w2 * wx * wr * wc;
                if (slot == 0) pieces[{lam, g2}].erase(g1);
              }
        }
      }
    }
    std::vector<ExprPtr> parts;
    for (const auto& [lk, g1terms] : pieces) {
      if (g1terms.empty()) continue;
      const auto& [lam, g2key] = lk;
      std::vector<ExprPtr> moves{projector(v1)};
      Rational kappa(1);
      for (std::size_t t = 0; t < lam.size();) {
        std::size_t u = t;
        while (u < lam.size() && lam[u] == lam[t]) ++u;
        kappa *= factorial(static_cast<int>(u - t));
        t = u;
      }
      for (auto e : lam) moves.push_back(tau_node(a, b, e));
      auto middle = GeneratorExpr::scale(Rational(1) / kappa, GeneratorExpr::product(std::move(moves)));
      auto left = diagonal(v1, BlockSymFunction::polynomial(s1, g1terms, kDefaultDegreeCap * 4));
      auto right = diagonal(v2, BlockSymFunction::polynomial(s2, {{g2key, Rational(1)}}, kDefaultDegreeCap * 4));
      parts.push_back(GeneratorExpr::product({left, middle, right}));
    }
    (void)c;
    return GeneratorExpr::sum(std::move(parts));
  }

  std::pair<ExprPtr, int> induction_step(const IntMatrix& cm, const BlockSymFunction& h) {
    // (p, q): the right-lexicographically greatest upper entry; otherwise the mirror rule.
    int p = -1, q = -1;
    bool upper = false;
    for (int j = n_ - 1; j >= 0 && p < 0; --j)
      for (int i = j - 1; i >= 0; --i)
        if (cm.at(i, j) != 0) {
          p = i;
          q = j;
          upper = true;
          break;
        }
    if (!upper) {
      for (int j = 0; j < n_ && p < 0; ++j)
        for (int i = j + 1; i < n_; ++i)
          if (cm.at(i, j) != 0) {
            p = i;
            q = j;
            break;
          }
    }
    const int c = cm.at(p, q);
    const int r = upper ? p + 1 : p - 1;  // row receiving the mass in B
    IntMatrix b = cm;
    b.add(p, q, -c);
    b.add(r, q, c);
    IntMatrix a = IntMatrix::diagonal(cm.row_sums());
    a.add(p, p, -c);
    a.add(p, r, c);
    if (a.col_sums() != b.row_sums()) throw std::logic_error("induction step: A and B are not composable");

    const auto shape = BlockShape::of_matrix(cm);
    const auto bshape = BlockShape::of_matrix(b);
    const int xb = p * n_ + q, yb = r * n_ + q;
    const int usize = b.at(r, q);
    // h = sum_lambda m_lambda(x) * G_lambda(x + y, rest)
    std::map<OrbitKey, PolyTerms> pieces;
    for (const auto& [key, coef] : h.terms()) {
      auto alpha = segment_of(key, shape, xb);
      for (const auto& [ux, w] : rewrite_through_union(segment_of(key, shape, yb))) {
        auto xs = times_power_sums(alpha, ux.second);
        const auto& upoly = power_sum_product(usize, ux.first);
        for (const auto& [lam, wx] : xs)
          for (const auto& [uk, wu] : upoly) {
            OrbitKey g;
            for (int blk = 0; blk < n_ * n_; ++blk) {
              if (blk == yb) {
                g.insert(g.end(), uk.begin(), uk.end());
              } else if (blk != xb) {
                auto seg = segment_of(key, shape, blk);
                g.insert(g.end(), seg.begin(), seg.end());
              }
            }
            auto& slot = pieces[lam][g];
            slot += coef * w * wx * wu;
            if (slot == 0) pieces[lam].erase(g);
          }
      }
    }
    const int cap = std::max(h.degree_cap(), kDefaultDegreeCap);
    ConvOperator product(ExactLine{});
    std::vector<ExprPtr> parts;
    int depth = 0;
    for (const auto& [lam, gterms] : pieces) {
      if (gterms.empty()) continue;
      auto f1 = BlockSymFunction::polynomial(BlockShape::single(c), {{lam, Rational(1)}}, cap);
      auto fa = lift_pij(f1, a, p, r);
      auto gb = BlockSymFunction::polynomial(bshape, gterms, cap);
      product = product + compose(ConvOperator::term(a, fa), ConvOperator::term(b, gb));
      auto [ea, da] = run(a, fa);
      auto [eb, db] = run(b, gb);
      depth = std::max({depth, da, db});
      parts.push_back(GeneratorExpr::product({ea, eb}));
    }
    const auto* lead = product.find(cm);
    if (!lead || !(*lead == h)) {
      throw std::logic_error("induction step: leading coefficient differs from h at C = " + cm.str());
    }
    auto remainder = product - ConvOperator::term(cm, h);
    const long lc = length_statistic(cm);
    std::vector<ExprPtr> lower;
    for (const auto& [c2, h2] : remainder.terms()) {
      if (c2 == cm || !preceq(c2, cm) || length_statistic(c2) >= lc) {
        throw std::logic_error("induction step: remainder term " + c2.str() + " is not strictly below " + cm.str());
      }
      auto [e2, d2] = run(c2, h2);
      depth = std::max(depth, d2);
      lower.push_back(e2);
    }
    if (!lower.empty()) parts.push_back(GeneratorExpr::scale(Rational(-1), GeneratorExpr::sum(std::move(lower))));
    return {GeneratorExpr::sum(std::move(parts)), depth + 1};
  }

  int n_, d_;
  long steps_ = 0;
  ExprPtr unit_;
  std::map<std::tuple<int, int, int>, ExprPtr> leaves_;
  std::map<Composition, ExprPtr> projectors_;
  std::map<std::pair<IntMatrix, PolyTerms>, std::pair<ExprPtr, int>> memo_;
};

}  // namespace

Expression express_in_generators(const IntMatrix& c, const BlockSymFunction& h) {
  if (!h.is_polynomial()) throw std::invalid_argument("express_in_generators needs an exact-line function");
  if (!(h.shape() == BlockShape::of_matrix(c))) throw std::invalid_argument("express_in_generators: h does not live on X^(C)");
  Expresser ex(c.n(), c.total());
  auto [expr, depth] = ex.run(c, h);
  return {expr, depth, length_statistic(c), ex.steps()};
}

}  // namespace convalg
