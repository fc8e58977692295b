#include "convalg/convolution.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace convalg {

// ----------------------------------------------------------- ConvOperator

ConvOperator::ConvOperator(GroundSpace ground) : ground_(std::move(ground)) { validate_ground(ground_); }

ConvOperator ConvOperator::term(const IntMatrix& a, const BlockSymFunction& f) {
  ConvOperator op(f.ground());
  op.add_term(a, f);
  return op;
}

ConvOperator ConvOperator::identity(int n, int d, const GroundSpace& ground) {
  ConvOperator op(ground);
  for (const auto& v : enumerate_compositions(n, d)) {
    auto a = IntMatrix::diagonal(v);
    op.add_term(a, BlockSymFunction::constant(BlockShape::of_matrix(a), ground, Rational(1)));
  }
  return op;
}

std::vector<IntMatrix> ConvOperator::support() const {
  std::vector<IntMatrix> out;
  for (const auto& [a, f] : terms_) out.push_back(a);
  return out;
}

const BlockSymFunction* ConvOperator::find(const IntMatrix& a) const {
  auto it = terms_.find(a);
  return it == terms_.end() ? nullptr : &it->second;
}

void ConvOperator::add_term(const IntMatrix& a, const BlockSymFunction& f) {
  if (!(f.ground() == ground_)) throw GroundMismatch("operator term over a different ground");
  if (!(f.shape() == BlockShape::of_matrix(a))) {
    throw std::invalid_argument("term function shape " + f.shape().str() + " does not match matrix " + a.str());
  }
  auto it = terms_.find(a);
  if (it == terms_.end()) {
    if (!f.is_zero()) terms_.emplace(a, f);
    return;
  }
  it->second = it->second + f;
  if (it->second.is_zero()) terms_.erase(it);
}

ConvOperator ConvOperator::operator+(const ConvOperator& other) const {
  if (!(ground_ == other.ground_)) throw GroundMismatch("adding operators over different grounds");
  auto r = *this;
  for (const auto& [a, f] : other.terms_) r.add_term(a, f);
  return r;
}

ConvOperator ConvOperator::operator-(const ConvOperator& other) const { return *this + other * Rational(-1); }

ConvOperator ConvOperator::operator*(const Rational& c) const {
  ConvOperator r(ground_);
  for (const auto& [a, f] : terms_) r.add_term(a, f * c);
  return r;
}

ConvOperator ConvOperator::scaled(const Complex& c) const {
  ConvOperator r(ground_);
  for (const auto& [a, f] : terms_) r.add_term(a, f.scaled(c));
  return r;
}

bool operator==(const ConvOperator& a, const ConvOperator& b) {
  if (!(a.ground_ == b.ground_) || a.terms_.size() != b.terms_.size()) return false;
  for (const auto& [m, f] : a.terms_) {
    const auto* g = b.find(m);
    if (!g || !(f == *g)) return false;
  }
  return true;
}

std::string ConvOperator::str() const {
  std::ostringstream os;
  if (terms_.empty()) return "0";
  bool first = true;
  for (const auto& [a, f] : terms_) {
    os << (first ? "" : " + ") << "D(" << a.str() << ", " << f.str() << ")";
    first = false;
  }
  return os.str();
}

// -------------------------------------------------------------- compose

BlockSymFunction diagonal_to_composition(const IntMatrix& diag, const BlockSymFunction& f) {
  if (!diag.is_diagonal()) throw std::invalid_argument("diagonal_to_composition: matrix is not diagonal");
  return transfer(f, MergeMap::rows(diag));
}

BlockSymFunction composition_to_diagonal(const Composition& v, const BlockSymFunction& f) {
  return pullback(f, MergeMap::rows(IntMatrix::diagonal(v)));
}

ConvOperator compose_diagonal_left(const IntMatrix& diag, const BlockSymFunction& f, const IntMatrix& b,
                                   const BlockSymFunction& g) {
  if (!diag.is_diagonal()) throw std::invalid_argument("compose_diagonal_left: first matrix is not diagonal");
  ConvOperator r(f.ground());
  if (diag.n() != b.n() || diag.col_sums() != b.row_sums()) return r;
  auto fv = diagonal_to_composition(diag, f);
  r.add_term(b, multiply(g, pullback(fv, MergeMap::rows(b))));
  return r;
}

ConvOperator compose_diagonal_right(const IntMatrix& b, const BlockSymFunction& g, const IntMatrix& diag,
                                    const BlockSymFunction& f) {
  if (!diag.is_diagonal()) throw std::invalid_argument("compose_diagonal_right: second matrix is not diagonal");
  ConvOperator r(g.ground());
  if (diag.n() != b.n() || diag.row_sums() != b.col_sums()) return r;
  auto fw = diagonal_to_composition(diag, f);
  r.add_term(b, multiply(g, pullback(fw, MergeMap::cols(b))));
  return r;
}

namespace {

void compose_pair(ConvOperator& out, const IntMatrix& a, const BlockSymFunction& f, const IntMatrix& b,
                  const BlockSymFunction& g, bool shortcuts) {
  if (a.n() != b.n() || a.col_sums() != b.row_sums()) return;
  if (shortcuts && a.is_diagonal()) {
    out = out + compose_diagonal_left(a, f, b, g);
    return;
  }
  if (shortcuts && b.is_diagonal()) {
    out = out + compose_diagonal_right(a, f, b, g);
    return;
  }
  for (const auto& t : transfer_arrays(a, b)) {
    auto lifted = multiply(pullback(f, MergeMap::pr12(t)), pullback(g, MergeMap::pr23(t)));
    out.add_term(t.marginal13(), transfer(lifted, MergeMap::pr13(t)));
  }
}

ConvOperator compose_impl(const ConvOperator& op1, const ConvOperator& op2, bool shortcuts) {
  if (!(op1.ground() == op2.ground())) {
    throw GroundMismatch("compose: operands live over different grounds (" + ground_name(op1.ground()) + ", " +
                         ground_name(op2.ground()) + ")");
  }
  ConvOperator out(op1.ground());
  for (const auto& [a, f] : op1.terms())
    for (const auto& [b, g] : op2.terms()) compose_pair(out, a, f, b, g, shortcuts);
  return out;
}

}  // namespace

ConvOperator compose(const ConvOperator& op1, const ConvOperator& op2) { return compose_impl(op1, op2, true); }

ConvOperator compose_general(const ConvOperator& op1, const ConvOperator& op2) {
  return compose_impl(op1, op2, false);
}

// --------------------------------------------------------- finite model

OperatorTable OperatorTable::operator+(const OperatorTable& other) const {
  auto r = *this;
  for (const auto& [k, v] : other.entries) {
    auto& slot = r.entries[k];
    slot += v;
    if (slot == 0) r.entries.erase(k);
  }
  return r;
}

OperatorTable OperatorTable::operator*(const Rational& c) const {
  OperatorTable r;
  if (c == 0) return r;
  for (const auto& [k, v] : entries) r.entries.emplace(k, v * c);
  return r;
}

std::uint32_t encode_labeling(const std::vector<int>& labels, int n) {
  std::uint32_t code = 0, base = 1;
  for (int l : labels) {
    code += static_cast<std::uint32_t>(l) * base;
    base *= static_cast<std::uint32_t>(n);
  }
  return code;
}

std::vector<int> decode_labeling(std::uint32_t code, int n, int d) {
  std::vector<int> labels(static_cast<std::size_t>(d));
  for (auto& l : labels) {
    l = static_cast<int>(code % static_cast<std::uint32_t>(n));
    code /= static_cast<std::uint32_t>(n);
  }
  return labels;
}

namespace {

int finite_points(const GroundSpace& g, const char* what) {
  const auto* fs = std::get_if<FiniteSet>(&g);
  if (!fs) throw std::invalid_argument(std::string(what) + " needs a finite-set ground");
  if (fs->points.size() > 16) throw BoundExceeded(std::string(what) + ": at most 16 ground points");
  return static_cast<int>(fs->points.size());
}

std::vector<std::vector<int>> subsets(int N, int d) {
  std::vector<std::vector<int>> out;
  for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
    if (std::popcount(mask) != d) continue;
    std::vector<int> pts;
    for (int p = 0; p < N; ++p)
      if (mask & (1u << p)) pts.push_back(p);
    out.push_back(std::move(pts));
  }
  return out;
}

std::uint32_t mask_of(const std::vector<int>& pts) {
  std::uint32_t m = 0;
  for (int p : pts) m |= 1u << p;
  return m;
}

}  // namespace

OperatorTable operator_table(const ConvOperator& op) {
  const int N = finite_points(op.ground(), "operator_table");
  OperatorTable table;
  for (const auto& [a, f] : op.terms()) {
    const int n = a.n(), d = a.total();
    std::vector<int> capacity(a.entries());
    std::vector<std::vector<int>> blocks(static_cast<std::size_t>(n * n));
    std::vector<int> src(static_cast<std::size_t>(d)), dst(static_cast<std::size_t>(d));
    for (const auto& pts : subsets(N, d)) {
      const auto mask = mask_of(pts);
      auto rec = [&](auto&& self, int t) -> void {
        if (t == d) {
          Rational v = f.evaluate_indices(blocks);
          if (v == 0) return;
          OperatorTable::Key key{mask, encode_labeling(src, n), encode_labeling(dst, n)};
          auto& slot = table.entries[key];
          slot += v;
          if (slot == 0) table.entries.erase(key);
          return;
        }
        for (int b = 0; b < n * n; ++b) {
          if (capacity[static_cast<std::size_t>(b)] == 0) continue;
          --capacity[static_cast<std::size_t>(b)];
          blocks[static_cast<std::size_t>(b)].push_back(pts[static_cast<std::size_t>(t)]);
          src[static_cast<std::size_t>(t)] = b / n;
          dst[static_cast<std::size_t>(t)] = b % n;
          self(self, t + 1);
          blocks[static_cast<std::size_t>(b)].pop_back();
          ++capacity[static_cast<std::size_t>(b)];
        }
      };
      rec(rec, 0);
    }
  }
  return table;
}

OperatorTable table_product(const OperatorTable& a, const OperatorTable& b) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::pair<std::uint32_t, const Rational*>>> rows_of_b;
  for (const auto& [k, v] : b.entries) {
    auto [mask, src, dst] = k;
    rows_of_b[{mask, src}].emplace_back(dst, &v);
  }
  OperatorTable out;
  for (const auto& [k, v] : a.entries) {
    auto [mask, src, mid] = k;
    auto it = rows_of_b.find({mask, mid});
    if (it == rows_of_b.end()) continue;
    for (const auto& [dst, w] : it->second) out.entries[{mask, src, dst}] += v * *w;
  }
  std::erase_if(out.entries, [](const auto& kv) { return kv.second == 0; });
  return out;
}

OperatorTable compose_bruteforce(const ConvOperator& op1, const ConvOperator& op2) {
  if (!(op1.ground() == op2.ground())) throw GroundMismatch("compose_bruteforce: different grounds");
  return table_product(operator_table(op1), operator_table(op2));
}

OperatorTable identity_table(int n, int d, int N) {
  OperatorTable t;
  std::uint32_t labelings = 1;
  for (int k = 0; k < d; ++k) labelings *= static_cast<std::uint32_t>(n);
  for (const auto& pts : subsets(N, d)) {
    auto mask = mask_of(pts);
    for (std::uint32_t code = 0; code < labelings; ++code) t.entries[{mask, code, code}] = 1;
  }
  return t;
}

// ------------------------------------------------------------------ tau

BlockSymFunction power_function(int k, const GroundSpace& ground) {
  switch (ground.index()) {
    case 0: {
      std::vector<Rational> c(static_cast<std::size_t>(k + 1), Rational(0));
      c.back() = 1;
      return BlockSymFunction::univariate(c);
    }
    case 1: {
      const auto& fs = std::get<FiniteSet>(ground);
      std::vector<Rational> vals;
      for (const auto& p : fs.points) {
        Rational v(1);
        for (int e = 0; e < k; ++e) v *= p;
        vals.push_back(v);
      }
      return BlockSymFunction::table(BlockShape::single(1), fs, std::move(vals));
    }
    default:
      return BlockSymFunction::rule(
          BlockShape::single(1), std::get<TorusSampled>(ground),
          [k](const std::vector<Complex>& z) { return std::pow(z[0], k); }, "x^" + std::to_string(k));
  }
}

Rational univariate_value_at_index(const BlockSymFunction& f1, int p) {
  if (f1.shape().count() != 1 || f1.shape().size(0) != 1) throw std::invalid_argument("expected a univariate function");
  if (f1.is_table()) return f1.values()[static_cast<std::size_t>(p)];
  if (f1.is_polynomial()) return f1.evaluate({{Rational(p)}});
  throw std::invalid_argument("univariate_value_at_index needs an exact function");
}

ConvOperator tau(int i, int j, const BlockSymFunction& f1, int n, int d) {
  if (i < 0 || j < 0 || i >= n || j >= n) throw std::invalid_argument("tau: index out of range");
  if (f1.shape().count() != 1 || f1.shape().size(0) != 1) throw std::invalid_argument("tau: f1 must be univariate");
  ConvOperator op(f1.ground());
  for (const auto& v : enumerate_compositions(n, d)) {
    if (i != j) {
      if (v[j] < 1) continue;
      auto a = generator_matrix(v, i, j);
      op.add_term(a, lift_pij(f1, a, i, j));
    } else {
      op.add_term(IntMatrix::diagonal(v), composition_to_diagonal(v, lift_pii(f1, v, i)));
    }
  }
  return op;
}

void TensorState::add(const std::vector<int>& labels, const Rational& c) {
  if (c == 0) return;
  auto& slot = coeffs[labels];
  slot += c;
  if (slot == 0) coeffs.erase(labels);
}

namespace {

Rational value_at_point(const BlockSymFunction& f1, const FiniteSet& ground, int p) {
  if (f1.is_table()) return f1.values()[static_cast<std::size_t>(p)];
  if (f1.is_polynomial()) return f1.evaluate({{ground.points[static_cast<std::size_t>(p)]}});
  throw std::invalid_argument("tensor action needs an exact univariate function");
}

}  // namespace

TensorState apply_to_tensor(int i, int j, const BlockSymFunction& f1, const TensorState& state) {
  if (f1.is_table() && !(std::get<FiniteSet>(f1.ground()) == state.ground)) {
    throw GroundMismatch("apply_to_tensor: function and state use different point sets");
  }
  TensorState out = state;
  out.coeffs.clear();
  for (const auto& [labels, c] : state.coeffs) {
    if (i == j) {
      Rational s(0);
      for (std::size_t t = 0; t < labels.size(); ++t)
        if (labels[t] == i) s += value_at_point(f1, state.ground, state.points[t]);
      out.add(labels, c * s);
      continue;
    }
    for (std::size_t t = 0; t < labels.size(); ++t) {
      if (labels[t] != j) continue;
      auto moved = labels;
      moved[t] = i;
      out.add(moved, c * value_at_point(f1, state.ground, state.points[t]));
    }
  }
  return out;
}

OperatorTable tensor_action_table(int i, int j, const BlockSymFunction& f1, int n, int d) {
  const auto* fs = std::get_if<FiniteSet>(&f1.ground());
  if (!fs) throw std::invalid_argument("tensor_action_table needs a finite-set function");
  const int N = finite_points(f1.ground(), "tensor_action_table");
  std::uint32_t labelings = 1;
  for (int k = 0; k < d; ++k) labelings *= static_cast<std::uint32_t>(n);
  OperatorTable t;
  for (const auto& pts : subsets(N, d)) {
    auto mask = mask_of(pts);
    for (std::uint32_t code = 0; code < labelings; ++code) {
      TensorState s{*fs, pts, n, {}};
      s.add(decode_labeling(code, n, d), Rational(1));
      for (const auto& [labels, c] : apply_to_tensor(i, j, f1, s).coeffs) {
        t.entries[{mask, encode_labeling(labels, n), code}] += c;
      }
    }
  }
  std::erase_if(t.entries, [](const auto& kv) { return kv.second == 0; });
  return t;
}

// ---------------------------------------------------------------- Schur

std::map<IntMatrix, long> schur_product(const IntMatrix& a, const IntMatrix& b) {
  std::map<IntMatrix, long> out;
  if (a.n() != b.n() || a.col_sums() != b.row_sums()) return out;
  const int n = a.n();
  for (const auto& t : transfer_arrays(a, b)) {
    Rational w(1);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        int s = 0;
        for (int j = 0; j < n; ++j) {
          s += t.at(i, j, k);
          w /= factorial(t.at(i, j, k));
        }
        w *= factorial(s);
      }
    out[t.marginal13()] += w.get_num().get_si();
  }
  return out;
}

SchurTable schur_structure_constants(int n, int d) {
  SchurTable table;
  auto basis = enumerate_all_matrices(n, d);
  for (const auto& a : basis)
    for (const auto& b : basis)
      for (const auto& [c, v] : schur_product(a, b))
        if (v != 0) table[{a, b, c}] = v;
  return table;
}

bool schur_associative(const SchurTable& table, int n, int d) {
  std::map<std::pair<IntMatrix, IntMatrix>, std::map<IntMatrix, long>> prod;
  for (const auto& [k, v] : table) {
    const auto& [a, b, c] = k;
    prod[{a, b}][c] += v;
  }
  auto times = [&](const std::map<IntMatrix, long>& x, const IntMatrix& right, bool right_side) {
    std::map<IntMatrix, long> out;
    for (const auto& [e, cx] : x) {
      auto it = right_side ? prod.find({e, right}) : prod.find({right, e});
      if (it == prod.end()) continue;
      for (const auto& [f, cy] : it->second) out[f] += cx * cy;
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
    return out;
  };
  auto basis = enumerate_all_matrices(n, d);
  std::map<Composition, std::vector<IntMatrix>> by_rows;
  for (const auto& m : basis) by_rows[m.row_sums()].push_back(m);
  for (const auto& a : basis) {
    for (const auto& b : by_rows[a.col_sums()]) {
      auto ab_it = prod.find({a, b});
      std::map<IntMatrix, long> ab = ab_it == prod.end() ? std::map<IntMatrix, long>{} : ab_it->second;
      for (const auto& c : by_rows[b.col_sums()]) {
        auto left = times(ab, c, true);
        auto bc_it = prod.find({b, c});
        std::map<IntMatrix, long> bc = bc_it == prod.end() ? std::map<IntMatrix, long>{} : bc_it->second;
        auto right = times(bc, a, false);
        if (left != right) return false;
      }
    }
  }
  return true;
}

}  // namespace convalg
