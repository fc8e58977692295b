#include "convalg/orbits.hpp"

#include <bit>
#include <set>
#include <stdexcept>

#include "convalg/rational.hpp"

namespace convalg {

namespace {

int pow_int(int b, int e) {
  int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

void check_field(int q, int d) {
  if (q != 2 && q != 3) throw BoundExceeded("only q = 2 or q = 3 are supported");
  if (d < 0 || pow_int(q, d) > 32) throw BoundExceeded("q^d must not exceed 32");
}

std::vector<int> decode(int code, int q, int d) {
  std::vector<int> v(static_cast<std::size_t>(d));
  for (auto& x : v) {
    x = code % q;
    code /= q;
  }
  return v;
}

int encode(const std::vector<int>& v, int q) {
  int code = 0;
  for (std::size_t k = v.size(); k-- > 0;) code = code * q + ((v[k] % q) + q) % q;
  return code;
}

int add_codes(int x, int y, int q, int d) {
  auto a = decode(x, q, d), b = decode(y, q, d);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = (a[k] + b[k]) % q;
  return encode(a, q);
}

int scale_code(int x, int s, int q, int d) {
  auto a = decode(x, q, d);
  for (auto& v : a) v = (v * s) % q;
  return encode(a, q);
}

}  // namespace

Subspace Subspace::zero(int q, int d) {
  check_field(q, d);
  Subspace s;
  s.q_ = q;
  s.d_ = d;
  return s;
}

Subspace Subspace::whole(int q, int d) {
  check_field(q, d);
  Subspace s;
  s.q_ = q;
  s.d_ = d;
  int total = pow_int(q, d);
  s.members_ = total == 32 ? 0xffffffffu : ((1u << total) - 1u);
  return s;
}

Subspace Subspace::span(int q, int d, const std::vector<std::vector<int>>& vectors) {
  auto s = zero(q, d);
  std::set<int> members{0};
  for (const auto& v : vectors) {
    if (static_cast<int>(v.size()) != d) throw std::invalid_argument("span: vector length differs from d");
    int code = encode(v, q);
    std::set<int> next = members;
    for (int m : members)
      for (int k = 1; k < q; ++k) next.insert(add_codes(m, scale_code(code, k, q, d), q, d));
    members = std::move(next);
  }
  for (int m : members) s.members_ |= 1u << m;
  return s;
}

int Subspace::dim() const {
  int count = std::popcount(members_), dim = 0;
  while (count > 1) {
    count /= q_;
    ++dim;
  }
  return dim;
}

Subspace Subspace::intersect(const Subspace& other) const {
  if (q_ != other.q_ || d_ != other.d_) throw std::invalid_argument("intersect: different ambient spaces");
  auto s = *this;
  s.members_ &= other.members_;
  return s;
}

std::vector<std::vector<int>> Subspace::basis() const {
  // Greedy: pick members not in the span so far, then row reduce.
  std::vector<std::vector<int>> rows;
  Subspace cur = zero(q_, d_);
  for (int code = 1; code < pow_int(q_, d_); ++code) {
    if (!(members_ & (1u << code)) || (cur.members_ & (1u << code))) continue;
    rows.push_back(decode(code, q_, d_));
    cur = span(q_, d_, rows);
  }
  auto inv = [this](int x) {
    for (int y = 1; y < q_; ++y)
      if ((x * y) % q_ == 1) return y;
    return 0;
  };
  std::size_t r = 0;
  for (int col = d_ - 1; col >= 0 && r < rows.size(); --col) {
    std::size_t piv = r;
    while (piv < rows.size() && rows[piv][static_cast<std::size_t>(col)] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[r], rows[piv]);
    int s = inv(rows[r][static_cast<std::size_t>(col)]);
    for (auto& x : rows[r]) x = (x * s) % q_;
    for (std::size_t o = 0; o < rows.size(); ++o) {
      if (o == r) continue;
      int f = rows[o][static_cast<std::size_t>(col)];
      for (std::size_t k = 0; k < rows[o].size(); ++k) rows[o][k] = ((rows[o][k] - f * rows[r][k]) % q_ + q_) % q_;
    }
    ++r;
  }
  return rows;
}

Composition Flag::type() const {
  std::vector<int> parts;
  for (std::size_t i = 1; i < chain.size(); ++i) parts.push_back(chain[i].dim() - chain[i - 1].dim());
  return Composition(parts);
}

bool Flag::valid() const {
  if (chain.size() < 2) return false;
  const auto& last = chain.back();
  if (chain.front().dim() != 0 || last.dim() != last.ambient()) return false;
  for (std::size_t i = 1; i < chain.size(); ++i)
    if (!chain[i].contains(chain[i - 1])) return false;
  return true;
}

IntMatrix orbit_matrix(const FlagPair& fp) {
  if (!fp.first.valid() || !fp.second.valid() || fp.first.steps() != fp.second.steps()) {
    throw std::invalid_argument("orbit_matrix: malformed flag pair");
  }
  const int n = fp.first.steps();
  auto N = [&](int i, int j) { return fp.first.chain[static_cast<std::size_t>(i)].intersect(fp.second.chain[static_cast<std::size_t>(j)]).dim(); };
  IntMatrix a(n);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      int v = N(i, j) - N(i - 1, j) - N(i, j - 1) + N(i - 1, j - 1);
      if (v < 0) throw std::logic_error("orbit_matrix: negative rank increment");
      a.set(i - 1, j - 1, v);
    }
  if (a.row_sums() != fp.first.type() || a.col_sums() != fp.second.type()) {
    throw std::logic_error("orbit_matrix: marginals differ from flag types");
  }
  return a;
}

std::vector<Subspace> all_subspaces(int q, int d) {
  check_field(q, d);
  std::set<Subspace> found{Subspace::zero(q, d)};
  std::vector<Subspace> frontier{Subspace::zero(q, d)};
  while (!frontier.empty()) {
    std::vector<Subspace> next;
    for (const auto& s : frontier) {
      for (int code = 1; code < pow_int(q, d); ++code) {
        if (s.members() & (1u << code)) continue;
        auto rows = s.basis();
        rows.push_back(decode(code, q, d));
        auto t = Subspace::span(q, d, rows);
        if (found.insert(t).second) next.push_back(t);
      }
    }
    frontier = std::move(next);
  }
  return {found.begin(), found.end()};
}

std::vector<Flag> all_flags(int n, int d, int q) {
  if (n < 1) throw std::invalid_argument("all_flags needs n >= 1");
  auto subs = all_subspaces(q, d);
  std::vector<Flag> out;
  Flag cur;
  cur.chain.push_back(Subspace::zero(q, d));
  auto rec = [&](auto&& self, int step) -> void {
    if (step == n) {
      cur.chain.push_back(Subspace::whole(q, d));
      out.push_back(cur);
      cur.chain.pop_back();
      return;
    }
    for (const auto& s : subs) {
      if (!s.contains(cur.chain.back())) continue;
      cur.chain.push_back(s);
      self(self, step + 1);
      cur.chain.pop_back();
    }
  };
  rec(rec, 1);
  return out;
}

std::map<IntMatrix, long> orbit_census(int n, int d, int q) {
  if (n > 3 || d > 3) throw BoundExceeded("orbit_census supports n <= 3, d <= 3");
  auto flags = all_flags(n, d, q);
  std::map<IntMatrix, long> census;
  for (const auto& f1 : flags)
    for (const auto& f2 : flags) ++census[orbit_matrix({f1, f2})];
  return census;
}

FqMatrix random_invertible(int d, int q, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dist(0, q - 1);
  while (true) {
    FqMatrix g(static_cast<std::size_t>(d), std::vector<int>(static_cast<std::size_t>(d)));
    for (auto& row : g)
      for (auto& x : row) x = dist(rng);
    if (Subspace::span(q, d, g).dim() == d) return g;
  }
}

Subspace apply(const FqMatrix& g, const Subspace& s) {
  std::vector<std::vector<int>> images;
  for (const auto& b : s.basis()) {
    std::vector<int> w(g.size(), 0);
    for (std::size_t r = 0; r < g.size(); ++r)
      for (std::size_t k = 0; k < b.size(); ++k) w[r] = (w[r] + g[r][k] * b[k]) % s.q();
    images.push_back(std::move(w));
  }
  return Subspace::span(s.q(), s.ambient(), images);
}

Flag apply(const FqMatrix& g, const Flag& f) {
  Flag out;
  for (const auto& s : f.chain) out.chain.push_back(apply(g, s));
  return out;
}

Flag coordinate_flag(const Permutation& sigma, int q) {
  const int d = sigma.size();
  Flag f;
  std::vector<std::vector<int>> rows;
  f.chain.push_back(Subspace::zero(q, d));
  for (int i = 0; i < d; ++i) {
    std::vector<int> e(static_cast<std::size_t>(d), 0);
    e[static_cast<std::size_t>(sigma(i))] = 1;
    rows.push_back(std::move(e));
    f.chain.push_back(Subspace::span(q, d, rows));
  }
  return f;
}

}  // namespace convalg
