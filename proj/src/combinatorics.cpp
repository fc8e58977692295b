#include "convalg/combinatorics.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "convalg/rational.hpp"

namespace convalg {

namespace {

std::string join(const std::vector<int>& xs) {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < xs.size(); ++k) os << (k ? "," : "") << xs[k];
  os << ')';
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- Composition

Composition::Composition(std::vector<int> parts) : parts_(std::move(parts)) {
  for (int p : parts_) {
    if (p < 0) throw std::invalid_argument("composition part is negative");
    total_ += p;
  }
}

std::pair<int, int> Composition::segment(int i) const {
  int first = 0;
  for (int k = 0; k < i; ++k) first += parts_[static_cast<std::size_t>(k)];
  return {first, first + parts_[static_cast<std::size_t>(i)]};
}

Composition Composition::adjusted(int i, int delta) const {
  auto parts = parts_;
  parts[static_cast<std::size_t>(i)] += delta;
  return Composition(std::move(parts));
}

std::string Composition::str() const { return join(parts_); }

// ------------------------------------------------------------------ IntMatrix

IntMatrix::IntMatrix(int n) : n_(n), entries_(static_cast<std::size_t>(n * n), 0) {
  if (n < 1) throw std::invalid_argument("matrix size must be positive");
}

IntMatrix::IntMatrix(int n, std::vector<int> row_major) : n_(n), entries_(std::move(row_major)) {
  if (n < 1 || entries_.size() != static_cast<std::size_t>(n * n)) {
    throw std::invalid_argument("matrix entry count does not match n*n");
  }
  for (int x : entries_) {
    if (x < 0) throw std::invalid_argument("matrix entry is negative");
  }
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  int n = static_cast<int>(rows.size());
  std::vector<int> flat;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != n) throw std::invalid_argument("matrix is not square");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return IntMatrix(n, std::move(flat));
}

IntMatrix IntMatrix::diagonal(const Composition& v) {
  IntMatrix m(v.n());
  for (int i = 0; i < v.n(); ++i) m.set(i, i, v[i]);
  return m;
}

IntMatrix IntMatrix::unit(int n, int i, int j) {
  IntMatrix m(n);
  m.set(i, j, 1);
  return m;
}

void IntMatrix::set(int i, int j, int value) {
  if (value < 0) throw std::invalid_argument("matrix entry would be negative");
  entries_[static_cast<std::size_t>(i * n_ + j)] = value;
}

void IntMatrix::add(int i, int j, int delta) { set(i, j, at(i, j) + delta); }

int IntMatrix::total() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }

Composition IntMatrix::row_sums() const {
  std::vector<int> s(static_cast<std::size_t>(n_), 0);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) s[static_cast<std::size_t>(i)] += at(i, j);
  return Composition(std::move(s));
}

Composition IntMatrix::col_sums() const {
  std::vector<int> s(static_cast<std::size_t>(n_), 0);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) s[static_cast<std::size_t>(j)] += at(i, j);
  return Composition(std::move(s));
}

bool IntMatrix::is_diagonal() const {
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (i != j && at(i, j) != 0) return false;
  return true;
}

bool IntMatrix::is_lower_triangular() const {
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (at(i, j) != 0) return false;
  return true;
}

bool IntMatrix::is_upper_triangular() const {
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < i; ++j)
      if (at(i, j) != 0) return false;
  return true;
}

std::vector<std::vector<int>> IntMatrix::rows() const {
  std::vector<std::vector<int>> out;
  for (int i = 0; i < n_; ++i) {
    out.emplace_back(entries_.begin() + i * n_, entries_.begin() + (i + 1) * n_);
  }
  return out;
}

std::string IntMatrix::str() const {
  std::ostringstream os;
  os << '[';
  auto rs = rows();
  for (std::size_t i = 0; i < rs.size(); ++i) {
    os << (i ? "," : "") << '[';
    for (std::size_t j = 0; j < rs[i].size(); ++j) os << (j ? "," : "") << rs[i][j];
    os << ']';
  }
  os << ']';
  return os.str();
}

IntMatrix IntMatrix::operator+(const IntMatrix& other) const {
  if (n_ != other.n_) throw std::invalid_argument("matrix size mismatch");
  auto e = entries_;
  for (std::size_t k = 0; k < e.size(); ++k) e[k] += other.entries_[k];
  return IntMatrix(n_, std::move(e));
}

// -------------------------------------------------------------- TransferArray

TransferArray::TransferArray(int n) : n_(n), entries_(static_cast<std::size_t>(n * n * n), 0) {}

int TransferArray::total() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }

IntMatrix TransferArray::marginal12() const {
  IntMatrix m(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) m.add(i, j, at(i, j, k));
  return m;
}

IntMatrix TransferArray::marginal23() const {
  IntMatrix m(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) m.add(j, k, at(i, j, k));
  return m;
}

IntMatrix TransferArray::marginal13() const {
  IntMatrix m(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) m.add(i, k, at(i, j, k));
  return m;
}

// ---------------------------------------------------------------- Permutation

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  std::vector<bool> seen(images_.size(), false);
  for (int x : images_) {
    if (x < 0 || x >= static_cast<int>(images_.size()) || seen[static_cast<std::size_t>(x)]) {
      throw std::invalid_argument("not a permutation: " + join(images_));
    }
    seen[static_cast<std::size_t>(x)] = true;
  }
}

Permutation Permutation::identity(int d) {
  std::vector<int> im(static_cast<std::size_t>(d));
  std::iota(im.begin(), im.end(), 0);
  return Permutation(std::move(im));
}

Permutation Permutation::simple(int d, int i) {
  auto p = identity(d);
  std::swap(p.images_[static_cast<std::size_t>(i)], p.images_[static_cast<std::size_t>(i + 1)]);
  return p;
}

int Permutation::length() const {
  int inv = 0;
  for (std::size_t a = 0; a < images_.size(); ++a)
    for (std::size_t b = a + 1; b < images_.size(); ++b)
      if (images_[a] > images_[b]) ++inv;
  return inv;
}

Permutation Permutation::inverse() const {
  std::vector<int> im(images_.size());
  for (std::size_t a = 0; a < images_.size(); ++a) im[static_cast<std::size_t>(images_[a])] = static_cast<int>(a);
  return Permutation(std::move(im));
}

Permutation Permutation::operator*(const Permutation& other) const {
  if (size() != other.size()) throw std::invalid_argument("permutation size mismatch");
  std::vector<int> im(images_.size());
  for (std::size_t a = 0; a < im.size(); ++a) im[a] = images_[static_cast<std::size_t>(other.images_[a])];
  return Permutation(std::move(im));
}

// -------------------------------------------------------------- enumerations

std::vector<Composition> enumerate_compositions(int n, int d) {
  if (n < 1 || d < 0) throw std::invalid_argument("enumerate_compositions needs n >= 1, d >= 0");
  std::vector<Composition> out;
  std::vector<int> parts(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == n - 1) {
      parts[static_cast<std::size_t>(pos)] = left;
      out.emplace_back(parts);
      return;
    }
    for (int x = 0; x <= left; ++x) {
      parts[static_cast<std::size_t>(pos)] = x;
      self(self, pos + 1, left - x);
    }
  };
  rec(rec, 0, d);
  return out;
}

std::vector<IntMatrix> enumerate_matrices(const Composition& v1, const Composition& v2) {
  if (v1.n() != v2.n() || v1.d() != v2.d()) {
    throw std::invalid_argument("enumerate_matrices: marginals " + v1.str() + " and " + v2.str() + " differ in n or d");
  }
  const int n = v1.n();
  std::vector<IntMatrix> out;
  std::vector<int> rows(v1.parts()), cols(v2.parts());
  std::vector<int> entries(static_cast<std::size_t>(n * n), 0);
  auto rec = [&](auto&& self, int pos) -> void {
    if (pos == n * n) {
      out.emplace_back(n, entries);
      return;
    }
    int i = pos / n, j = pos % n;
    auto& r = rows[static_cast<std::size_t>(i)];
    auto& c = cols[static_cast<std::size_t>(j)];
    int lo = 0, hi = std::min(r, c);
    if (j == n - 1) {
      if (r > c) return;
      lo = hi = r;
    }
    if (i == n - 1) {
      if (c > r) return;
      if (c < lo || c > hi) return;
      lo = hi = c;
    }
    for (int x = lo; x <= hi; ++x) {
      entries[static_cast<std::size_t>(pos)] = x;
      r -= x;
      c -= x;
      self(self, pos + 1);
      r += x;
      c += x;
    }
    entries[static_cast<std::size_t>(pos)] = 0;
  };
  rec(rec, 0);
  return out;
}

std::vector<IntMatrix> enumerate_all_matrices(int n, int d) {
  if (n < 1 || d < 0) throw std::invalid_argument("enumerate_all_matrices needs n >= 1, d >= 0");
  std::vector<IntMatrix> out;
  std::vector<int> entries(static_cast<std::size_t>(n * n), 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == n * n - 1) {
      entries[static_cast<std::size_t>(pos)] = left;
      out.emplace_back(n, entries);
      return;
    }
    for (int x = 0; x <= left; ++x) {
      entries[static_cast<std::size_t>(pos)] = x;
      self(self, pos + 1, left - x);
    }
  };
  rec(rec, 0, d);
  return out;
}

IntMatrix matrix_of_permutation(const Permutation& sigma, const Composition& v1, const Composition& v2) {
  if (v1.n() != v2.n() || v1.d() != v2.d() || sigma.size() != v1.d()) {
    throw std::invalid_argument("matrix_of_permutation: size mismatch");
  }
  const int n = v1.n();
  std::vector<int> block2(static_cast<std::size_t>(v2.d()));
  for (int j = 0; j < n; ++j) {
    auto [lo, hi] = v2.segment(j);
    for (int b = lo; b < hi; ++b) block2[static_cast<std::size_t>(b)] = j;
  }
  IntMatrix m(n);
  for (int i = 0; i < n; ++i) {
    auto [lo, hi] = v1.segment(i);
    for (int a = lo; a < hi; ++a) m.add(i, block2[static_cast<std::size_t>(sigma(a))], 1);
  }
  return m;
}

// -------------------------------------------------------------------- orders

bool preceq(const IntMatrix& a, const IntMatrix& b) {
  if (a.n() != b.n() || a.row_sums() != b.row_sums() || a.col_sums() != b.col_sums()) return false;
  const int n = a.n();
  auto corner_upper = [n](const IntMatrix& m, int i, int j) {
    int s = 0;
    for (int r = 0; r <= i; ++r)
      for (int c = j; c < n; ++c) s += m.at(r, c);
    return s;
  };
  auto corner_lower = [n](const IntMatrix& m, int i, int j) {
    int s = 0;
    for (int r = i; r < n; ++r)
      for (int c = 0; c <= j; ++c) s += m.at(r, c);
    return s;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i < j && corner_upper(a, i, j) > corner_upper(b, i, j)) return false;
      if (j < i && corner_lower(a, i, j) > corner_lower(b, i, j)) return false;
    }
  }
  return true;
}

namespace {

// Minimal representatives of every double coset for one pair of marginals.
using RepTable = std::map<IntMatrix, Permutation>;

const RepTable& representatives(const Composition& v1, const Composition& v2) {
  static std::mutex mu;
  static std::map<std::pair<Composition, Composition>, RepTable> cache;
  std::lock_guard lock(mu);
  auto key = std::make_pair(v1, v2);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  RepTable table;
  auto images = Permutation::identity(v1.d()).images();
  do {
    Permutation sigma(images);
    auto m = matrix_of_permutation(sigma, v1, v2);
    auto it = table.find(m);
    if (it == table.end()) {
      table.emplace(m, sigma);
    } else if (sigma.length() < it->second.length()) {
      it->second = sigma;
    }
  } while (std::next_permutation(images.begin(), images.end()));
  return cache.emplace(key, std::move(table)).first->second;
}

}  // namespace

Permutation minimal_representative(const IntMatrix& a) {
  const int d = a.total();
  if (d > kPermutationEnumerationCap) {
    throw BoundExceeded("Bruhat comparison needs d <= " + std::to_string(kPermutationEnumerationCap) +
                        ", got d = " + std::to_string(d));
  }
  const auto& table = representatives(a.row_sums(), a.col_sums());
  return table.at(a);
}

std::vector<int> reduced_word(const Permutation& sigma) {
  // Bubble sort: sigma * s_{i1} * ... * s_{ik} = id, hence sigma = s_{ik} ... s_{i1}.
  auto im = sigma.images();
  std::vector<int> steps;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < im.size(); ++i) {
      if (im[i] > im[i + 1]) {
        std::swap(im[i], im[i + 1]);
        steps.push_back(static_cast<int>(i));
        changed = true;
      }
    }
  }
  std::reverse(steps.begin(), steps.end());
  return steps;
}

bool bruhat_leq(const Permutation& sigma, const Permutation& pi) {
  if (sigma.size() != pi.size()) throw std::invalid_argument("bruhat_leq: permutation size mismatch");
  if (sigma.size() > kPermutationEnumerationCap) {
    throw BoundExceeded("Bruhat comparison needs d <= " + std::to_string(kPermutationEnumerationCap));
  }
  if (sigma.length() > pi.length()) return false;
  const int d = sigma.size();
  std::set<Permutation> reachable{Permutation::identity(d)};
  for (int s : reduced_word(pi)) {
    auto gen = Permutation::simple(d, s);
    std::vector<Permutation> fresh;
    for (const auto& x : reachable) fresh.push_back(x * gen);
    reachable.insert(fresh.begin(), fresh.end());
  }
  return reachable.contains(sigma);
}

bool bruhat_leq(const IntMatrix& a, const IntMatrix& b) {
  if (a.n() != b.n() || a.row_sums() != b.row_sums() || a.col_sums() != b.col_sums()) {
    throw std::invalid_argument("bruhat_leq: matrices have different marginals");
  }
  return bruhat_leq(minimal_representative(a), minimal_representative(b));
}

long length_statistic(const IntMatrix& c) {
  long l = 0;
  for (int i = 0; i < c.n(); ++i) {
    for (int j = 0; j < c.n(); ++j) {
      if (i == j) continue;
      long g = std::abs(i - j);
      l += (g + 1) * g / 2 * c.at(i, j);
    }
  }
  return l;
}

IntMatrix generator_matrix(const Composition& v, int i, int j) {
  if (i == j) throw std::invalid_argument("generator_matrix needs i != j");
  if (i < 0 || j < 0 || i >= v.n() || j >= v.n()) throw std::invalid_argument("generator_matrix index out of range");
  if (v[j] < 1) throw std::invalid_argument("generator_matrix needs v_j >= 1");
  auto m = IntMatrix::diagonal(v);
  m.add(j, j, -1);
  m.add(i, j, 1);
  return m;
}

// ----------------------------------------------------------- transfer arrays

std::vector<TransferArray> transfer_arrays(const IntMatrix& a, const IntMatrix& b) {
  if (a.n() != b.n() || a.col_sums() != b.row_sums()) {
    throw std::invalid_argument("transfer_arrays: colSums(A) " + a.col_sums().str() + " != rowSums(B) " +
                                b.row_sums().str());
  }
  const int n = a.n();
  // The middle index j decouples: slice t_{.j.} lies in M(column j of A, row j of B).
  std::vector<std::vector<IntMatrix>> slices;
  for (int j = 0; j < n; ++j) {
    std::vector<int> col, row;
    for (int i = 0; i < n; ++i) col.push_back(a.at(i, j));
    for (int k = 0; k < n; ++k) row.push_back(b.at(j, k));
    slices.push_back(enumerate_matrices(Composition(col), Composition(row)));
  }
  std::vector<TransferArray> out;
  std::vector<std::size_t> pick(static_cast<std::size_t>(n), 0);
  for (const auto& s : slices)
    if (s.empty()) return out;
  while (true) {
    TransferArray t(n);
    for (int j = 0; j < n; ++j) {
      const auto& m = slices[static_cast<std::size_t>(j)][pick[static_cast<std::size_t>(j)]];
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) t.set(i, j, k, m.at(i, k));
    }
    out.push_back(std::move(t));
    int j = n - 1;
    while (j >= 0) {
      auto& p = pick[static_cast<std::size_t>(j)];
      if (++p < slices[static_cast<std::size_t>(j)].size()) break;
      p = 0;
      --j;
    }
    if (j < 0) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Checks a = diag + x E_{p,q} with |p - q| = 1 and returns x.
int elementary_mass(const IntMatrix& a, int p, int q) {
  const int n = a.n();
  if (p < 0 || q < 0 || p >= n || q >= n) throw std::invalid_argument("elementary shape: index out of range");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && !(i == p && j == q) && a.at(i, j) != 0) {
        throw std::invalid_argument("A = " + a.str() + " is not diagonal plus a single elementary entry");
      }
  return a.at(p, q);
}

// Shared body of both splitting cases: mass moves from row `from` to row `to`,
// through middle slice `from` (the column of A holding the extra entry).
std::vector<Splitting> split_into(const IntMatrix& a, const IntMatrix& b, int to, int from) {
  if (a.col_sums() != b.row_sums()) throw std::invalid_argument("splitting: colSums(A) != rowSums(B)");
  const int n = a.n();
  const int mass = elementary_mass(a, to, from);
  std::vector<Splitting> out;
  std::vector<int> s(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, int k, int left) -> void {
    if (k == n) {
      if (left != 0) return;
      TransferArray t(n);
      for (int j = 0; j < n; ++j) {
        if (j == from) continue;
        for (int kk = 0; kk < n; ++kk) t.set(j, j, kk, b.at(j, kk));
      }
      for (int kk = 0; kk < n; ++kk) {
        t.set(from, from, kk, b.at(from, kk) - s[static_cast<std::size_t>(kk)]);
        t.set(to, from, kk, s[static_cast<std::size_t>(kk)]);
      }
      auto expected = b;
      for (int kk = 0; kk < n; ++kk) {
        expected.add(to, kk, s[static_cast<std::size_t>(kk)]);
        expected.add(from, kk, -s[static_cast<std::size_t>(kk)]);
      }
      if (t.marginal13() != expected || t.marginal12() != a || t.marginal23() != b) {
        throw std::logic_error("splitting array marginals disagree with the case formula");
      }
      out.push_back({s, std::move(t)});
      return;
    }
    for (int x = 0; x <= std::min(left, b.at(from, k)); ++x) {
      s[static_cast<std::size_t>(k)] = x;
      self(self, k + 1, left - x);
    }
    s[static_cast<std::size_t>(k)] = 0;
  };
  rec(rec, 0, mass);
  return out;
}

LeadingTerm lead_into(const IntMatrix& a, const IntMatrix& b, int to, int from, bool take_last) {
  if (a.col_sums() != b.row_sums()) throw std::invalid_argument("leading array: colSums(A) != rowSums(B)");
  const int n = a.n();
  const int mass = elementary_mass(a, to, from);
  std::vector<int> s(static_cast<std::size_t>(n), 0);
  if (mass > 0) {
    int m = -1;
    for (int k = 0; k < n; ++k)
      if (b.at(from, k) != 0 && (take_last || m < 0)) m = k;
    if (m < 0 || b.at(from, m) < mass) {
      throw std::invalid_argument("leading array: hypothesis b_{" + std::to_string(from + 1) + ",m} >= " +
                                  std::to_string(mass) + " fails for B = " + b.str());
    }
    s[static_cast<std::size_t>(m)] = mass;
  }
  for (auto& sp : split_into(a, b, to, from)) {
    if (sp.shares == s) return {sp.array, sp.array.marginal13()};
  }
  throw std::logic_error("leading array not found in splitting set");
}

}  // namespace

std::vector<Splitting> splitting_set(const IntMatrix& a, const IntMatrix& b, int p) {
  if (p + 1 >= a.n()) throw std::invalid_argument("splitting_set: p + 1 out of range");
  return split_into(a, b, p, p + 1);
}

std::vector<Splitting> splitting_set_lower(const IntMatrix& a, const IntMatrix& b, int p) {
  if (p < 1) throw std::invalid_argument("splitting_set_lower: p - 1 out of range");
  return split_into(a, b, p, p - 1);
}

LeadingTerm leading_array(const IntMatrix& a, const IntMatrix& b, int p) {
  if (p + 1 >= a.n()) throw std::invalid_argument("leading_array: p + 1 out of range");
  return lead_into(a, b, p, p + 1, true);
}

LeadingTerm leading_array_lower(const IntMatrix& a, const IntMatrix& b, int p) {
  if (p < 1) throw std::invalid_argument("leading_array_lower: p - 1 out of range");
  return lead_into(a, b, p, p - 1, false);
}

}  // namespace convalg
