#include "convalg/rational.hpp"

#include <mutex>
#include <vector>

namespace convalg {

std::string to_string(const Rational& q) { return q.get_str(); }

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  std::size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  bool seen_slash = false;
  bool digit_before = false;
  bool digit_after = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    char ch = text[i];
    if (ch == '/') {
      if (seen_slash || !digit_before) throw std::invalid_argument("malformed rational: " + std::string(text));
      seen_slash = true;
    } else if (ch >= '0' && ch <= '9') {
      (seen_slash ? digit_after : digit_before) = true;
    } else {
      throw std::invalid_argument("malformed rational: " + std::string(text));
    }
  }
  if (!digit_before || (seen_slash && !digit_after)) {
    throw std::invalid_argument("malformed rational: " + std::string(text));
  }
  std::string s(text[0] == '+' ? text.substr(1) : text);
  Rational q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("malformed rational: " + s);
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  q.canonicalize();
  return q;
}

Rational factorial(int k) {
  static std::mutex mu;
  static std::vector<Rational> table{Rational(1)};
  if (k < 0) throw std::invalid_argument("factorial of negative integer");
  std::lock_guard lock(mu);
  while (static_cast<int>(table.size()) <= k) {
    table.push_back(table.back() * static_cast<long>(table.size()));
  }
  return table[static_cast<std::size_t>(k)];
}

}  // namespace convalg
