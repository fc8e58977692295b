#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace convalg {

using Rational = mpq_class;

/// Canonical "p/q" text form ("p" when q == 1).
std::string to_string(const Rational& q);

/// Parses "p", "-p" or "p/q"; throws std::invalid_argument on malformed text or q == 0.
Rational parse_rational(std::string_view text);

Rational factorial(int k);

/// Signals an explicit size or degree bound being hit.
class BoundExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace convalg
