#pragma once

#include <gmpxx.h>

#include <string>

namespace quotrep {

/// Exact rational scalar. All coefficients in the engine are of this type;
/// there is no floating point anywhere.
using Rational = mpq_class;

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

/// Canonicalized fraction; the raw two-argument mpq_class constructor does
/// not reduce and non-canonical values break comparisons.
inline Rational frac(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace quotrep
