#pragma once

#include <gmpxx.h>

#include <string>

namespace odepth {

using Rational = mpq_class;
using Integer = mpz_class;

inline std::string to_decimal(const Integer& z) { return z.get_str(10); }

inline Rational make_rational(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace odepth
