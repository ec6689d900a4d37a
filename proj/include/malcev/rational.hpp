#pragma once

#include <gmpxx.h>

#include <string>

#include "malcev/errors.hpp"

namespace malcev {

// Exact rational scalar. mpq_class keeps values canonical (reduced fraction,
// positive denominator), so equality is plain comparison.
using Rat = mpq_class;

inline Rat rat_from_string(const std::string& s) {
  if (s.empty()) throw Error(errc::parse, "empty rational literal");
  mpq_class q;
  if (q.set_str(s, 10) != 0)
    throw Error(errc::parse, "bad rational literal '" + s + "'");
  q.canonicalize();
  return q;
}

inline std::string rat_to_string(const Rat& q) { return q.get_str(); }

inline Rat rat(long num, long den = 1) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace malcev
