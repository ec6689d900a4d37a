#pragma once

// Shared example rings used across the test suites.

#include <map>
#include <string>
#include <vector>

#include "malcev/graded_ring.hpp"

namespace fixtures {

using malcev::GradedRing;
using malcev::Rat;
using malcev::rat;
using malcev::Vec;

// H*(S^n): one class in degree n, square zero.
inline GradedRing sphere(int n) {
  std::vector<GradedRing::BasisElement> basis{{"1", 0}, {"x", n}};
  return GradedRing(basis, "1", {});
}

// H*(CP^2): 1, x (deg 2), y (deg 4), x*x = y.
inline GradedRing cp2() {
  std::vector<GradedRing::BasisElement> basis{{"1", 0}, {"x", 2}, {"y", 4}};
  Vec xx(3);
  xx[2] = 1;
  return GradedRing(basis, "1", {{{1, 1}, xx}});
}

// H*(T^2) = exterior algebra on a, b in degree 1.
inline GradedRing torus() {
  std::vector<GradedRing::BasisElement> basis{
      {"1", 0}, {"a", 1}, {"b", 1}, {"w", 2}};
  Vec w(4), mw(4);
  w[3] = 1;
  mw[3] = -1;
  std::map<std::pair<size_t, size_t>, Vec> prod{{{1, 2}, w}, {{2, 1}, mw}};
  return GradedRing(basis, "1", prod);
}

// H*(genus-2 surface): symplectic pairing a_i b_i = w.
inline GradedRing genus2() {
  std::vector<GradedRing::BasisElement> basis{
      {"1", 0}, {"a1", 1}, {"b1", 1}, {"a2", 1}, {"b2", 1}, {"w", 2}};
  const size_t n = basis.size();
  auto unitvec = [&](size_t k, long c) {
    Vec v(n);
    v[k] = rat(c);
    return v;
  };
  std::map<std::pair<size_t, size_t>, Vec> prod{
      {{1, 2}, unitvec(5, 1)},  // a1 b1 = w
      {{2, 1}, unitvec(5, -1)},
      {{3, 4}, unitvec(5, 1)},  // a2 b2 = w
      {{4, 3}, unitvec(5, -1)},
  };
  return GradedRing(basis, "1", prod);
}

}  // namespace fixtures
