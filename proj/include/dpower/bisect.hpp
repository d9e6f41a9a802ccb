#pragma once

#include <cmath>
#include <utility>

#include "dpower/params.hpp"

namespace dpower {

struct Bracket {
  double lo;
  double hi;
  double mid() const noexcept { return lo + 0.5 * (hi - lo); }
  double width() const noexcept { return hi - lo; }
};

/// Shrinks [lo, hi] around the switch point of a predicate that is false at lo
/// and true at hi. Both endpoint values are taken as given; the caller validates them.
template <class Pred>
Bracket bisect_predicate(Pred&& switched, double lo, double hi, double tol,
                         int max_iter = 200) {
  Bracket br{lo, hi};
  for (int it = 0; it < max_iter && br.width() > tol; ++it) {
    const double m = br.mid();
    if (m <= br.lo || m >= br.hi) break;  // no representable interior point left
    if (switched(m))
      br.hi = m;
    else
      br.lo = m;
  }
  return br;
}

/// Bisection for a root of a continuous function with opposite signs at the ends.
/// Throws BracketError if the end values do not straddle zero.
template <class Fn>
Bracket bisect_root(Fn&& fn, double lo, double hi, double tol, int max_iter = 200) {
  const double f_lo = fn(lo);
  const double f_hi = fn(hi);
  if (!std::isfinite(f_lo) || !std::isfinite(f_hi) || (f_lo > 0.0) == (f_hi > 0.0))
    throw BracketError("bisect_root: no sign change on the given bracket");
  const bool rising = f_lo < 0.0;
  return bisect_predicate([&](double x) { return (fn(x) > 0.0) == rising; }, lo, hi, tol,
                          max_iter);
}

} // namespace dpower
