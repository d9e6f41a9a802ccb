#pragma once

// Shooting on the initial height u(0) = d for the radial problem
//   u'' + (n-1)/r u' + f(u) = 0,  u'(0) = 0,  u(r) -> 0 as r -> inf.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dpower/bisect.hpp"
#include "dpower/criteria.hpp"
#include "dpower/dormand_prince.hpp"
#include "dpower/nonlinearity.hpp"
#include "dpower/detail/parallel.hpp"
#include "dpower/params.hpp"

namespace dpower {

class NoSolutionError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

enum class ShotTag { Crossing, Rebound, Unresolved };

inline constexpr std::string_view to_string(ShotTag t) noexcept {
  switch (t) {
    case ShotTag::Crossing: return "Crossing";
    case ShotTag::Rebound: return "Rebound";
    case ShotTag::Unresolved: return "Unresolved";
  }
  return "Unresolved";
}

struct ShotClass {
  ShotTag tag = ShotTag::Unresolved;
  std::optional<double> event_r;
  std::string diagnostic;
};

struct Sample {
  double r;
  double u;
  double du;
  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Trajectory {
  double d = 0.0;
  std::vector<Sample> samples;
  ShotClass classification;
};

struct SolverControls {
  double r_max = 0.0;          ///< 0 selects 200/sqrt(omega)
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_min = 1e-14;
  double h_max = 1.0;
  double start_h = 1e-6;       ///< radius of the series start
  std::size_t max_steps = 5'000'000;
  double d_tol = 1e-10;
  int r_max_retries = 1;       ///< doublings of r_max after an Unresolved shot
  std::size_t output_points = 2048;
};

inline double default_r_max(const Params& prm) { return 200.0 / std::sqrt(prm.omega()); }

/// f extended as an odd function to u < 0, for the short stretch past a crossing.
inline double f_odd(double u, const Params& prm) {
  return u < 0.0 ? -eval_f(-u, prm) : eval_f(u, prm);
}

/// F extended evenly to u < 0, matching f_odd.
inline double F_even(double u, const Params& prm) { return eval_F(std::abs(u), prm); }

/// Returns (u', u''). At r = 0 the damping term takes its regular limit, so u''(0) = -f(u)/n.
inline State<2> ode_rhs(double r, const State<2>& y, const Params& prm) {
  const double force = f_odd(y[0], prm);
  if (r == 0.0) return {y[1], -force / static_cast<double>(prm.n())};
  return {y[1], -(static_cast<double>(prm.n() - 1) / r) * y[1] - force};
}

/// E = u'^2/2 + F(u); dE/dr = -((n-1)/r) u'^2.
inline double energy(const Sample& s, const Params& prm) {
  return 0.5 * s.du * s.du + F_even(s.u, prm);
}

namespace detail {

struct ShotSetup {
  double beta;
  double c;
};

inline ShotSetup shot_setup(const Params& prm) {
  const CriticalPoints cp = critical_points(prm);
  if (!cp.beta || !cp.c)
    throw NoSolutionError("no positive solution: omega >= omega_p");
  return {*cp.beta, *cp.c};
}

// Locates the first radius in [step.t0, step.t1] where `hit` holds, assuming it fails
// at t0 and holds at t1. Returns the state on the side where it holds.
template <class Hit>
Sample locate_event(const AcceptedStep<2>& step, Hit&& hit) {
  double lo = step.t0;
  double hi = step.t1;
  State<2> y_hi = step.y1;
  for (int it = 0; it < 100; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const State<2> y = step.at(mid);
    if (hit(y)) {
      hi = mid;
      y_hi = y;
    } else {
      lo = mid;
    }
  }
  return {hi, y_hi[0], y_hi[1]};
}

} // namespace detail

inline Trajectory integrate_shot(double d, const Params& prm, const SolverControls& ctl) {
  const auto [beta, c] = detail::shot_setup(prm);
  if (!(d > 0.0) || !(d < c))
    throw DomainError("integrate_shot: initial height must lie in (0, c), got " +
                      std::to_string(d));
  const double r_max = ctl.r_max > 0.0 ? ctl.r_max : default_r_max(prm);
  const double n = static_cast<double>(prm.n());

  Trajectory tr;
  tr.d = d;
  tr.samples.push_back({0.0, d, 0.0});

  // Series start keeps (n-1)/r away from r = 0.
  const double h0 = ctl.start_h;
  const double fd = eval_f(d, prm);
  Sample first{h0, d - fd * h0 * h0 / (2.0 * n), -fd * h0 / n};
  tr.samples.push_back(first);
  if (first.du >= 0.0 && first.u < beta) {
    tr.classification = {ShotTag::Rebound, first.r, {}};
    return tr;
  }

  auto rhs = [&prm](double r, const State<2>& y) { return ode_rhs(r, y, prm); };
  StepControls sc{ctl.rtol, ctl.atol, ctl.h_min, ctl.h_max};
  DormandPrince45<2, decltype(rhs)> stepper(rhs, first.r, {first.u, first.du}, 1e-3, sc);

  AcceptedStep<2> step;
  for (std::size_t count = 0;; ++count) {
    if (count >= ctl.max_steps) {
      tr.classification = {ShotTag::Unresolved, std::nullopt,
                           "step budget of " + std::to_string(ctl.max_steps) + " exhausted"};
      return tr;
    }
    if (!stepper.advance(r_max, step)) {
      tr.classification = {ShotTag::Unresolved, std::nullopt,
                           stepper.t() >= r_max
                               ? "reached r_max = " + std::to_string(r_max)
                               : "step size underflow at r = " + std::to_string(stepper.t())};
      return tr;
    }
    const State<2>& y = step.y1;
    if (y[0] <= 0.0) {
      const Sample ev = detail::locate_event(step, [](const State<2>& s) { return s[0] <= 0.0; });
      tr.samples.push_back(ev);
      tr.classification = {ShotTag::Crossing, ev.r, {}};
      return tr;
    }
    if (y[1] >= 0.0 && y[0] < beta) {
      const Sample ev = detail::locate_event(
          step, [beta](const State<2>& s) { return s[1] >= 0.0 && s[0] < beta; });
      tr.samples.push_back(ev);
      tr.classification = {ShotTag::Rebound, ev.r, {}};
      return tr;
    }
    tr.samples.push_back({step.t1, y[0], y[1]});
    if (step.t1 >= r_max) {
      tr.classification = {ShotTag::Unresolved, std::nullopt,
                           "reached r_max = " + std::to_string(r_max)};
      return tr;
    }
  }
}

/// integrate_shot, repeated with doubled r_max while the shot stays Unresolved
/// because it ran out of radius.
inline Trajectory shoot_with_retry(double d, const Params& prm, SolverControls ctl) {
  if (!(ctl.r_max > 0.0)) ctl.r_max = default_r_max(prm);
  Trajectory tr = integrate_shot(d, prm, ctl);
  for (int k = 0; k < ctl.r_max_retries && tr.classification.tag == ShotTag::Unresolved; ++k) {
    ctl.r_max *= 2.0;
    tr = integrate_shot(d, prm, ctl);
  }
  return tr;
}

/// Initial heights bracketing the ground state: just inside (b, c).
inline Bracket shooting_bracket(const Params& prm) {
  const CriticalPoints cp = critical_points(prm);
  if (!existence_check(prm) || !cp.b || !cp.c)
    throw NoSolutionError("no positive solution: omega >= omega_p");
  return {*cp.b * (1.0 + 1e-6), *cp.c * (1.0 - 1e-6)};
}

// ---- profile reconstruction -------------------------------------------------

namespace detail {

struct Jet {
  double u, du, ddu;
};

inline double second_derivative(const Sample& s, const Params& prm) {
  return ode_rhs(s.r, {s.u, s.du}, prm)[1];
}

// Quintic Hermite through (u, u', u'') at both ends of [a.r, b.r].
inline Jet quintic_hermite(const Sample& a, double dda, const Sample& b, double ddb, double r) {
  const double h = b.r - a.r;
  const double s = (r - a.r) / h;
  const double c0 = a.u, c1 = h * a.du, c2 = 0.5 * h * h * dda;
  const double r0 = b.u - (c0 + c1 + c2);
  const double r1 = h * b.du - (c1 + 2.0 * c2);
  const double r2 = h * h * ddb - 2.0 * c2;
  const double c3 = 10.0 * r0 - 4.0 * r1 + 0.5 * r2;
  const double c4 = -15.0 * r0 + 7.0 * r1 - r2;
  const double c5 = 6.0 * r0 - 3.0 * r1 + 0.5 * r2;
  const double u = c0 + s * (c1 + s * (c2 + s * (c3 + s * (c4 + s * c5))));
  const double dus = c1 + s * (2.0 * c2 + s * (3.0 * c3 + s * (4.0 * c4 + s * 5.0 * c5)));
  const double ddus = 2.0 * c2 + s * (6.0 * c3 + s * (12.0 * c4 + s * 20.0 * c5));
  return {u, dus / h, ddus / (h * h)};
}

} // namespace detail

/// sup over interval midpoints of |u'' + ((n-1)/r) u' + f(u)|, with u reconstructed
/// piecewise by quintic Hermite interpolation of the samples.
inline double residual_sup(const std::vector<Sample>& samples, const Params& prm) {
  double sup = 0.0;
  const double n1 = static_cast<double>(prm.n() - 1);
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const Sample& a = samples[i];
    const Sample& b = samples[i + 1];
    const double rm = 0.5 * (a.r + b.r);
    const detail::Jet j = detail::quintic_hermite(a, detail::second_derivative(a, prm), b,
                                                  detail::second_derivative(b, prm), rm);
    sup = std::max(sup, std::abs(j.ddu + n1 / rm * j.du + f_odd(j.u, prm)));
  }
  return sup;
}

/// Resamples a trajectory onto `points` uniform radii over [0, r_last].
inline std::vector<Sample> resample(const std::vector<Sample>& samples, const Params& prm,
                                    std::size_t points) {
  std::vector<Sample> out;
  if (samples.size() < 2 || points < 2) return samples;
  out.reserve(points);
  const double r_end = samples.back().r;
  std::size_t seg = 0;
  for (std::size_t k = 0; k < points; ++k) {
    const double r = k + 1 == points ? r_end
                                     : r_end * static_cast<double>(k) /
                                           static_cast<double>(points - 1);
    while (seg + 2 < samples.size() && samples[seg + 1].r < r) ++seg;
    const Sample& a = samples[seg];
    const Sample& b = samples[seg + 1];
    if (r == a.r) {
      out.push_back(a);
    } else if (r == b.r) {
      out.push_back(b);
    } else {
      const detail::Jet j = detail::quintic_hermite(a, detail::second_derivative(a, prm), b,
                                                    detail::second_derivative(b, prm), r);
      out.push_back({r, j.u, j.du});
    }
  }
  return out;
}

struct GroundState {
  double d_star = 0.0;
  double bracket_width = 0.0;
  Trajectory profile;           ///< positive, decreasing part of the shot from d_star
  double residual_sup = 0.0;
};

inline GroundState find_ground_state(const Params& prm, const SolverControls& ctl = {}) {
  if (!existence_check(prm)) throw NoSolutionError("no positive solution: omega >= omega_p");
  const Bracket start = shooting_bracket(prm);

  const Trajectory low = shoot_with_retry(start.lo, prm, ctl);
  const Trajectory high = shoot_with_retry(start.hi, prm, ctl);
  if (low.classification.tag != ShotTag::Rebound || high.classification.tag != ShotTag::Crossing)
    throw BracketError(std::string("find_ground_state: bracket endpoints classify as (") +
                       std::string(to_string(low.classification.tag)) + ", " +
                       std::string(to_string(high.classification.tag)) +
                       "), expected (Rebound, Crossing)");

  // A shot that neither crosses nor rebounds within r_max tracks the ground state
  // to the end of the domain; bisection stops there.
  std::optional<double> settled;
  const Bracket br = bisect_predicate(
      [&](double d) {
        if (settled) return true;
        const ShotTag tag = shoot_with_retry(d, prm, ctl).classification.tag;
        if (tag == ShotTag::Unresolved) settled = d;
        return tag != ShotTag::Rebound;
      },
      start.lo, start.hi, ctl.d_tol);

  GroundState gs;
  gs.d_star = settled ? *settled : br.mid();
  gs.bracket_width = settled ? 0.0 : br.width();
  gs.profile = shoot_with_retry(gs.d_star, prm, ctl);

  // Keep the leading stretch where u > 0 and u strictly decreases.
  auto& s = gs.profile.samples;
  std::size_t keep = 1;
  while (keep < s.size() && s[keep].u > 0.0 && s[keep].u < s[keep - 1].u && s[keep].du < 0.0)
    ++keep;
  s.resize(keep);
  gs.residual_sup = residual_sup(s, prm);
  return gs;
}

struct MultiplicityResult {
  int count = 0;                     ///< Rebound -> Crossing transitions
  int class_changes = 0;             ///< transitions in either direction
  std::size_t unresolved = 0;
  std::vector<double> heights;
  std::vector<ShotTag> tags;
  std::vector<std::string> warnings;
};

inline MultiplicityResult multiplicity_scan(const Params& prm, std::size_t grid_size,
                                            const SolverControls& ctl = {}) {
  if (!existence_check(prm)) throw NoSolutionError("no positive solution: omega >= omega_p");
  if (grid_size < 2) throw std::invalid_argument("multiplicity_scan: grid_size must be >= 2");
  const Bracket br = shooting_bracket(prm);
  const double spacing = br.width() / static_cast<double>(grid_size - 1);

  MultiplicityResult res;
  res.heights.resize(grid_size);
  res.tags.assign(grid_size, ShotTag::Unresolved);
  std::vector<std::string> notes(grid_size);
  std::vector<std::exception_ptr> failures(grid_size);

  detail::parallel_for(grid_size, [&](std::size_t i) {
    const double d = i + 1 == grid_size ? br.hi : br.lo + static_cast<double>(i) * spacing;
    res.heights[i] = d;
    try {
      Trajectory tr = shoot_with_retry(d, prm, ctl);
      // Local refinement: nudge the height inside its cell before giving up.
      for (double offset : {0.25, -0.25}) {
        if (tr.classification.tag != ShotTag::Unresolved) break;
        const double nudged = std::clamp(d + offset * spacing, br.lo, br.hi);
        tr = shoot_with_retry(nudged, prm, ctl);
      }
      res.tags[i] = tr.classification.tag;
      if (tr.classification.tag == ShotTag::Unresolved)
        notes[i] = "unresolved shot at d = " + std::to_string(d) + ": " +
                   tr.classification.diagnostic;
    } catch (...) {
      failures[i] = std::current_exception();
    }
  });
  for (std::size_t i = 0; i < grid_size; ++i) {
    if (failures[i]) {
      try {
        std::rethrow_exception(failures[i]);
      } catch (const std::exception& e) {
        notes[i] = "integration failed at d = " + std::to_string(res.heights[i]) + ": " + e.what();
      }
    }
    if (!notes[i].empty()) res.warnings.push_back(notes[i]);
  }

  if (res.tags.back() == ShotTag::Rebound)
    res.warnings.push_back("upper end of the bracket does not overshoot: the ground state lies "
                           "closer to c than c(1 - 1e-6)");

  std::optional<ShotTag> prev;
  for (ShotTag t : res.tags) {
    if (t == ShotTag::Unresolved) {
      ++res.unresolved;
      continue;
    }
    if (prev && *prev != t) {
      ++res.class_changes;
      if (*prev == ShotTag::Rebound) ++res.count;
    }
    prev = t;
  }
  return res;
}

} // namespace dpower
