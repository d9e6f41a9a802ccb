#pragma once

// Existence test and the uniqueness pipeline built on the Peletier-Serrin
// hypotheses (H1)-(H3) for the double-power nonlinearity.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "dpower/bisect.hpp"
#include "dpower/nonlinearity.hpp"
#include "dpower/params.hpp"

namespace dpower {

enum class Classification { NoSolution, UniqueByBasic, UniqueByExtended, Undetermined };

inline constexpr std::string_view to_string(Classification c) noexcept {
  switch (c) {
    case Classification::NoSolution: return "NoSolution";
    case Classification::UniqueByBasic: return "UniqueByBasic";
    case Classification::UniqueByExtended: return "UniqueByExtended";
    case Classification::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

inline std::optional<Classification> classification_from_string(std::string_view s) noexcept {
  for (auto c : {Classification::NoSolution, Classification::UniqueByBasic,
                 Classification::UniqueByExtended, Classification::Undetermined})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

/// A positive solution exists iff 0 < omega < omega_p (open on both ends).
inline bool existence_check(const Params& prm) {
  return prm.omega() > 0.0 && prm.omega() < omega_p(prm.p());
}

namespace detail {

inline double require_beta(const CriticalPoints& cp) {
  if (!cp.beta) throw DomainError("beta is undefined for omega >= omega_p");
  return *cp.beta;
}

inline double k_at(double u, double beta, const Params& prm) {
  return eval_f1(u, prm) * (u - beta) - eval_f(u, prm);
}

} // namespace detail

/// k(u) = f'(u)(u - beta) - f(u). G = f/(u - beta) is nonincreasing where k <= 0.
inline double k_function(double u, const Params& prm) {
  const double beta = detail::require_beta(critical_points(prm));
  return detail::k_at(u, beta, prm);
}

/// k'(u) = f''(u)(u - beta).
inline double k_derivative(double u, const Params& prm) {
  const double beta = detail::require_beta(critical_points(prm));
  return eval_f2(u, prm) * (u - beta);
}

/// omega >= a_p, equivalently alpha <= beta.
inline bool basic_criterion(const Params& prm) {
  const bool holds = prm.omega() >= a_p(prm.p());
  const CriticalPoints cp = critical_points(prm);
  if (cp.beta) {
    // Geometric form. Only disagreements beyond rounding are reported.
    const bool geometric = cp.alpha <= *cp.beta;
    if (geometric != holds && std::abs(cp.alpha - *cp.beta) > 1e-12 * cp.alpha)
      throw std::logic_error("basic_criterion: omega >= a_p disagrees with alpha <= beta");
  }
  return holds;
}

struct ExtendedResult {
  bool holds = false;
  double k_alpha = 0.0;
  /// alpha - f(alpha)/f'(alpha); only formed when f'(alpha) > 0.
  std::optional<double> newton_point;
};

/// k(alpha) <= 0, the condition that covers alpha > beta. Requires alpha > beta.
inline ExtendedResult extended_criterion(const Params& prm) {
  const CriticalPoints cp = critical_points(prm);
  const double beta = detail::require_beta(cp);
  if (!(cp.alpha > beta))
    throw std::invalid_argument("extended_criterion: requires alpha > beta (omega < a_p)");

  ExtendedResult out;
  const double slope = eval_f1(cp.alpha, prm);
  out.k_alpha = slope * (cp.alpha - beta) - eval_f(cp.alpha, prm);
  out.holds = out.k_alpha <= 0.0;
  if (slope > 0.0) out.newton_point = cp.alpha - eval_f(cp.alpha, prm) / slope;
  return out;
}

/// Samples G(u) = f(u)/(u - beta) on grid_size interior points of (beta(1 + 1e-8), c)
/// and reports whether consecutive differences stay <= 1e-10.
inline bool g_monotone_scan(const Params& prm, std::size_t grid_size) {
  const CriticalPoints cp = critical_points(prm);
  if (!cp.beta || !cp.c || grid_size == 0) return false;
  const double beta = *cp.beta;
  const double lo = beta * (1.0 + 1e-8);
  const double hi = *cp.c;
  const double step = (hi - lo) / static_cast<double>(grid_size + 1);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i <= grid_size; ++i) {
    const double u = lo + static_cast<double>(i) * step;
    const double g = eval_f(u, prm) / (u - beta);
    if (g - prev > 1e-10) return false;
    prev = g;
  }
  return true;
}

/// Largest value of k over `samples` interior points of (beta, c).
inline std::optional<double> k_grid_max(const Params& prm, std::size_t samples = 1000) {
  const CriticalPoints cp = critical_points(prm);
  if (!cp.beta || !cp.c || samples == 0) return std::nullopt;
  const double lo = *cp.beta;
  const double step = (*cp.c - lo) / static_cast<double>(samples + 1);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i <= samples; ++i)
    best = std::max(best, detail::k_at(lo + static_cast<double>(i) * step, lo, prm));
  return best;
}

inline constexpr std::size_t kDefaultScanGrid = 1000;

struct CriterionReport {
  double p = 0.0;
  double omega = 0.0;
  CriticalPoints points;
  bool exists = false;
  double h1_limit = 0.0;                 ///< lim f(u)/u as u -> 0+
  std::optional<double> h2_witness;      ///< a point where F > 0
  bool basic_holds = false;
  std::optional<bool> extended_holds;    ///< only evaluated when alpha > beta
  std::optional<double> k_alpha;
  std::optional<double> newton_point;
  std::optional<double> k_grid_max;      ///< cross-check of k(alpha) as the max of k
  bool g_scan_monotone = false;          ///< advisory, not used for the verdict
  Classification classification = Classification::NoSolution;

  friend bool operator==(const CriterionReport&, const CriterionReport&) = default;
};

inline CriterionReport classify(const Params& prm) {
  CriterionReport r;
  r.p = prm.p();
  r.omega = prm.omega();
  r.points = critical_points(prm);
  r.exists = existence_check(prm);
  r.h1_limit = h1_limit(prm);
  if (!r.exists) {
    r.classification = Classification::NoSolution;
    return r;
  }
  r.h2_witness = h2_witness(prm);
  r.basic_holds = basic_criterion(prm);
  r.k_grid_max = k_grid_max(prm);
  r.g_scan_monotone = g_monotone_scan(prm, kDefaultScanGrid);
  if (r.basic_holds) {
    r.classification = Classification::UniqueByBasic;
    return r;
  }
  const ExtendedResult ext = extended_criterion(prm);
  r.extended_holds = ext.holds;
  r.k_alpha = ext.k_alpha;
  r.newton_point = ext.newton_point;
  r.classification = ext.holds ? Classification::UniqueByExtended : Classification::Undetermined;
  return r;
}

/// Probe points used to validate the omega* bracket, as fractions of a_p.
inline constexpr double kOmegaStarLowFraction = 1e-3;
inline constexpr double kOmegaStarHighFraction = 1.0 - 1e-6;

/// k(alpha) as a function of omega, for omega in (0, a_p).
inline double k_alpha_of_omega(double p, double omega) {
  return extended_criterion(Params(1, p, omega)).k_alpha;
}

/// The omega in (0, a_p) where k(alpha) changes sign: below it the extended
/// criterion fails, above it holds. Bisection to bracket width `tol`.
inline double find_omega_star(double p, double tol = 1e-10) {
  const double ap = a_p(p);
  const double lo = kOmegaStarLowFraction * ap;
  const double hi = kOmegaStarHighFraction * ap;
  const double k_lo = k_alpha_of_omega(p, lo);
  const double k_hi = k_alpha_of_omega(p, hi);
  if (!(k_lo > 0.0) || !(k_hi < 0.0))
    throw BracketError("find_omega_star: expected k(alpha) > 0 at omega = " + std::to_string(lo) +
                       " and < 0 at omega = " + std::to_string(hi) + ", got " +
                       std::to_string(k_lo) + " and " + std::to_string(k_hi));
  const Bracket br = bisect_predicate(
      [p](double w) { return k_alpha_of_omega(p, w) <= 0.0; }, lo, hi, tol);
  return br.mid();
}

} // namespace dpower
