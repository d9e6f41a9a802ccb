#pragma once

// The double-power nonlinearity f(u) = -omega u + u^p - u^(2p-1), its
// primitive F, its derivatives, and the closed-form critical constants.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "dpower/params.hpp"

namespace dpower {

namespace detail {

inline void require_nonnegative(double u, const char* what) {
  if (!(u >= 0.0))
    throw DomainError(std::string(what) + ": u must be >= 0, got " + std::to_string(u));
}

inline void require_positive(double u, const char* what) {
  if (!(u > 0.0))
    throw DomainError(std::string(what) + ": u must be > 0, got " + std::to_string(u));
}

} // namespace detail

/// f(u) = -omega u + u^p - u^(2p-1).
inline double eval_f(double u, const Params& prm) {
  detail::require_nonnegative(u, "eval_f");
  const double t = detail::upow(u, prm.p() - 1.0);
  return u * (-prm.omega() + t - t * t);
}

/// F(u) = -(omega/2) u^2 + u^(p+1)/(p+1) - u^(2p)/(2p), the primitive of f with F(0) = 0.
inline double eval_F(double u, const Params& prm) {
  detail::require_nonnegative(u, "eval_F");
  const double p = prm.p();
  const double t = detail::upow(u, p - 1.0);
  return u * u * (-0.5 * prm.omega() + t / (p + 1.0) - t * t / (2.0 * p));
}

/// Same quantity written as u^2/(2p(p+1)) [-omega p(p+1) + 2p u^(p-1) - (p+1) u^(2(p-1))].
inline double eval_F_factored(double u, const Params& prm) {
  detail::require_nonnegative(u, "eval_F_factored");
  const double p = prm.p();
  const double t = detail::upow(u, p - 1.0);
  const double bracket = -prm.omega() * p * (p + 1.0) + 2.0 * p * t - (p + 1.0) * t * t;
  return u * u / (2.0 * p * (p + 1.0)) * bracket;
}

/// f'(u) = -omega + p u^(p-1) - (2p-1) u^(2(p-1)).
inline double eval_f1(double u, const Params& prm) {
  detail::require_positive(u, "eval_f1");
  const double p = prm.p();
  const double t = detail::upow(u, p - 1.0);
  return -prm.omega() + p * t - (2.0 * p - 1.0) * t * t;
}

/// f''(u) = 2(p-1)(2p-1) u^(p-2) [p/(2(2p-1)) - u^(p-1)].
inline double eval_f2(double u, const Params& prm) {
  detail::require_positive(u, "eval_f2");
  const double p = prm.p();
  const double t = detail::upow(u, p - 1.0);
  return 2.0 * (p - 1.0) * (2.0 * p - 1.0) * (t / u) * (p / (2.0 * (2.0 * p - 1.0)) - t);
}

/// Existence threshold p/(p+1)^2.
inline double omega_p(double p) {
  detail::require_exponent(p);
  return p / ((p + 1.0) * (p + 1.0));
}

/// Uniqueness threshold p(7p-5) / (4(p+1)(2p-1)^2).
inline double a_p(double p) {
  detail::require_exponent(p);
  const double q = 2.0 * p - 1.0;
  return p * (7.0 * p - 5.0) / (4.0 * (p + 1.0) * q * q);
}

struct CriticalPoints {
  double omega_p = 0.0;
  double a_p = 0.0;
  double alpha = 0.0;           ///< unique zero of f'' on (0, inf)
  std::optional<double> b;      ///< first zero of f, present iff omega < 1/4
  std::optional<double> c;      ///< last zero of f, present iff omega < 1/4
  std::optional<double> beta;   ///< first zero of F, present iff omega < omega_p

  friend bool operator==(const CriticalPoints&, const CriticalPoints&) = default;
};

/// Tolerance used to validate closed-form constants against their defining equations.
inline constexpr double kResidualTol = 1e-10;

inline CriticalPoints critical_points(const Params& prm) {
  const double p = prm.p();
  const double w = prm.omega();
  const double inv = 1.0 / (p - 1.0);

  CriticalPoints cp;
  cp.omega_p = omega_p(p);
  cp.a_p = a_p(p);
  cp.alpha = detail::upow(p / (2.0 * (2.0 * p - 1.0)), inv);

  // Roots of t^2 - t + omega in t = u^(p-1); the small root in cancellation-free form.
  if (w < 0.25) {
    const double s = std::sqrt(1.0 - 4.0 * w);
    cp.b = detail::upow(2.0 * w / (1.0 + s), inv);
    cp.c = detail::upow(0.5 * (1.0 + s), inv);
  }
  // Small root of (p+1) t^2 - 2p t + omega p(p+1), same treatment.
  if (w < cp.omega_p) {
    const double x = (p + 1.0) * (p + 1.0) * w / p;
    const double t = p / (p + 1.0) * x / (1.0 + std::sqrt(1.0 - x));
    cp.beta = detail::upow(t, inv);
  }

  auto check = [](double residual, const char* name) {
    if (!(std::abs(residual) < kResidualTol))
      throw std::runtime_error(std::string("critical_points: residual of ") + name +
                               " is " + std::to_string(residual));
  };
  // Residuals are taken on the scaled forms f''/(prefactor u^(p-2)), f/u and F/u^2,
  // which stay O(1) even when the constants are tiny.
  check(p / (2.0 * (2.0 * p - 1.0)) - detail::upow(cp.alpha, p - 1.0), "alpha");
  if (cp.b && *cp.b > 0.0) check(eval_f(*cp.b, prm) / *cp.b, "b");
  if (cp.c) check(eval_f(*cp.c, prm) / *cp.c, "c");
  if (cp.beta && *cp.beta > 0.0) check(eval_F(*cp.beta, prm) / (*cp.beta * *cp.beta), "beta");
  return cp;
}

/// A concrete point where F > 0: the midpoint of (beta, c).
inline std::optional<double> h2_witness(const Params& prm) {
  const CriticalPoints cp = critical_points(prm);
  if (!cp.beta || !cp.c) return std::nullopt;
  return 0.5 * (*cp.beta + *cp.c);
}

/// lim_{u->0+} f(u)/u.
inline double h1_limit(const Params& prm) noexcept { return -prm.omega(); }

/// Number of sign changes of F over (0, inf), scanned on `points` nodes
/// uniform in t = u^(p-1) over (0, 2]. F < 0 once t >= 2p/(p+1), and 2p/(p+1) < 2,
/// so every positive zero lies inside the scanned range.
inline int count_F_sign_changes(const Params& prm, std::size_t points = 10000) {
  const double inv = 1.0 / (prm.p() - 1.0);
  int changes = 0;
  int last_sign = 0;
  for (std::size_t i = 1; i <= points; ++i) {
    const double t = 2.0 * static_cast<double>(i) / static_cast<double>(points);
    const double value = eval_F(detail::upow(t, inv), prm);
    if (!std::isfinite(value) || value == 0.0) continue;
    const int sign = value > 0.0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) ++changes;
    last_sign = sign;
  }
  return changes;
}

} // namespace dpower
