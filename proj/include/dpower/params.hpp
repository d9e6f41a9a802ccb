#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace dpower {

/// Raised when an argument lies outside the domain of a formula
/// (negative base under a fractional power, p too close to 1, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Raised when a numerical procedure cannot establish or keep its bracket.
class BracketError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Smallest accepted exponent. Exponents 1/(p-1) blow up as p -> 1.
inline constexpr double kMinExponent = 1.0 + 1e-9;

/// Problem triple (n, p, omega) for  u'' + (n-1)/r u' - omega u + u^p - u^(2p-1) = 0.
class Params {
public:
  Params(int n, double p, double omega) : n_(n), p_(p), omega_(omega) {
    if (n < 1)
      throw DomainError("dimension n must be >= 1, got " + std::to_string(n));
    if (!std::isfinite(p) || !(p > kMinExponent))
      throw DomainError("exponent p must satisfy p > 1, got " + std::to_string(p));
    if (!std::isfinite(omega) || !(omega > 0.0))
      throw DomainError("frequency omega must be > 0, got " + std::to_string(omega));
  }

  int n() const noexcept { return n_; }
  double p() const noexcept { return p_; }
  double omega() const noexcept { return omega_; }

  Params with_omega(double omega) const { return {n_, p_, omega}; }

  friend bool operator==(const Params&, const Params&) = default;

private:
  int n_;
  double p_;
  double omega_;
};

namespace detail {

inline void require_exponent(double p) {
  if (!std::isfinite(p) || !(p > kMinExponent))
    throw DomainError("exponent p must satisfy p > 1, got " + std::to_string(p));
}

/// u^e for u >= 0, e > 0, via exp(e ln u); u == 0 is short-circuited.
inline double upow(double u, double e) noexcept {
  if (u == 0.0) return 0.0;
  return std::exp(e * std::log(u));
}

} // namespace detail
} // namespace dpower
