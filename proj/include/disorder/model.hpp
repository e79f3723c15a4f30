#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "disorder/errors.hpp"

namespace disorder {

// Problem instance. The observed Wiener process gains drift mu at an
// unobservable disorder time that coincides with one of the arrivals of an
// observed Poisson(lambda) shock process; each arrival carries the disorder
// with probability p, and pi0 is the prior probability that the disorder is
// already present at time zero.
struct ModelParams {
  double mu = 1.0;      // post-disorder drift, != 0
  double lambda = 2.0;  // shock arrival rate, > 0
  double p = 0.5;       // per-arrival disorder probability, in (0,1]
  double c = 0.5;       // delay cost rate, >= 0; zero is legal only for the
                        // false-alarm operator
  double pi0 = 0.0;     // prior disorder probability, in [0,1]

  void validate(bool allow_zero_cost = false) const {
    if (!std::isfinite(mu) || mu == 0.0)
      throw domain_error("ModelParams: mu must be finite and nonzero");
    if (!std::isfinite(lambda) || lambda <= 0.0)
      throw domain_error("ModelParams: lambda must be positive");
    if (!std::isfinite(p) || p <= 0.0 || p > 1.0)
      throw domain_error("ModelParams: p must lie in (0,1]");
    if (!std::isfinite(c) || c < 0.0)
      throw domain_error("ModelParams: c must be nonnegative");
    if (c == 0.0 && !allow_zero_cost)
      throw domain_error(
          "ModelParams: c = 0 is admissible only inside the false-alarm "
          "operator");
    if (!std::isfinite(pi0) || pi0 < 0.0 || pi0 > 1.0)
      throw domain_error("ModelParams: pi0 must lie in [0,1]");
  }
};

// Roots of the quadratic m(m-1) = 2 lambda / mu^2.
// m1 > 1, m2 < 0, and m1 + m2 = 1.
struct Roots {
  double m1;
  double m2;
};

inline Roots compute_roots(const ModelParams& params) {
  params.validate(/*allow_zero_cost=*/true);
  const double q = 2.0 * params.lambda / (params.mu * params.mu);
  const double disc = std::sqrt(1.0 + 4.0 * q);
  return Roots{0.5 * (1.0 + disc), 0.5 * (1.0 - disc)};
}

namespace detail {

// Arguments of the eigenfunctions are floored away from {0,1} so that the
// log-space evaluation below stays finite; (1-pi)^(1-m1) overflows near 1
// if evaluated naively.
inline constexpr double kUnitFloor = 1e-12;

inline double clamp_unit(double pi) {
  return std::min(std::max(pi, kUnitFloor), 1.0 - kUnitFloor);
}

inline void require_open_unit(double pi, const char* where) {
  if (!(pi > 0.0 && pi < 1.0))
    throw domain_error(std::string(where) + ": argument must lie in (0,1)");
}

}  // namespace detail

// Increasing solution of (1/2) mu^2 pi^2 (1-pi)^2 f'' = lambda f:
// psi(pi) = pi^m1 (1-pi)^(1-m1), evaluated in log space.
inline double psi(double pi, const Roots& roots) {
  detail::require_open_unit(pi, "psi");
  const double x = detail::clamp_unit(pi);
  return std::exp(roots.m1 * std::log(x) + (1.0 - roots.m1) * std::log1p(-x));
}

// Decreasing solution: eta(pi) = pi^m2 (1-pi)^(1-m2).
inline double eta(double pi, const Roots& roots) {
  detail::require_open_unit(pi, "eta");
  const double x = detail::clamp_unit(pi);
  return std::exp(roots.m2 * std::log(x) + (1.0 - roots.m2) * std::log1p(-x));
}

inline double psi_prime(double pi, const Roots& roots) {
  detail::require_open_unit(pi, "psi_prime");
  const double x = detail::clamp_unit(pi);
  return psi(x, roots) * (roots.m1 - x) / (x * (1.0 - x));
}

inline double eta_prime(double pi, const Roots& roots) {
  detail::require_open_unit(pi, "eta_prime");
  const double x = detail::clamp_unit(pi);
  return eta(x, roots) * (roots.m2 - x) / (x * (1.0 - x));
}

// Second derivatives; note m1(m1-1) = m2(m2-1) = 2 lambda / mu^2, so both
// satisfy f'' = m1(m1-1) f / (pi(1-pi))^2.
inline double psi_second(double pi, const Roots& roots) {
  detail::require_open_unit(pi, "psi_second");
  const double x = detail::clamp_unit(pi);
  const double s = x * (1.0 - x);
  return psi(x, roots) * roots.m1 * (roots.m1 - 1.0) / (s * s);
}

inline double eta_second(double pi, const Roots& roots) {
  detail::require_open_unit(pi, "eta_second");
  const double x = detail::clamp_unit(pi);
  const double s = x * (1.0 - x);
  return eta(x, roots) * roots.m1 * (roots.m1 - 1.0) / (s * s);
}

// Post-arrival update of the conditional probability: S(pi) = pi + p(1-pi).
inline double jump_map(double pi, double p) {
  if (!(pi >= 0.0 && pi <= 1.0))
    throw domain_error("jump_map: argument must lie in [0,1]");
  return pi + p * (1.0 - pi);
}

// Running delay cost g(pi) = c pi.
inline double cost_g(double pi, double c) { return c * pi; }

// Terminal (false alarm) cost h(pi) = 1 - pi.
inline double cost_h(double pi) { return 1.0 - pi; }

// Squared volatility of the no-arrival diffusion: sigma^2(y) = mu^2 y^2 (1-y)^2.
inline double sigma_sq(double y, const ModelParams& params) {
  const double s = y * (1.0 - y);
  return params.mu * params.mu * s * s;
}

}  // namespace disorder
