#pragma once

#include "hetnet/model.hpp"

namespace hetnet {

/// Same-tier interference integral under Rayleigh fading,
///   rho(tau, alpha) = tau^(2/alpha) * int_{tau^(-2/alpha)}^inf du / (1 + u^(alpha/2)).
[[nodiscard]] double rho(double tau, double alpha, const QuadratureSpec& quad = {});

/// Cross-tier interference integral for the shared-spectrum variant; lower
/// limit (bias_ratio / tau)^(2/alpha). Decreasing in bias_ratio.
[[nodiscard]] double z_interference(double tau, double alpha, double bias_ratio,
                                    const QuadratureSpec& quad = {});

/// a(theta) = 2 cos(theta) (pi - theta) + sin(theta).
[[nodiscard]] double direction_factor(double theta) noexcept;

/// Area of the region newly swept when the user at connection distance r moves
/// v at angle theta: |A| - |A n C|, with C the disc of radius r about the old
/// position and A the disc about the new position through the serving AP.
[[nodiscard]] double excess_area(double r, double v, double theta);

/// P(handoff | r, theta) = 1 - exp(-density * excess_area(r, v, theta)).
[[nodiscard]] double handoff_prob_conditional(double density, double r, double v, double theta);

/// Handoff rate averaged over the nearest-AP distance and the profile's angle
/// distribution, using the exact swept-area geometry (double integral for
/// UniformAngle, single r-integral for FixedAngle).
[[nodiscard]] double handoff_rate_exact(double density, const MobilityProfile& profile,
                                        const QuadratureSpec& quad = {});

/// Closed form for radial motion (theta = 0).
[[nodiscard]] double handoff_rate_radial(double density, double v);

/// Small-displacement approximation (v << R) for uniform theta.
[[nodiscard]] double handoff_rate_approx(double density, double v, const QuadratureSpec& quad = {});

/// (1/pi) int_0^pi gauss_bracket(b) exp(-density v^2 (pi - theta)) dtheta with
/// b = v a(theta) / (2 pi) * sqrt(pi density / denom). This is the theta-average
/// shared by the small-displacement handoff rate (denom = 1) and the mobile
/// coverage terms (denom = 1 + rho, or 1/A + rho for multi-tier). FixedAngle
/// profiles evaluate the integrand at their angle instead of averaging.
[[nodiscard]] double mobility_factor(double density, const MobilityProfile& profile, double denom,
                                     const QuadratureSpec& quad = {});

/// P(SIR >= tau | r) = exp(-pi density r^2 rho(tau, alpha)).
[[nodiscard]] double coverage_given_distance(double density, double r, double tau, double alpha);

/// Interference-limited single-tier coverage 1 / (1 + rho); no density or power dependence.
[[nodiscard]] double coverage_stationary(double tau, double alpha);

/// Single-tier coverage with the linear handoff cost
///   (1 - beta) P(cov) + beta P(cov, no handoff)
/// using the small-displacement no-handoff probability.
[[nodiscard]] double coverage_mobile_single_tier(double density, const MobilityProfile& profile,
                                                 double beta, double tau, double alpha,
                                                 const QuadratureSpec& quad = {});

/// Diagnostic: the same cost model with the exact swept-area no-handoff
/// probability (double integral), still treating coverage and handoff as
/// conditionally independent given r.
[[nodiscard]] double coverage_mobile_single_tier_exact_geometry(double density,
                                                                const MobilityProfile& profile,
                                                                double beta, double tau,
                                                                double alpha,
                                                                const QuadratureSpec& quad = {});

/// Nearest-AP distance density 2 pi density r exp(-pi density r^2).
[[nodiscard]] double nearest_distance_pdf(double density, double r) noexcept;

/// Radius beyond which the nearest-AP tail mass exp(-pi density r^2) < 1e-12.
[[nodiscard]] double nearest_distance_cutoff(double density) noexcept;

}  // namespace hetnet
