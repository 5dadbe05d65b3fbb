#include "hetnet/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hetnet/quadrature.hpp"
#include "hetnet/special.hpp"

namespace hetnet {

namespace {

constexpr double kPi = std::numbers::pi;

// sqrt(12 ln 10): nearest-AP tail exp(-s^2) < 1e-12 beyond this scaled radius.
const double kScaledCutoff = std::sqrt(12.0 * std::numbers::ln10);

void check_exponent(double alpha) {
    if (!(alpha > 2.0) || !std::isfinite(alpha)) {
        throw DomainError("interference integral diverges for path-loss exponent <= 2");
    }
}

void check_density(double density) {
    if (!(density > 0.0) || !std::isfinite(density)) {
        throw DomainError("density must be positive");
    }
}

void check_beta(double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw DomainError("beta must lie in [0, 1]");
    }
}

// With u = L t^(-2/(alpha-2)) the tail integral collapses to
//   (2/(alpha-2)) * scale * int_0^1 dt / (t^(alpha/(alpha-2)) + offset)
// which is bounded and smooth on [0, 1] for every alpha > 2.
double mapped_tail(double alpha, double scale, double offset, const QuadratureSpec& quad,
                   const char* context) {
    const double p = 2.0 / (alpha - 2.0);
    const double q = alpha / (alpha - 2.0);
    auto f = [&](double t) { return 1.0 / (std::pow(t, q) + offset); };
    const double integral = require_converged(integrate(f, 0.0, 1.0, quad), context);
    return p * scale * integral;
}

// int_0^cutoff 2 s exp(-s^2 (1 + extra)) exp(-density * excess(s / c, v, theta)) ds
double exact_inner(double density, double v, double theta, double extra,
                   const QuadratureSpec& quad) {
    const double c = std::sqrt(kPi * density);
    auto f = [&](double s) {
        const double r = s / c;
        return 2.0 * s * std::exp(-s * s * (1.0 + extra) - density * excess_area(r, v, theta));
    };
    // The swept area has a kink where the new position passes the serving AP's
    // closest approach (r = -v cos(theta)); split there.
    const double kink = -v * std::cos(theta) * c;
    if (kink > 0.0 && kink < kScaledCutoff) {
        const auto left = integrate(f, 0.0, kink, quad);
        const auto right = integrate(f, kink, kScaledCutoff, quad);
        QuadResult joined{left.value + right.value, left.error + right.error,
                          left.intervals + right.intervals, left.converged && right.converged};
        return require_converged(joined, "no-handoff radial integral");
    }
    return require_converged(integrate(f, 0.0, kScaledCutoff, quad), "no-handoff radial integral");
}

// E_theta E_r [ exp(-pi density r^2 extra) P(no handoff | r, theta) ]
double exact_no_handoff(double density, const MobilityProfile& profile, double extra,
                        const QuadratureSpec& quad) {
    if (const auto* fixed = std::get_if<FixedAngle>(&profile.direction)) {
        return exact_inner(density, profile.v, fixed->theta, extra, quad);
    }
    auto outer = [&](double theta) { return exact_inner(density, profile.v, theta, extra, quad); };
    return require_converged(integrate(outer, 0.0, kPi, quad), "no-handoff angular integral") / kPi;
}

}  // namespace

double rho(double tau, double alpha, const QuadratureSpec& quad) {
    check_exponent(alpha);
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw DomainError("SIR threshold must be positive");
    }
    // scale = tau^(2/alpha) * L with L = tau^(-2/alpha); offset = L^(alpha/2) = 1/tau.
    return mapped_tail(alpha, 1.0, 1.0 / tau, quad, "rho");
}

double z_interference(double tau, double alpha, double bias_ratio, const QuadratureSpec& quad) {
    check_exponent(alpha);
    if (!(tau > 0.0) || !(bias_ratio > 0.0)) {
        throw DomainError("threshold and bias ratio must be positive");
    }
    // L = (B/tau)^(2/alpha): scale = tau^(2/alpha) L = B^(2/alpha); offset = B/tau.
    return mapped_tail(alpha, std::pow(bias_ratio, 2.0 / alpha), bias_ratio / tau, quad,
                       "z_interference");
}

double direction_factor(double theta) noexcept {
    return 2.0 * std::cos(theta) * (kPi - theta) + std::sin(theta);
}

double excess_area(double r, double v, double theta) {
    if (!(r >= 0.0) || !(v >= 0.0)) {
        throw DomainError("distances must be nonnegative");
    }
    if (!(theta >= 0.0 && theta <= kPi)) {
        throw DomainError("movement angle must lie in [0, pi]");
    }
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const double shift = v * v + 2.0 * r * v * ct;  // R^2 - r^2
    const double big_r2 = std::max(0.0, r * r + shift);
    // Angle at the serving AP between the old and new user positions. atan2
    // keeps the obtuse branch when r + v cos(theta) < 0.
    const double phi = (big_r2 > 0.0) ? std::atan2(v * st, r + v * ct) : 0.0;
    const double area = shift * (kPi - theta) + big_r2 * phi + r * v * st;
    return std::max(0.0, area);
}

double handoff_prob_conditional(double density, double r, double v, double theta) {
    if (!(density >= 0.0)) {
        throw DomainError("density must be nonnegative");
    }
    return -std::expm1(-density * excess_area(r, v, theta));
}

double handoff_rate_exact(double density, const MobilityProfile& profile,
                          const QuadratureSpec& quad) {
    check_density(density);
    profile.validate();
    quad.validate();
    if (profile.v == 0.0) {
        return 0.0;
    }
    return std::clamp(1.0 - exact_no_handoff(density, profile, 0.0, quad), 0.0, 1.0);
}

double handoff_rate_radial(double density, double v) {
    check_density(density);
    if (!(v >= 0.0)) {
        throw DomainError("displacement must be nonnegative");
    }
    const double stay = std::exp(-density * v * v * kPi) -
                        2.0 * v * kPi * std::sqrt(density) * q_function(v * std::sqrt(2.0 * kPi * density));
    return std::clamp(1.0 - stay, 0.0, 1.0);
}

double mobility_factor(double density, const MobilityProfile& profile, double denom,
                       const QuadratureSpec& quad) {
    check_density(density);
    profile.validate();
    if (!(denom > 0.0)) {
        throw DomainError("mobility factor denominator must be positive");
    }
    const double v = profile.v;
    if (v == 0.0) {
        return 1.0;
    }
    const double gain = v / (2.0 * kPi) * std::sqrt(kPi * density / denom);
    auto g = [&](double theta) {
        return gauss_bracket(gain * direction_factor(theta)) *
               std::exp(-density * v * v * (kPi - theta));
    };
    if (const auto* fixed = std::get_if<FixedAngle>(&profile.direction)) {
        return g(fixed->theta);
    }
    quad.validate();
    return require_converged(integrate(g, 0.0, kPi, quad), "mobility factor") / kPi;
}

double handoff_rate_approx(double density, double v, const QuadratureSpec& quad) {
    return std::clamp(1.0 - mobility_factor(density, MobilityProfile::isotropic(v), 1.0, quad),
                      0.0, 1.0);
}

double coverage_given_distance(double density, double r, double tau, double alpha) {
    if (!(r >= 0.0)) {
        throw DomainError("distance must be nonnegative");
    }
    return std::exp(-kPi * density * r * r * rho(tau, alpha));
}

double coverage_stationary(double tau, double alpha) { return 1.0 / (1.0 + rho(tau, alpha)); }

double coverage_mobile_single_tier(double density, const MobilityProfile& profile, double beta,
                                   double tau, double alpha, const QuadratureSpec& quad) {
    check_beta(beta);
    const double denom = 1.0 + rho(tau, alpha, quad);
    if (beta == 0.0 || profile.v == 0.0) {
        profile.validate();
        return 1.0 / denom;
    }
    return ((1.0 - beta) + beta * mobility_factor(density, profile, denom, quad)) / denom;
}

double coverage_mobile_single_tier_exact_geometry(double density, const MobilityProfile& profile,
                                                  double beta, double tau, double alpha,
                                                  const QuadratureSpec& quad) {
    check_beta(beta);
    check_density(density);
    profile.validate();
    const double rh = rho(tau, alpha, quad);
    const double stationary = 1.0 / (1.0 + rh);
    if (beta == 0.0 || profile.v == 0.0) {
        return stationary;
    }
    return (1.0 - beta) * stationary + beta * exact_no_handoff(density, profile, rh, quad);
}

double nearest_distance_pdf(double density, double r) noexcept {
    return 2.0 * kPi * density * r * std::exp(-kPi * density * r * r);
}

double nearest_distance_cutoff(double density) noexcept {
    return kScaledCutoff / std::sqrt(kPi * density);
}

}  // namespace hetnet
