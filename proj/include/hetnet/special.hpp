#pragma once

namespace hetnet {

/// Upper-tail standard normal probability Q(x) = P(N(0,1) > x).
[[nodiscard]] double q_function(double x) noexcept;

/// Scaled complementary error function erfcx(x) = exp(x^2) erfc(x).
/// Finite for every x >= -26; grows like 2 exp(x^2) for negative x.
[[nodiscard]] double erfcx(double x) noexcept;

/// exp(b^2) Q(sqrt(2) b), the factor shared by the small-displacement handoff
/// and mobile-coverage integrands. Equals erfcx(b) / 2; never overflows for
/// b >= 0 and is defined for negative b as well (a(theta) can be negative).
[[nodiscard]] double scaled_gauss_tail(double b) noexcept;

/// 1 - 2 b sqrt(pi) exp(b^2) Q(sqrt(2) b), evaluated without the cancellation
/// the direct form suffers for large b. This is the closed form of
/// int_0^inf 2 s exp(-s^2 - 2 b s) ds.
[[nodiscard]] double gauss_bracket(double b) noexcept;

}  // namespace hetnet
