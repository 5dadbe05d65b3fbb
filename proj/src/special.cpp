#include "hetnet/special.hpp"

#include <cmath>
#include <numbers>

namespace hetnet {

namespace {

constexpr double kContinuedFractionCut = 5.0;
constexpr int kContinuedFractionTerms = 80;

// Laplace continued fraction for x >= kContinuedFractionCut:
//   sqrt(pi) erfcx(x) = 1 / (x + (1/2) / (x + (2/2) / (x + (3/2) / ...)))
// Returns the tail s = (1/2) / (x + ...) so callers can form x + s or s / (x + s)
// without cancellation.
double continued_fraction_tail(double x) noexcept {
    double t = x;
    for (int n = kContinuedFractionTerms; n >= 2; --n) {
        t = x + (0.5 * n) / t;
    }
    return 0.5 / t;
}

}  // namespace

double q_function(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double erfcx(double x) noexcept {
    if (x < 0.0) {
        return 2.0 * std::exp(x * x) - erfcx(-x);
    }
    if (x < kContinuedFractionCut) {
        return std::exp(x * x) * std::erfc(x);
    }
    const double s = continued_fraction_tail(x);
    return std::numbers::inv_sqrtpi / (x + s);
}

double scaled_gauss_tail(double b) noexcept { return 0.5 * erfcx(b); }

double gauss_bracket(double b) noexcept {
    if (b < kContinuedFractionCut) {
        return 1.0 - b * (1.0 / std::numbers::inv_sqrtpi) * erfcx(b);
    }
    const double s = continued_fraction_tail(b);
    return s / (b + s);
}

}  // namespace hetnet
