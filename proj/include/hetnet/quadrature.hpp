#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "hetnet/model.hpp"

namespace hetnet {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t intervals = 0;
    bool converged = false;
};

/// Throws NumericalError (carrying value and error estimate) unless converged.
double require_converged(const QuadResult& r, const std::string& context);

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525335510, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7, 9).
inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& o) const noexcept { return error < o.error; }
};

template <class F>
Segment gauss_kronrod_21(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[10];
    double gauss = 0.0;
    double abs_sum = std::fabs(kronrod);
    std::array<double, 10> f1{};
    std::array<double, 10> f2{};
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = half * kKronrodNodes[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double pair = f1[j] + f2[j];
        kronrod += kKronrodWeights[j] * pair;
        abs_sum += kKronrodWeights[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
        if (j % 2 == 1) {
            gauss += kGaussWeights[j / 2] * pair;
        }
    }
    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[10] * std::fabs(fc - mean);
    for (std::size_t j = 0; j < 10; ++j) {
        asc += kKronrodWeights[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));
    }
    asc *= std::fabs(half);
    abs_sum *= std::fabs(half);

    double err = std::fabs((kronrod - gauss) * half);
    if (asc != 0.0 && err != 0.0) {
        err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(50.0 * eps * abs_sum, err);
    }
    return {a, b, kronrod * half, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod quadrature of f over the finite [a, b].
/// The interval with the largest error estimate is bisected until the summed
/// estimate meets max(abs_tol, rel_tol * |value|) or the subdivision budget is
/// spent (converged = false; value and error still reported).
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadratureSpec& spec) {
    if (a == b) {
        return {0.0, 0.0, 0, true};
    }
    std::priority_queue<detail::Segment> heap;
    heap.push(detail::gauss_kronrod_21(f, a, b));
    double value = heap.top().value;
    double error = heap.top().error;
    std::size_t intervals = 1;

    auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::fabs(value)); };

    while (error > tolerance() && intervals < spec.max_subdivisions) {
        const detail::Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            break;  // interval cannot be split further in double precision
        }
        heap.pop();
        const detail::Segment left = detail::gauss_kronrod_21(f, worst.a, mid);
        const detail::Segment right = detail::gauss_kronrod_21(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }

    // Re-sum to shed the drift of the running updates.
    value = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    return {value, error, intervals, error <= tolerance()};
}

}  // namespace hetnet
