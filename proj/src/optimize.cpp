#include "hetnet/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "hetnet/multitier.hpp"

namespace hetnet {

namespace {

class Objective {
public:
    Objective(const NetworkModel& net, const MobilityProfile& profile, const QuadratureSpec& quad)
        : net_(net), profile_(profile), quad_(quad) {}

    double tier(std::size_t k, double a) const {
        const auto t = tier_coverage_terms(net_, k, a, profile_, quad_);
        return (1.0 - net_.beta) * t.stationary + net_.beta * t.mobile;
    }

    double operator()(std::span<const double> a) const {
        double total = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            total += tier(k, a[k]);
        }
        return total;
    }

    // The objective is separable, so each partial derivative only moves one tier.
    std::vector<double> gradient(std::span<const double> a, double h) const {
        std::vector<double> g(a.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double lo = std::max(0.0, a[k] - h);
            const double hi = std::min(1.0, a[k] + h);
            g[k] = (tier(k, hi) - tier(k, lo)) / (hi - lo);
        }
        return g;
    }

private:
    const NetworkModel& net_;
    const MobilityProfile& profile_;
    const QuadratureSpec& quad_;
};

struct AscentResult {
    std::vector<double> a;
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

AscentResult projected_ascent(const Objective& f, std::vector<double> start,
                              const OptimizerOptions& opt) {
    constexpr double kArmijo = 1e-4;
    constexpr int kMaxBacktracks = 60;

    AscentResult res;
    res.a = project_to_simplex(start, opt.floor);
    res.value = f(res.a);
    double step = 1.0;

    for (int it = 0; it < opt.max_iterations; ++it) {
        res.iterations = it + 1;
        const auto grad = f.gradient(res.a, opt.gradient_step);
        bool accepted = false;
        for (int bt = 0; bt < kMaxBacktracks; ++bt) {
            std::vector<double> trial(res.a.size());
            for (std::size_t k = 0; k < trial.size(); ++k) {
                trial[k] = res.a[k] + step * grad[k];
            }
            trial = project_to_simplex(trial, opt.floor);
            double move = 0.0;
            double slope = 0.0;
            for (std::size_t k = 0; k < trial.size(); ++k) {
                const double d = trial[k] - res.a[k];
                move = std::max(move, std::fabs(d));
                slope += grad[k] * d;
            }
            if (move < opt.step_tolerance) {
                res.converged = true;
                return res;
            }
            const double value = f(trial);
            if (value >= res.value + kArmijo * slope) {
                res.a = std::move(trial);
                res.value = value;
                step = std::min(step * 2.0, 1e6);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // No ascent direction survives finite-difference noise: stationary.
            res.converged = true;
            return res;
        }
    }
    return res;
}

double canonical(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> random_simplex_point(std::mt19937_64& rng, std::size_t k) {
    std::vector<double> x(k);
    double total = 0.0;
    for (double& xi : x) {
        xi = -std::log1p(-canonical(rng));
        total += xi;
    }
    for (double& xi : x) {
        xi /= total;
    }
    return x;
}

std::vector<double> bias_for_solution(const NetworkModel& net, const std::vector<double>& a,
                                      const std::vector<bool>& pinned, std::size_t& reference) {
    std::vector<std::size_t> live;
    for (std::size_t k = 0; k < net.size(); ++k) {
        if (!pinned[k]) {
            live.push_back(k);
        }
    }
    std::vector<double> bias(net.size(), 0.0);
    reference = live.front();
    if (live.size() == net.size()) {
        return solve_bias(net, a, 0);
    }
    NetworkModel reduced = net;
    reduced.tiers.clear();
    std::vector<double> reduced_a;
    double mass = 0.0;
    for (std::size_t k : live) {
        reduced.tiers.push_back(net.tiers[k]);
        reduced_a.push_back(a[k]);
        mass += a[k];
    }
    for (double& x : reduced_a) {
        x /= mass;
    }
    const auto reduced_bias = solve_bias(reduced, reduced_a, 0);
    for (std::size_t i = 0; i < live.size(); ++i) {
        bias[live[i]] = reduced_bias[i];
    }
    return bias;
}

}  // namespace

std::vector<double> project_to_simplex(std::span<const double> x, double floor) {
    const std::size_t n = x.size();
    const double mass = 1.0 - static_cast<double>(n) * floor;
    if (n == 0 || !(mass > 0.0)) {
        throw DomainError("simplex floor too large for the number of tiers");
    }
    std::vector<double> y(x.begin(), x.end());
    for (double& v : y) {
        v -= floor;
    }
    std::vector<double> sorted = y;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double running = 0.0;
    double shift = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        running += sorted[j];
        const double candidate = (running - mass) / static_cast<double>(j + 1);
        if (sorted[j] - candidate > 0.0) {
            shift = candidate;
        }
    }
    for (double& v : y) {
        v = std::max(v - shift, 0.0) + floor;
    }
    return y;
}

AssociationSolution optimize_association_mobile(const NetworkModel& net,
                                                const MobilityProfile& profile,
                                                const QuadratureSpec& quad,
                                                const OptimizerOptions& options) {
    net.validate();
    profile.validate();
    quad.validate();
    const std::size_t K = net.size();

    AssociationSolution sol;
    if (K == 1) {
        sol.association = {1.0};
        sol.bias = {1.0};
        sol.pinned = {false};
        sol.objective = coverage_multitier_mobile(net, sol.association, profile, quad);
        sol.converged = true;
        return sol;
    }

    const Objective objective(net, profile, quad);
    std::vector<std::vector<double>> starts;
    starts.push_back(optimal_association_stationary(net, quad));
    starts.push_back(max_sir_association(net));
    std::mt19937_64 rng(options.seed);
    for (int i = 0; i < options.random_restarts; ++i) {
        starts.push_back(random_simplex_point(rng, K));
    }

    AscentResult best;
    best.value = -1.0;
    int total_iterations = 0;
    bool all_converged = true;
    for (const auto& s : starts) {
        auto r = projected_ascent(objective, s, options);
        total_iterations += r.iterations;
        all_converged = all_converged && r.converged;
        if (r.value > best.value) {
            best = std::move(r);
        }
    }

    sol.association = best.a;
    sol.objective = best.value;
    sol.converged = best.converged;
    sol.iterations = total_iterations;
    sol.pinned.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        sol.pinned[k] = sol.association[k] <= options.floor * (1.0 + 1e-6);
    }
    sol.bias = bias_for_solution(net, sol.association, sol.pinned, sol.reference_tier);
    return sol;
}

ConcavityReport concavity_probe(const NetworkModel& net, const MobilityProfile& profile,
                                std::size_t tier, std::span<const double> grid, CoverageTerm term,
                                const QuadratureSpec& quad) {
    net.validate();
    if (tier >= net.size()) {
        throw std::out_of_range("tier index out of range");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0 && grid[i] < 1.0)) {
            throw DomainError("concavity grid must lie inside (0, 1)");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw DomainError("concavity grid must be strictly increasing");
        }
    }
    // Second differences on a 0.01 grid are O(1e-6); keep quadrature noise well below that.
    QuadratureSpec tight = quad;
    tight.abs_tol = std::min(quad.abs_tol, 1e-14);
    tight.rel_tol = std::min(quad.rel_tol, 1e-12);

    ConcavityReport rep;
    rep.grid.assign(grid.begin(), grid.end());
    for (double a : grid) {
        const auto t = tier_coverage_terms(net, tier, a, profile, tight);
        rep.values.push_back(term == CoverageTerm::Stationary ? t.stationary : t.mobile);
    }
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double left = (rep.values[i] - rep.values[i - 1]) / (grid[i] - grid[i - 1]);
        const double right = (rep.values[i + 1] - rep.values[i]) / (grid[i + 1] - grid[i]);
        const double d2 = 2.0 * (right - left) / (grid[i + 1] - grid[i - 1]);
        if (d2 >= 0.0) {
            rep.flagged.push_back(rep.second_differences.size());
        }
        rep.second_differences.push_back(d2);
    }
    return rep;
}

}  // namespace hetnet
