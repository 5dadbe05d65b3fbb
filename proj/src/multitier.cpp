#include "hetnet/multitier.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "hetnet/analytic.hpp"

namespace hetnet {

namespace {

// log(lambda_k P_k^(2/alpha) B_k^(2/alpha)); ratios of tier weights are exp of
// differences, which keeps dBm powers from overflowing.
std::vector<double> log_weights(const NetworkModel& net, bool with_bias) {
    std::vector<double> w(net.size());
    for (std::size_t k = 0; k < net.size(); ++k) {
        const auto& t = net.tiers[k];
        double lw = std::log(t.density) + (2.0 / net.alpha) * std::log(t.power_mw());
        if (with_bias) {
            lw += (2.0 / net.alpha) * std::log(t.bias);
        }
        w[k] = lw;
    }
    return w;
}

std::vector<double> normalize_log_weights(const std::vector<double>& lw) {
    const double top = *std::max_element(lw.begin(), lw.end());
    std::vector<double> a(lw.size());
    double total = 0.0;
    for (std::size_t k = 0; k < lw.size(); ++k) {
        a[k] = std::exp(lw[k] - top);
        total += a[k];
    }
    for (double& x : a) {
        x /= total;
    }
    return a;
}

std::vector<double> tier_rhos(const NetworkModel& net, const QuadratureSpec& quad) {
    std::vector<double> out(net.size());
    for (std::size_t k = 0; k < net.size(); ++k) {
        out[k] = rho(net.tiers[k].tau, net.alpha, quad);
    }
    return out;
}

}  // namespace

void check_simplex(const NetworkModel& net, std::span<const double> association, double tol) {
    if (association.size() != net.size()) {
        throw DomainError("association vector has " + std::to_string(association.size()) +
                          " entries for " + std::to_string(net.size()) + " tiers");
    }
    double total = 0.0;
    for (double a : association) {
        if (!(a >= 0.0) || !std::isfinite(a)) {
            throw DomainError("association probabilities must be nonnegative");
        }
        total += a;
    }
    if (std::fabs(total - 1.0) > tol) {
        throw DomainError("association probabilities must sum to 1");
    }
}

std::vector<double> association_probabilities(const NetworkModel& net) {
    net.validate();
    return normalize_log_weights(log_weights(net, true));
}

std::vector<double> max_sir_association(const NetworkModel& net) {
    net.validate();
    return normalize_log_weights(log_weights(net, false));
}

double association_prob_conditional(const NetworkModel& net, std::size_t tier, double r) {
    net.validate();
    if (tier >= net.size()) {
        throw std::out_of_range("tier index " + std::to_string(tier) + " out of range");
    }
    if (!(r >= 0.0)) {
        throw DomainError("distance must be nonnegative");
    }
    const auto lw = log_weights(net, true);
    double exponent = 0.0;
    for (std::size_t j = 0; j < net.size(); ++j) {
        if (j == tier) {
            continue;
        }
        // lambda_j (P^_j B^_j)^(2/alpha) = lambda_k * exp(lw_j - lw_k)
        exponent += net.tiers[tier].density * std::exp(lw[j] - lw[tier]);
    }
    return std::exp(-std::numbers::pi * exponent * r * r);
}

double coverage_multitier_stationary(const NetworkModel& net, std::span<const double> association,
                                     const QuadratureSpec& quad) {
    net.validate();
    check_simplex(net, association);
    const auto rhos = tier_rhos(net, quad);
    double total = 0.0;
    for (std::size_t k = 0; k < net.size(); ++k) {
        const double a = association[k];
        total += a / (1.0 + a * rhos[k]);
    }
    return total;
}

double coverage_multitier_shared_spectrum(const NetworkModel& net, const QuadratureSpec& quad) {
    net.validate();
    const auto assoc = association_probabilities(net);
    const auto lw_plain = log_weights(net, false);
    double total = 0.0;
    for (std::size_t k = 0; k < net.size(); ++k) {
        double interference = 0.0;
        for (std::size_t j = 0; j < net.size(); ++j) {
            const double lambda_p = std::exp(lw_plain[j] - lw_plain[k]);
            const double bias_ratio = net.tiers[j].bias / net.tiers[k].bias;
            interference += lambda_p * z_interference(net.tiers[k].tau, net.alpha, bias_ratio, quad);
        }
        total += assoc[k] / (1.0 + assoc[k] * interference);
    }
    return total;
}

std::vector<double> optimal_association_stationary(const NetworkModel& net,
                                                   const QuadratureSpec& quad) {
    net.validate();
    const auto rhos = tier_rhos(net, quad);
    std::vector<double> a(net.size());
    double total = 0.0;
    for (std::size_t k = 0; k < net.size(); ++k) {
        a[k] = 1.0 / rhos[k];
        total += a[k];
    }
    for (double& x : a) {
        x /= total;
    }
    return a;
}

BiasSystem assemble_bias_system(const NetworkModel& net, std::span<const double> association,
                                std::size_t reference_tier) {
    net.validate();
    check_simplex(net, association);
    const std::size_t K = net.size();
    if (reference_tier >= K) {
        throw std::out_of_range("reference tier out of range");
    }
    if (K >= 2) {
        for (double a : association) {
            if (!(a > 0.0 && a < 1.0)) {
                throw DomainError("bias solve needs association probabilities strictly inside (0, 1)");
            }
        }
    }

    BiasSystem sys;
    sys.order.push_back(reference_tier);
    for (std::size_t k = 0; k < K; ++k) {
        if (k != reference_tier) {
            sys.order.push_back(k);
        }
    }
    sys.dim = K - 1;
    sys.matrix.assign(sys.dim * sys.dim, 0.0);
    sys.rhs.assign(sys.dim, 0.0);

    const auto lw = log_weights(net, false);
    // a_{jk} = lambda^_j P^_j^(2/alpha) with hats relative to tier k.
    auto coupling = [&](std::size_t j, std::size_t k) { return std::exp(lw[j] - lw[k]); };

    for (std::size_t row = 0; row < sys.dim; ++row) {
        const std::size_t k = sys.order[row + 1];
        for (std::size_t col = 0; col < sys.dim; ++col) {
            const std::size_t j = sys.order[col + 1];
            sys.matrix[row * sys.dim + col] =
                (j == k) ? 1.0 - 1.0 / association[k] : coupling(j, k);
        }
        sys.rhs[row] = -coupling(reference_tier, k);
    }
    return sys;
}

double bias_system_determinant(const BiasSystem& system) {
    if (system.dim == 0) {
        return 1.0;
    }
    const auto n = static_cast<Eigen::Index>(system.dim);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        system.matrix.data(), n, n);
    return m.partialPivLu().determinant();
}

std::vector<double> solve_bias(const NetworkModel& net, std::span<const double> association,
                               std::size_t reference_tier) {
    const BiasSystem sys = assemble_bias_system(net, association, reference_tier);
    std::vector<double> bias(net.size(), 1.0);
    if (sys.dim == 0) {
        return bias;
    }
    const auto n = static_cast<Eigen::Index>(sys.dim);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        sys.matrix.data(), n, n);
    Eigen::Map<const Eigen::VectorXd> b(sys.rhs.data(), n);
    const Eigen::VectorXd x = m.fullPivLu().solve(b);

    std::vector<double> xs(x.data(), x.data() + n);
    for (std::size_t i = 0; i < sys.dim; ++i) {
        if (!(xs[i] > 0.0) || !std::isfinite(xs[i])) {
            std::ostringstream msg;
            msg << "bias solve infeasible: x for tier " << sys.order[i + 1] + 1 << " = " << xs[i]
                << " (target A = " << association[sys.order[i + 1]] << ")";
            throw InfeasibleBiasError(msg.str(), xs);
        }
        bias[sys.order[i + 1]] = std::pow(xs[i], net.alpha / 2.0);
    }
    return bias;
}

TierCoverageTerms tier_coverage_terms(const NetworkModel& net, std::size_t tier, double association,
                                      const MobilityProfile& profile, const QuadratureSpec& quad) {
    if (tier >= net.size()) {
        throw std::out_of_range("tier index out of range");
    }
    if (!(association >= 0.0 && association <= 1.0)) {
        throw DomainError("association probability must lie in [0, 1]");
    }
    if (association == 0.0) {
        return {};
    }
    const auto& t = net.tiers[tier];
    const double rh = rho(t.tau, net.alpha, quad);
    const double denom = 1.0 / association + rh;
    const double stationary = association / (1.0 + association * rh);
    return {stationary, stationary * mobility_factor(t.density, profile, denom, quad)};
}

double coverage_multitier_mobile(const NetworkModel& net, std::span<const double> association,
                                 const MobilityProfile& profile, const QuadratureSpec& quad) {
    profile.validate();
    if (net.beta == 0.0 || profile.v == 0.0) {
        return coverage_multitier_stationary(net, association, quad);
    }
    net.validate();
    check_simplex(net, association);
    double total = 0.0;
    for (std::size_t k = 0; k < net.size(); ++k) {
        const auto terms = tier_coverage_terms(net, k, association[k], profile, quad);
        total += (1.0 - net.beta) * terms.stationary + net.beta * terms.mobile;
    }
    return total;
}

}  // namespace hetnet
