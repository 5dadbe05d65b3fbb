#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetnet/model.hpp"

namespace hetnet {

/// Raised when a bias solve produces a non-positive B^(2/alpha).
class InfeasibleBiasError : public std::runtime_error {
public:
    InfeasibleBiasError(const std::string& what, std::vector<double> solution)
        : std::runtime_error(what), solution_(std::move(solution)) {}
    [[nodiscard]] const std::vector<double>& solution() const noexcept { return solution_; }

private:
    std::vector<double> solution_;
};

/// Tier association probabilities under max biased average received power:
///   A_k = lambda_k (P_k B_k)^(2/alpha) / sum_j lambda_j (P_j B_j)^(2/alpha).
[[nodiscard]] std::vector<double> association_probabilities(const NetworkModel& net);

/// Association probabilities with every bias forced to 1 (max received power).
[[nodiscard]] std::vector<double> max_sir_association(const NetworkModel& net);

/// P(n = k | r): probability that no other tier beats tier k's AP at distance r.
/// `tier` is zero-based.
[[nodiscard]] double association_prob_conditional(const NetworkModel& net, std::size_t tier,
                                                  double r);

/// Orthogonal-spectrum stationary coverage sum_k 1 / (1/A_k + rho(tau_k, alpha)).
/// Tiers with A_k = 0 contribute nothing.
[[nodiscard]] double coverage_multitier_stationary(const NetworkModel& net,
                                                   std::span<const double> association,
                                                   const QuadratureSpec& quad = {});

/// Stationary coverage when all tiers share the spectrum: rho(tau_k, alpha) in
/// the orthogonal formula is replaced by sum_j lambda^_j P^_j^(2/alpha) Z(tau_k, alpha, B^_j),
/// with association taken from the network's own biases. No closed form or
/// optimizer support; evaluation only.
[[nodiscard]] double coverage_multitier_shared_spectrum(const NetworkModel& net,
                                                        const QuadratureSpec& quad = {});

/// Coverage-maximizing association for a stationary user: A_k proportional to 1/rho_k.
[[nodiscard]] std::vector<double> optimal_association_stationary(const NetworkModel& net,
                                                                 const QuadratureSpec& quad = {});

/// Linear system A x = b for x_k = B_k^(2/alpha) over the non-reference tiers.
/// Row i corresponds to tier order[i + 1]; `order[0]` is the reference tier.
struct BiasSystem {
    std::size_t dim = 0;
    std::vector<double> matrix;  // row-major dim x dim
    std::vector<double> rhs;
    std::vector<std::size_t> order;

    [[nodiscard]] double at(std::size_t row, std::size_t col) const {
        return matrix[row * dim + col];
    }
};

/// Assembles the bias system for target association `association`; the
/// reference tier's bias is pinned to 1. Targets must be strictly interior.
[[nodiscard]] BiasSystem assemble_bias_system(const NetworkModel& net,
                                              std::span<const double> association,
                                              std::size_t reference_tier = 0);

[[nodiscard]] double bias_system_determinant(const BiasSystem& system);

/// Biases realizing `association` (reference tier bias = 1). The network's
/// own biases are ignored.
[[nodiscard]] std::vector<double> solve_bias(const NetworkModel& net,
                                             std::span<const double> association,
                                             std::size_t reference_tier = 0);

/// Per-tier pieces of the mobile coverage objective:
///   stationary = 1 / (1/A + rho_k)                         (f_{k,1})
///   mobile     = stationary * mobility_factor(lambda_k, v, 1/A + rho_k)  (f_{k,2})
struct TierCoverageTerms {
    double stationary = 0.0;
    double mobile = 0.0;
};

[[nodiscard]] TierCoverageTerms tier_coverage_terms(const NetworkModel& net, std::size_t tier,
                                                    double association,
                                                    const MobilityProfile& profile,
                                                    const QuadratureSpec& quad = {});

/// Multi-tier coverage with the linear handoff cost (beta from `net`):
///   sum_k (1 - beta) f_{k,1}(A_k) + beta f_{k,2}(A_k).
[[nodiscard]] double coverage_multitier_mobile(const NetworkModel& net,
                                               std::span<const double> association,
                                               const MobilityProfile& profile,
                                               const QuadratureSpec& quad = {});

/// Throws DomainError unless `association` has one entry per tier, no negative
/// entries and sums to 1 within `tol`.
void check_simplex(const NetworkModel& net, std::span<const double> association, double tol = 1e-9);

}  // namespace hetnet
