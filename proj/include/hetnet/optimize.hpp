#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hetnet/model.hpp"

namespace hetnet {

struct OptimizerOptions {
    int random_restarts = 10;
    double gradient_step = 1e-5;
    double floor = 1e-6;           // smallest association a tier is allowed
    int max_iterations = 2000;
    double step_tolerance = 1e-11;
    std::uint64_t seed = 0x5eed5eedULL;
};

/// Coverage-maximizing association for a mobile user and the biases that
/// realize it. Tiers whose optimum sits on the floor are reported in `pinned`;
/// their bias is set to 0 (never associate) and the remaining tiers' biases are
/// solved on the renormalized interior association.
struct AssociationSolution {
    std::vector<double> association;
    std::vector<double> bias;
    std::vector<bool> pinned;
    std::size_t reference_tier = 0;
    double objective = 0.0;
    bool converged = false;
    int iterations = 0;

    [[nodiscard]] bool boundary() const noexcept {
        for (bool p : pinned) {
            if (p) {
                return true;
            }
        }
        return false;
    }
};

/// Projected gradient ascent over the association simplex (central-difference
/// gradients, Armijo backtracking) from the stationary optimum, the max-SIR
/// association and `random_restarts` random interior points; best start wins.
[[nodiscard]] AssociationSolution optimize_association_mobile(const NetworkModel& net,
                                                              const MobilityProfile& profile,
                                                              const QuadratureSpec& quad = {},
                                                              const OptimizerOptions& options = {});

/// Euclidean projection onto {x : x_k >= floor, sum x = 1}.
[[nodiscard]] std::vector<double> project_to_simplex(std::span<const double> x, double floor = 0.0);

enum class CoverageTerm { Stationary, Mobile };

struct ConcavityReport {
    std::vector<double> grid;
    std::vector<double> values;
    /// second divided differences at grid[1 .. n-2]
    std::vector<double> second_differences;
    /// indices into second_differences that are >= 0
    std::vector<std::size_t> flagged;

    [[nodiscard]] bool all_negative() const noexcept {
        return flagged.empty() && !second_differences.empty();
    }
};

/// Samples one tier's coverage term (f_{i,1} or f_{i,2}) on `grid` and checks
/// the sign of its second divided differences.
[[nodiscard]] ConcavityReport concavity_probe(const NetworkModel& net,
                                              const MobilityProfile& profile, std::size_t tier,
                                              std::span<const double> grid,
                                              CoverageTerm term = CoverageTerm::Mobile,
                                              const QuadratureSpec& quad = {});

}  // namespace hetnet
