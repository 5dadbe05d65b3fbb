#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hetnet {

// Error hierarchy. Domain errors are caller mistakes; numerical errors carry
// whatever the failing routine managed to compute.

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double value, double error_estimate)
        : std::runtime_error(what), value_(value), error_estimate_(error_estimate) {}

    [[nodiscard]] double value() const noexcept { return value_; }
    [[nodiscard]] double error_estimate() const noexcept { return error_estimate_; }

private:
    double value_;
    double error_estimate_;
};

/// Absolute/relative targets for every adaptive integral in the library.
struct QuadratureSpec {
    double abs_tol = 1e-9;
    double rel_tol = 1e-7;
    std::size_t max_subdivisions = 400;

    void validate() const;
};

struct FixedAngle {
    double theta = 0.0;  // radians in [0, pi)
};

struct UniformAngle {};

using Direction = std::variant<FixedAngle, UniformAngle>;

/// Displacement per movement period and the distribution of the angle between
/// the movement and the user->serving-AP connection line (0 = moving away).
struct MobilityProfile {
    double v = 0.0;
    Direction direction = UniformAngle{};

    [[nodiscard]] bool uniform() const noexcept {
        return std::holds_alternative<UniformAngle>(direction);
    }
    void validate() const;

    static MobilityProfile radial(double v) { return {v, FixedAngle{0.0}}; }
    static MobilityProfile isotropic(double v) { return {v, UniformAngle{}}; }
};

struct TierParams {
    double density = 0.0;    // APs per m^2
    double power_dbm = 0.0;
    double tau = 1.0;        // SIR threshold, linear
    double bias = 1.0;       // linear

    [[nodiscard]] double power_mw() const;
    void validate() const;
};

/// Wavelength-derived reference loss (4*pi/eps)^-2 at 2 GHz.
[[nodiscard]] double reference_loss_2ghz();

struct NetworkModel {
    std::vector<TierParams> tiers;  // sparsest first
    double alpha = 3.5;
    double beta = 0.0;
    double l0 = reference_loss_2ghz();
    double r0 = 1.0;

    [[nodiscard]] std::size_t size() const noexcept { return tiers.size(); }

    /// Throws DomainError for any violated model invariant. The B1 = 1
    /// convention is only enforced when `require_unit_reference_bias` is set.
    void validate(bool require_unit_reference_bias = false) const;

    static NetworkModel single_tier(double density, double tau, double alpha, double beta = 0.0);
};

[[nodiscard]] double db_to_linear(double db);
[[nodiscard]] double linear_to_db(double x);

/// Densities are often quoted per 1000 m^2.
[[nodiscard]] constexpr double per_1000m2(double x) noexcept { return x / 1000.0; }

}  // namespace hetnet
