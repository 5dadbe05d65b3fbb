#include "hetnet/model.hpp"

#include <cmath>
#include <numbers>

namespace hetnet {

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
        throw DomainError("quadrature tolerances must be positive");
    }
    if (max_subdivisions < 1) {
        throw DomainError("quadrature needs at least one subdivision");
    }
}

void MobilityProfile::validate() const {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw DomainError("displacement v must be finite and >= 0");
    }
    if (const auto* fixed = std::get_if<FixedAngle>(&direction)) {
        if (!(fixed->theta >= 0.0 && fixed->theta < std::numbers::pi)) {
            throw DomainError("fixed movement angle must lie in [0, pi)");
        }
    }
}

double TierParams::power_mw() const { return db_to_linear(power_dbm); }

void TierParams::validate() const {
    if (!(density > 0.0) || !std::isfinite(density)) {
        throw DomainError("tier density must be positive");
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw DomainError("tier SIR threshold must be positive");
    }
    if (!(bias > 0.0) || !std::isfinite(bias)) {
        throw DomainError("tier bias must be positive");
    }
    if (!std::isfinite(power_dbm)) {
        throw DomainError("tier power must be finite");
    }
}

double reference_loss_2ghz() {
    constexpr double c = 299792458.0;
    constexpr double f = 2.0e9;
    const double wavelength = c / f;
    return std::pow(4.0 * std::numbers::pi / wavelength, -2.0);
}

void NetworkModel::validate(bool require_unit_reference_bias) const {
    if (tiers.empty()) {
        throw DomainError("network needs at least one tier");
    }
    if (!(alpha > 2.0) || !std::isfinite(alpha)) {
        throw DomainError("path-loss exponent must exceed 2");
    }
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw DomainError("handoff-failure fraction beta must lie in [0, 1]");
    }
    if (!(l0 > 0.0) || !(r0 > 0.0)) {
        throw DomainError("reference loss and distance must be positive");
    }
    for (std::size_t k = 0; k < tiers.size(); ++k) {
        tiers[k].validate();
        if (k > 0 && tiers[k].density < tiers[k - 1].density) {
            throw DomainError("tiers must be ordered by nondecreasing density (tier " +
                              std::to_string(k + 1) + ")");
        }
    }
    if (require_unit_reference_bias && tiers.front().bias != 1.0) {
        throw DomainError("reference tier bias must be 1");
    }
}

NetworkModel NetworkModel::single_tier(double density, double tau, double alpha, double beta) {
    NetworkModel net;
    net.tiers.push_back(TierParams{density, 0.0, tau, 1.0});
    net.alpha = alpha;
    net.beta = beta;
    return net;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace hetnet
