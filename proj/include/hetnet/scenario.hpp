#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hetnet/model.hpp"
#include "hetnet/montecarlo.hpp"

namespace hetnet {

/// Bad scenario input. `line` is 1-based, 0 when the problem is not tied to a line.
class ConfigError : public DomainError {
public:
    ConfigError(std::size_t line, std::string field, const std::string& message);

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

enum class Quantity {
    Handoff,              // handoff probability per movement period (single tier)
    Coverage,             // cost-weighted coverage (1-beta) P(cov) + beta P(cov, no handoff)
    OptimalAssociation,   // A_k maximizing coverage for the swept mobility
    OptimalBiasDb,        // bias realizing that optimum, dB (analytic only)
};

enum class AnalyticMethod { Default, None, Exact, Approx, Radial, ExactGeometry, Stationary };

/// Which association the Coverage quantity evaluates.
enum class AssociationRule { Biases, StationaryOptimum, MaxSir, Optimal };

enum class SweepVariable { Speed, Density, Beta, TauDb, Association };

struct CurveSpec {
    std::string name;
    Quantity quantity = Quantity::Coverage;
    AnalyticMethod analytic = AnalyticMethod::Default;
    bool monte_carlo = true;
    AssociationRule association = AssociationRule::Biases;
    SweepVariable sweep = SweepVariable::Speed;
    std::size_t tier = 0;  // tier the sweep or the reported quantity refers to
    std::vector<double> values;

    // Per-curve overrides of the scenario defaults.
    std::optional<double> beta;
    std::optional<double> density;  // applies to `tier`
    std::optional<double> v;
    std::optional<Direction> direction;
};

struct Scenario {
    std::string name = "scenario";
    NetworkModel net;
    MobilityProfile mobility;
    SimConfig sim;
    QuadratureSpec quad;
    std::string output_dir = ".";
    std::vector<CurveSpec> curves;

    /// Cross-field checks (sweep ranges, tier references, quantity/method pairs).
    void validate() const;
};

/// Parses the sectioned key = value format. Throws ConfigError.
[[nodiscard]] Scenario parse_scenario(std::string_view text);
[[nodiscard]] Scenario load_scenario_file(const std::string& path);

[[nodiscard]] std::vector<std::string> preset_names();
/// Scenario text of a built-in preset; throws ConfigError for unknown names.
[[nodiscard]] std::string preset_text(const std::string& name);
[[nodiscard]] Scenario load_preset(const std::string& name);

/// Numeric literal with optional "a/b" ratio form ("0.1/1000") and optional
/// "deg" suffix when `angle` is set (radians otherwise).
[[nodiscard]] double parse_number(std::string_view text, bool angle = false);

}  // namespace hetnet
