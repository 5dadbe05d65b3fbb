#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hetnet/montecarlo.hpp"
#include "hetnet/scenario.hpp"

namespace hetnet {

enum class RunMode { Both, AnalyticOnly, MonteCarloOnly };

struct CurvePoint {
    double x = 0.0;
    std::optional<double> analytic;
    std::optional<EstimateWithCI> mc;
};

struct CurveResult {
    std::string name;
    std::uint64_t seed = 0;
    std::vector<CurvePoint> points;
    std::vector<std::string> warnings;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Evaluates every sweep point of `curve`. Optimizer solutions are shared
/// between curves of the same scenario through `run_scenario`.
[[nodiscard]] CurveResult evaluate_curve(const Scenario& scenario, const CurveSpec& curve,
                                         RunMode mode, const ProgressFn& progress = {});

struct ScenarioRun {
    std::vector<CurveResult> curves;
    std::vector<std::string> files;
};

/// Evaluates all curves, then writes one CSV per curve into the output
/// directory (nothing is written if any curve fails).
ScenarioRun run_scenario(const Scenario& scenario, RunMode mode, const ProgressFn& progress = {});

[[nodiscard]] std::string curve_file_name(const Scenario& scenario, const CurveSpec& curve);

/// Header: x,analytic,mc_estimate,mc_se,n_reps,seed. Missing values are empty fields.
void write_curve_csv(std::ostream& out, const CurveResult& curve);
[[nodiscard]] CurveResult read_curve_csv(std::istream& in, const std::string& name);

struct CompareReport {
    std::string name;
    std::vector<double> x;
    std::vector<double> z;  // (analytic - mc) / se
    double max_abs_z = 0.0;
    double fraction_above_3 = 0.0;
    std::vector<double> flagged_x;  // points with |z| > 3
};

/// Analytic column of `analytic` against the Monte Carlo columns of `mc`.
/// Throws ConfigError when the sweep grids differ or a column is missing.
[[nodiscard]] CompareReport compare(const CurveResult& analytic, const CurveResult& mc);

/// Machine-readable summary of several reports (JSON text).
[[nodiscard]] std::string compare_summary_json(const std::vector<CompareReport>& reports);

}  // namespace hetnet
