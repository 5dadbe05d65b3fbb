#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hetnet/analytic.hpp"
#include "hetnet/experiments.hpp"
#include "hetnet/montecarlo.hpp"
#include "hetnet/multitier.hpp"
#include "hetnet/optimize.hpp"
#include "hetnet/scenario.hpp"

using namespace hetnet;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::optional<std::string> out;
    std::optional<double> tol;
    bool quiet = false;
};

Scenario resolve_scenario(const std::string& source, const GlobalOptions& g) {
    Scenario s;
    if (std::filesystem::exists(source)) {
        s = load_scenario_file(source);
    } else {
        s = load_preset(source);  // throws ConfigError naming the known presets
    }
    if (g.seed) s.sim.seed = *g.seed;
    if (g.reps) s.sim.replications = *g.reps;
    if (g.out) s.output_dir = *g.out;
    if (g.tol) s.quad.abs_tol = *g.tol;
    try {
        s.sim.validate();
        s.quad.validate();
    } catch (const DomainError& e) {
        throw ConfigError(0, "command line", e.what());
    }
    s.validate();
    return s;
}

ProgressFn progress_for(const GlobalOptions& g) {
    if (g.quiet) {
        return {};
    }
    return [](const std::string& msg) { std::cerr << "  " << msg << '\n'; };
}

void report_files(const ScenarioRun& run, const GlobalOptions& g) {
    if (g.quiet) {
        return;
    }
    for (const auto& f : run.files) {
        std::cout << "wrote " << f << '\n';
    }
    for (const auto& c : run.curves) {
        for (const auto& w : c.warnings) {
            std::cerr << "warning: " << c.name << ": " << w << '\n';
        }
    }
}

std::vector<CompareReport> reports_for(const ScenarioRun& run) {
    std::vector<CompareReport> reports;
    for (const auto& c : run.curves) {
        bool complete = !c.points.empty();
        for (const auto& p : c.points) {
            complete = complete && p.analytic && p.mc;
        }
        if (complete) {
            reports.push_back(compare(c, c));
        }
    }
    return reports;
}

void write_summary(const Scenario& s, const std::vector<CompareReport>& reports, const GlobalOptions& g) {
    const auto text = compare_summary_json(reports);
    const auto path = std::filesystem::path(s.output_dir) / (s.name + "_compare.json");
    std::ofstream(path) << text << '\n';
    std::cout << text << '\n';
    if (!g.quiet) {
        std::cerr << "wrote " << path.string() << '\n';
    }
}

CurveResult read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(0, path, "cannot open CSV file");
    }
    try {
        return read_curve_csv(in, std::filesystem::path(path).stem().string());
    } catch (const ConfigError& e) {
        throw ConfigError(e.line(), path + ": " + e.field(), "malformed curve CSV");
    }
}

nlohmann::json solution_json(const AssociationSolution& sol, double v) {
    std::vector<double> bias_db;
    for (double b : sol.bias) {
        bias_db.push_back(b > 0.0 ? linear_to_db(b) : -1e308);
    }
    return {{"v", v},
            {"association", sol.association},
            {"bias", sol.bias},
            {"bias_db", bias_db},
            {"pinned", sol.pinned},
            {"objective", sol.objective},
            {"converged", sol.converged}};
}

int run_optimize(const Scenario& s, const std::vector<double>& speeds) {
    nlohmann::json out = nlohmann::json::array();
    const auto list = speeds.empty() ? std::vector<double>{s.mobility.v} : speeds;
    for (double v : list) {
        MobilityProfile prof = s.mobility;
        prof.v = v;
        prof.validate();
        const auto sol = optimize_association_mobile(s.net, prof, s.quad);
        auto j = solution_json(sol, v);
        j["baseline_stationary_optimum"] =
            coverage_multitier_mobile(s.net, optimal_association_stationary(s.net, s.quad), prof, s.quad);
        j["baseline_max_sir"] = coverage_multitier_mobile(s.net, max_sir_association(s.net), prof, s.quad);
        out.push_back(j);
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

int run_event_log(const Scenario& s, const std::string& path, const GlobalOptions& g) {
    std::vector<ReplicationRecord> log;
    const Tally tally = simulate(s.net, s.mobility, s.sim, &log);
    std::ofstream out(path);
    if (!out) {
        throw ConfigError(0, path, "cannot write event log");
    }
    write_event_log(out, s.sim.seed, s.mobility.v, log);

    nlohmann::json summary;
    const std::pair<const char*, EventSpec::Kind> events[] = {
        {"coverage", EventSpec::Kind::Coverage},
        {"handoff", EventSpec::Kind::Handoff},
        {"coverage_no_handoff", EventSpec::Kind::CoverageNoHandoff},
        {"composite", EventSpec::Kind::Composite},
    };
    for (const auto& [name, kind] : events) {
        const auto e = estimate(EventSpec{kind, 0, s.net.beta}, tally, s.sim.seed);
        summary[name] = {{"estimate", e.estimate}, {"se", e.se}, {"n", e.replications}};
    }
    summary["discarded"] = tally.discarded();
    summary["seed"] = s.sim.seed;
    std::cout << summary.dump(2) << '\n';
    if (!g.quiet) {
        std::cerr << "wrote " << path << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mobility-aware coverage and handoff analysis for multi-tier Poisson networks"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--seed", g.seed, "RNG seed for Monte Carlo runs")->envname("HETNET_SEED");
    app.add_option("--reps", g.reps, "Monte Carlo replications per sweep point")->envname("HETNET_REPS");
    app.add_option("--out", g.out, "output directory for CSV and JSON files")->envname("HETNET_OUT");
    app.add_option("--tol", g.tol, "absolute quadrature tolerance")->envname("HETNET_TOL");
    app.add_flag("--quiet", g.quiet, "suppress progress output")->envname("HETNET_QUIET");

    std::string source;
    auto* analytic = app.add_subcommand("analytic", "evaluate the analytic curves of a scenario");
    analytic->add_option("scenario", source, "scenario file or preset name")->required();

    std::string event_log;
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo curves of a scenario");
    simulate_cmd->add_option("scenario", source, "scenario file or preset name")->required();
    simulate_cmd->add_option("--event-log", event_log,
                             "also simulate the base point and write a per-replication CSV");

    std::string csv_analytic;
    std::string csv_mc;
    auto* compare_cmd = app.add_subcommand("compare", "analytic vs Monte Carlo z-score report");
    compare_cmd->add_option("scenario", source, "scenario file or preset name");
    compare_cmd->add_option("--analytic", csv_analytic, "curve CSV holding the analytic column");
    compare_cmd->add_option("--mc", csv_mc, "curve CSV holding the Monte Carlo columns (default: same file)");

    std::vector<double> speeds;
    auto* optimize_cmd = app.add_subcommand("optimize", "mobility-aware association and biases");
    optimize_cmd->add_option("scenario", source, "scenario file or preset name")->required();
    optimize_cmd->add_option("--v", speeds, "displacements to optimize for (default: scenario v)");

    std::string preset_name;
    bool dump = false;
    bool list = false;
    auto* preset_cmd = app.add_subcommand("preset", "run a built-in preset scenario");
    preset_cmd->add_option("name", preset_name, "preset name");
    preset_cmd->add_flag("--dump", dump, "print the preset's scenario text and exit");
    preset_cmd->add_flag("--list", list, "list the presets and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*analytic) {
            const auto s = resolve_scenario(source, g);
            report_files(run_scenario(s, RunMode::AnalyticOnly, progress_for(g)), g);
        } else if (*simulate_cmd) {
            const auto s = resolve_scenario(source, g);
            if (!s.curves.empty()) {
                report_files(run_scenario(s, RunMode::MonteCarloOnly, progress_for(g)), g);
            }
            if (!event_log.empty()) {
                return run_event_log(s, event_log, g);
            }
        } else if (*compare_cmd) {
            if (!csv_analytic.empty()) {
                const auto a = read_csv_file(csv_analytic);
                const auto m = csv_mc.empty() ? a : read_csv_file(csv_mc);
                std::cout << compare_summary_json({compare(a, m)}) << '\n';
            } else {
                if (source.empty()) {
                    throw ConfigError(0, "scenario", "give a scenario or --analytic <csv>");
                }
                const auto s = resolve_scenario(source, g);
                const auto run = run_scenario(s, RunMode::Both, progress_for(g));
                report_files(run, g);
                write_summary(s, reports_for(run), g);
            }
        } else if (*optimize_cmd) {
            return run_optimize(resolve_scenario(source, g), speeds);
        } else if (*preset_cmd) {
            if (list) {
                for (const auto& n : preset_names()) {
                    std::cout << n << '\n';
                }
                return 0;
            }
            if (preset_name.empty()) {
                throw ConfigError(0, "name", "preset name required (try --list)");
            }
            if (dump) {
                std::cout << preset_text(preset_name);
                return 0;
            }
            const auto s = resolve_scenario(preset_name, g);
            const auto run = run_scenario(s, RunMode::Both, progress_for(g));
            report_files(run, g);
            write_summary(s, reports_for(run), g);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "invalid parameters: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << " (value " << e.value() << ", error estimate "
                  << e.error_estimate() << ")\n";
        return kExitNumerical;
    } catch (const InfeasibleBiasError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
