#include "hetnet/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hetnet/analytic.hpp"
#include "hetnet/multitier.hpp"
#include "hetnet/optimize.hpp"

namespace hetnet {

namespace {

// A pinned tier must never win association; a vanishing bias does that while
// keeping the network valid.
constexpr double kPinnedBias = 1e-300;

class OptimizerCache {
public:
    const AssociationSolution& get(const NetworkModel& net, const MobilityProfile& prof,
                                   const QuadratureSpec& quad) {
        const std::string key = fingerprint(net, prof, quad);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            it = cache_.emplace(key, optimize_association_mobile(net, prof, quad)).first;
        }
        return it->second;
    }

private:
    static std::string fingerprint(const NetworkModel& net, const MobilityProfile& prof,
                                   const QuadratureSpec& quad) {
        std::ostringstream s;
        s.precision(17);
        s << net.alpha << ' ' << net.beta << ' ' << net.l0 << ' ' << net.r0 << ' ' << prof.v;
        if (const auto* fixed = std::get_if<FixedAngle>(&prof.direction)) {
            s << " fixed " << fixed->theta;
        }
        for (const auto& t : net.tiers) {
            s << ' ' << t.density << ' ' << t.power_dbm << ' ' << t.tau;
        }
        s << ' ' << quad.abs_tol << ' ' << quad.rel_tol << ' ' << quad.max_subdivisions;
        return s.str();
    }

    std::map<std::string, AssociationSolution> cache_;
};

struct PointSetup {
    NetworkModel net;
    MobilityProfile profile;
    std::vector<double> association;  // target association for coverage quantities
};

PointSetup setup_point(const Scenario& s, const CurveSpec& c, double x) {
    PointSetup p{s.net, s.mobility, {}};
    if (c.beta) p.net.beta = *c.beta;
    if (c.density) p.net.tiers[c.tier].density = *c.density;
    if (c.v) p.profile.v = *c.v;
    if (c.direction) p.profile.direction = *c.direction;
    switch (c.sweep) {
    case SweepVariable::Speed:
        p.profile.v = x;
        break;
    case SweepVariable::Density:
        p.net.tiers[c.tier].density = x;
        break;
    case SweepVariable::Beta:
        p.net.beta = x;
        break;
    case SweepVariable::TauDb:
        for (auto& t : p.net.tiers) {
            t.tau = db_to_linear(x);
        }
        break;
    case SweepVariable::Association:
        p.association.assign(2, 1.0 - x);
        p.association[c.tier] = x;
        break;
    }
    p.net.validate();
    p.profile.validate();
    return p;
}

void apply_biases(NetworkModel& net, const std::vector<double>& bias) {
    for (std::size_t k = 0; k < net.size(); ++k) {
        net.tiers[k].bias = bias[k] > 0.0 ? bias[k] : kPinnedBias;
    }
}

struct Evaluator {
    const Scenario& s;
    OptimizerCache& cache;

    CurvePoint operator()(const CurveSpec& c, double x, RunMode mode,
                          std::vector<std::string>& warnings) {
        PointSetup p = setup_point(s, c, x);
        const bool want_analytic = mode != RunMode::MonteCarloOnly && c.analytic != AnalyticMethod::None;
        const bool want_mc = mode != RunMode::AnalyticOnly && c.monte_carlo;
        const double density = p.net.tiers[c.tier].density;

        CurvePoint pt;
        pt.x = x;
        EventSpec event;
        switch (c.quantity) {
        case Quantity::Handoff:
            if (want_analytic) {
                switch (c.analytic) {
                case AnalyticMethod::Approx:
                    pt.analytic = handoff_rate_approx(density, p.profile.v, s.quad);
                    break;
                case AnalyticMethod::Radial:
                    pt.analytic = handoff_rate_radial(density, p.profile.v);
                    break;
                default:
                    pt.analytic = handoff_rate_exact(density, p.profile, s.quad);
                    break;
                }
            }
            event.kind = EventSpec::Kind::Handoff;
            break;
        case Quantity::Coverage: {
            const std::size_t K = p.net.size();
            if (c.sweep == SweepVariable::Association) {
                apply_biases(p.net, solve_bias(p.net, p.association, 0));
            } else {
                switch (c.association) {
                case AssociationRule::Biases:
                    p.association = association_probabilities(p.net);
                    break;
                case AssociationRule::StationaryOptimum:
                    p.association = optimal_association_stationary(p.net, s.quad);
                    if (K > 1) {
                        apply_biases(p.net, solve_bias(p.net, p.association, 0));
                    }
                    break;
                case AssociationRule::MaxSir:
                    apply_biases(p.net, std::vector<double>(K, 1.0));
                    p.association = max_sir_association(p.net);
                    break;
                case AssociationRule::Optimal: {
                    const auto& sol = cache.get(p.net, p.profile, s.quad);
                    p.association = sol.association;
                    apply_biases(p.net, sol.bias);
                    break;
                }
                }
            }
            if (want_analytic) {
                const auto& t = p.net.tiers.front();
                switch (c.analytic) {
                case AnalyticMethod::Stationary:
                    pt.analytic = coverage_multitier_stationary(p.net, p.association, s.quad);
                    break;
                case AnalyticMethod::ExactGeometry:
                    pt.analytic = coverage_mobile_single_tier_exact_geometry(
                        t.density, p.profile, p.net.beta, t.tau, p.net.alpha, s.quad);
                    break;
                default:
                    pt.analytic = (K == 1) ? coverage_mobile_single_tier(t.density, p.profile, p.net.beta,
                                                                         t.tau, p.net.alpha, s.quad)
                                           : coverage_multitier_mobile(p.net, p.association,
                                                                       p.profile, s.quad);
                    break;
                }
            }
            event.kind = EventSpec::Kind::Composite;
            event.beta = p.net.beta;
            break;
        }
        case Quantity::OptimalAssociation:
        case Quantity::OptimalBiasDb: {
            const auto& sol = cache.get(p.net, p.profile, s.quad);
            if (want_analytic) {
                if (c.quantity == Quantity::OptimalAssociation) {
                    pt.analytic = sol.association[c.tier];
                } else {
                    const double b = sol.bias[c.tier];
                    pt.analytic = b > 0.0 ? linear_to_db(b) : -std::numeric_limits<double>::infinity();
                }
            }
            apply_biases(p.net, sol.bias);
            event.kind = EventSpec::Kind::Tier;
            event.tier = c.tier;
            break;
        }
        }

        if (want_mc) {
            pt.mc = estimate(event, p.net, p.profile, s.sim);
            if (!pt.mc->warning.empty()) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "x = %g: ", x);
                warnings.push_back(buf + pt.mc->warning);
            }
        }
        return pt;
    }
};

std::string format_number(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::optional<double> parse_field(const std::string& field, std::size_t line) {
    if (field.empty()) {
        return std::nullopt;
    }
    if (field == "inf") return std::numeric_limits<double>::infinity();
    if (field == "-inf") return -std::numeric_limits<double>::infinity();
    if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
    try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size()) {
            throw std::invalid_argument(field);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError(line, field, "not a number");
    }
}

CurveResult evaluate_with(const Scenario& s, const CurveSpec& c, RunMode mode, OptimizerCache& cache,
                          const ProgressFn& progress) {
    CurveResult out;
    out.name = c.name;
    out.seed = s.sim.seed;
    Evaluator eval{s, cache};
    for (double x : c.values) {
        if (progress) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s: x = %g", c.name.c_str(), x);
            progress(buf);
        }
        out.points.push_back(eval(c, x, mode, out.warnings));
    }
    return out;
}

}  // namespace

CurveResult evaluate_curve(const Scenario& scenario, const CurveSpec& curve, RunMode mode,
                           const ProgressFn& progress) {
    OptimizerCache cache;
    return evaluate_with(scenario, curve, mode, cache, progress);
}

std::string curve_file_name(const Scenario& scenario, const CurveSpec& curve) {
    return scenario.name + "_" + curve.name + ".csv";
}

ScenarioRun run_scenario(const Scenario& scenario, RunMode mode, const ProgressFn& progress) {
    scenario.validate();
    ScenarioRun run;
    OptimizerCache cache;
    for (const auto& c : scenario.curves) {
        run.curves.push_back(evaluate_with(scenario, c, mode, cache, progress));
    }
    const std::filesystem::path dir(scenario.output_dir);
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < scenario.curves.size(); ++i) {
        const auto path = dir / curve_file_name(scenario, scenario.curves[i]);
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + path.string());
        }
        write_curve_csv(out, run.curves[i]);
        run.files.push_back(path.string());
    }
    return run;
}

void write_curve_csv(std::ostream& out, const CurveResult& curve) {
    out << "x,analytic,mc_estimate,mc_se,n_reps,seed\n";
    for (const auto& p : curve.points) {
        out << format_number(p.x) << ',';
        if (p.analytic) out << format_number(*p.analytic);
        out << ',';
        if (p.mc) {
            out << format_number(p.mc->estimate) << ',' << format_number(p.mc->se) << ','
                << p.mc->replications;
        } else {
            out << ",,";
        }
        out << ',' << curve.seed << '\n';
    }
}

CurveResult read_curve_csv(std::istream& in, const std::string& name) {
    CurveResult out;
    out.name = name;
    std::string line;
    if (!std::getline(in, line) || line != "x,analytic,mc_estimate,mc_se,n_reps,seed") {
        throw ConfigError(1, "header", "expected x,analytic,mc_estimate,mc_se,n_reps,seed");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            f.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            f.emplace_back();
        }
        if (f.size() != 6) {
            throw ConfigError(line_no, "row", "expected 6 fields");
        }
        CurvePoint p;
        const auto x = parse_field(f[0], line_no);
        if (!x) {
            throw ConfigError(line_no, "x", "missing sweep value");
        }
        p.x = *x;
        p.analytic = parse_field(f[1], line_no);
        const auto est = parse_field(f[2], line_no);
        const auto se = parse_field(f[3], line_no);
        if (est && se) {
            EstimateWithCI e;
            e.estimate = *est;
            e.se = *se;
            e.replications = f[4].empty() ? 0 : std::stoull(f[4]);
            p.mc = e;
        }
        if (!f[5].empty()) {
            out.seed = std::stoull(f[5]);
        }
        out.points.push_back(p);
    }
    return out;
}

CompareReport compare(const CurveResult& analytic, const CurveResult& mc) {
    if (analytic.points.size() != mc.points.size()) {
        throw ConfigError(0, "x", "sweep grids differ in length (" +
                                      std::to_string(analytic.points.size()) + " vs " +
                                      std::to_string(mc.points.size()) + ")");
    }
    CompareReport rep;
    rep.name = analytic.name;
    std::size_t above = 0;
    for (std::size_t i = 0; i < analytic.points.size(); ++i) {
        const auto& a = analytic.points[i];
        const auto& m = mc.points[i];
        if (std::fabs(a.x - m.x) > 1e-12 * std::max(1.0, std::fabs(a.x))) {
            throw ConfigError(0, "x", "sweep grids differ at point " + std::to_string(i + 1));
        }
        if (!a.analytic) {
            throw ConfigError(0, "analytic", "missing analytic value at x = " + format_number(a.x));
        }
        if (!m.mc) {
            throw ConfigError(0, "mc_estimate", "missing Monte Carlo value at x = " + format_number(a.x));
        }
        const double z = m.mc->z(*a.analytic);
        rep.x.push_back(a.x);
        rep.z.push_back(z);
        rep.max_abs_z = std::max(rep.max_abs_z, std::fabs(z));
        if (std::fabs(z) > 3.0) {
            ++above;
            rep.flagged_x.push_back(a.x);
        }
    }
    if (!rep.x.empty()) {
        rep.fraction_above_3 = static_cast<double>(above) / static_cast<double>(rep.x.size());
    }
    return rep;
}

std::string compare_summary_json(const std::vector<CompareReport>& reports) {
    auto finite_or_null = [](double v) -> nlohmann::json {
        if (std::isfinite(v)) {
            return v;
        }
        return nullptr;
    };
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json points = nlohmann::json::array();
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            points.push_back({{"x", r.x[i]}, {"z", finite_or_null(r.z[i])}});
        }
        doc.push_back({{"curve", r.name},
                       {"points", points},
                       {"max_abs_z", finite_or_null(r.max_abs_z)},
                       {"fraction_abs_z_above_3", r.fraction_above_3},
                       {"flagged_x", r.flagged_x}});
    }
    return doc.dump(2);
}

}  // namespace hetnet
