#include "hetnet/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace hetnet {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

double parse_plain(std::string_view text) {
    text = trim(text);
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, value);
    if (text.empty() || res.ec != std::errc{} || res.ptr != end) {
        throw DomainError("not a number: '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

bool parse_bool(std::string_view text) {
    const std::string v = lower(trim(text));
    if (v == "true" || v == "yes" || v == "on" || v == "1") {
        return true;
    }
    if (v == "false" || v == "no" || v == "off" || v == "0") {
        return false;
    }
    throw DomainError("expected true or false, got '" + std::string(text) + "'");
}

std::uint64_t parse_u64(std::string_view text) {
    text = trim(text);
    std::uint64_t value = 0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, value);
    if (text.empty() || res.ec != std::errc{} || res.ptr != end) {
        throw DomainError("expected a nonnegative integer, got '" + std::string(text) + "'");
    }
    return value;
}

Direction parse_direction(std::string_view text) {
    const std::string v = lower(trim(text));
    if (v == "uniform" || v == "isotropic") {
        return UniformAngle{};
    }
    if (v == "radial") {
        return FixedAngle{0.0};
    }
    return FixedAngle{parse_number(v, true)};
}

std::vector<double> parse_values(std::string_view text) {
    std::vector<double> out;
    for (auto item : split(text, ',')) {
        if (!item.empty()) {
            out.push_back(parse_number(item));
        }
    }
    return out;
}

// "start:step:stop", stop included when it lies on the grid.
std::vector<double> parse_range(std::string_view text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) {
        throw DomainError("range must be start:step:stop");
    }
    const double start = parse_number(parts[0]);
    const double step = parse_number(parts[1]);
    const double stop = parse_number(parts[2]);
    if (!(step > 0.0)) {
        throw DomainError("range step must be positive");
    }
    std::vector<double> out;
    if (stop < start) {
        return out;
    }
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(start + static_cast<double>(i) * step);
    }
    return out;
}

Quantity parse_quantity(std::string_view text) {
    const std::string v = lower(trim(text));
    if (v == "handoff") return Quantity::Handoff;
    if (v == "coverage") return Quantity::Coverage;
    if (v == "optimal_association") return Quantity::OptimalAssociation;
    if (v == "optimal_bias_db") return Quantity::OptimalBiasDb;
    throw DomainError("unknown quantity '" + v +
                      "' (handoff, coverage, optimal_association, optimal_bias_db)");
}

AnalyticMethod parse_method(std::string_view text) {
    const std::string v = lower(trim(text));
    if (v == "default" || v == "formula") return AnalyticMethod::Default;
    if (v == "none") return AnalyticMethod::None;
    if (v == "exact") return AnalyticMethod::Exact;
    if (v == "approx") return AnalyticMethod::Approx;
    if (v == "radial") return AnalyticMethod::Radial;
    if (v == "exact_geometry") return AnalyticMethod::ExactGeometry;
    if (v == "stationary") return AnalyticMethod::Stationary;
    throw DomainError("unknown analytic method '" + v + "'");
}

AssociationRule parse_rule(std::string_view text) {
    const std::string v = lower(trim(text));
    if (v == "biases") return AssociationRule::Biases;
    if (v == "stationary_optimum") return AssociationRule::StationaryOptimum;
    if (v == "max_sir") return AssociationRule::MaxSir;
    if (v == "optimal") return AssociationRule::Optimal;
    throw DomainError("unknown association rule '" + v +
                      "' (biases, stationary_optimum, max_sir, optimal)");
}

SweepVariable parse_sweep(std::string_view text) {
    const std::string v = lower(trim(text));
    if (v == "v" || v == "speed") return SweepVariable::Speed;
    if (v == "density") return SweepVariable::Density;
    if (v == "beta") return SweepVariable::Beta;
    if (v == "tau_db") return SweepVariable::TauDb;
    if (v == "association") return SweepVariable::Association;
    throw DomainError("unknown sweep variable '" + v + "' (v, density, beta, tau_db, association)");
}

std::size_t parse_tier_index(std::string_view text) {
    const auto k = parse_u64(text);
    if (k < 1) {
        throw DomainError("tier numbers start at 1");
    }
    return static_cast<std::size_t>(k - 1);
}

struct CurveDraft {
    CurveSpec spec;
    bool mc_set = false;
    std::size_t line = 0;
};

class Parser {
public:
    Scenario run(std::string_view text) {
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto nl = text.find('\n', pos);
            std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
            pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
            ++line_no;
            const auto hash = line.find_first_of("#;");
            if (hash != std::string_view::npos) {
                line = line.substr(0, hash);
            }
            line = trim(line);
            if (line.empty()) {
                continue;
            }
            if (line.front() == '[') {
                if (line.back() != ']') {
                    throw ConfigError(line_no, "", "unterminated section header");
                }
                open_section(lower(trim(line.substr(1, line.size() - 2))), line_no);
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigError(line_no, std::string(line), "expected key = value");
            }
            const std::string key = lower(trim(line.substr(0, eq)));
            const std::string_view value = trim(line.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError(line_no, "", "missing key before '='");
            }
            if (!seen_.insert(key).second) {
                throw ConfigError(line_no, key, "duplicate key in [" + section_ + "]");
            }
            try {
                assign(key, value, line_no);
            } catch (const ConfigError&) {
                throw;
            } catch (const std::exception& e) {
                throw ConfigError(line_no, key, e.what());
            }
        }
        close_curve();
        return finish();
    }

private:
    void open_section(const std::string& name, std::size_t line) {
        static const std::set<std::string> known{"network", "tier", "mobility", "sim", "output",
                                                 "curve"};
        if (!known.count(name)) {
            throw ConfigError(line, name, "unknown section [" + name + "]");
        }
        close_curve();
        const bool repeatable = name == "tier" || name == "curve";
        if (!repeatable && !singletons_.insert(name).second) {
            throw ConfigError(line, name, "section [" + name + "] appears twice");
        }
        section_ = name;
        seen_.clear();
        if (name == "tier") {
            s_.net.tiers.push_back(TierParams{});
            tier_lines_.push_back(line);
        } else if (name == "curve") {
            curve_ = CurveDraft{};
            curve_->line = line;
        }
    }

    void close_curve() {
        if (!curve_) {
            return;
        }
        auto& c = curve_->spec;
        if (!curve_->mc_set) {
            c.monte_carlo = c.quantity != Quantity::OptimalBiasDb;
        }
        if (c.name.empty()) {
            c.name = "curve" + std::to_string(s_.curves.size() + 1);
        }
        if (c.values.empty()) {
            throw ConfigError(curve_->line, "values", "curve '" + c.name + "' has an empty sweep");
        }
        curve_lines_.push_back(curve_->line);
        s_.curves.push_back(std::move(c));
        curve_.reset();
    }

    void assign(const std::string& key, std::string_view value, std::size_t line) {
        auto unknown = [&] {
            throw ConfigError(line, key, "unknown key in [" + section_ + "]");
        };
        if (section_.empty()) {
            throw ConfigError(line, key, "key outside any section");
        }
        if (section_ == "network") {
            if (key == "alpha") s_.net.alpha = parse_number(value);
            else if (key == "beta") s_.net.beta = parse_number(value);
            else if (key == "l0_db") s_.net.l0 = db_to_linear(parse_number(value));
            else if (key == "r0") s_.net.r0 = parse_number(value);
            else if (key == "abs_tol") s_.quad.abs_tol = parse_number(value);
            else if (key == "rel_tol") s_.quad.rel_tol = parse_number(value);
            else unknown();
        } else if (section_ == "tier") {
            auto& t = s_.net.tiers.back();
            if (key == "density") t.density = parse_number(value);
            else if (key == "power_dbm") t.power_dbm = parse_number(value);
            else if (key == "tau") set_once_tau(t, parse_number(value), line, key);
            else if (key == "tau_db") set_once_tau(t, db_to_linear(parse_number(value)), line, key);
            else if (key == "bias") t.bias = parse_number(value);
            else if (key == "bias_db") t.bias = db_to_linear(parse_number(value));
            else unknown();
        } else if (section_ == "mobility") {
            if (key == "v") s_.mobility.v = parse_number(value);
            else if (key == "direction") s_.mobility.direction = parse_direction(value);
            else unknown();
        } else if (section_ == "sim") {
            if (key == "reps") s_.sim.replications = parse_u64(value);
            else if (key == "seed") s_.sim.seed = parse_u64(value);
            else if (key == "window_radius") s_.sim.window_radius = parse_number(value);
            else if (key == "window_scale") s_.sim.window_scale = parse_number(value);
            else if (key == "antithetic") s_.sim.antithetic = parse_bool(value);
            else if (key == "half_plane") s_.sim.half_plane_angles = parse_bool(value);
            else unknown();
        } else if (section_ == "output") {
            if (key == "dir") s_.output_dir = std::string(value);
            else if (key == "name") s_.name = std::string(value);
            else unknown();
        } else if (section_ == "curve") {
            auto& c = curve_->spec;
            if (key == "name") c.name = std::string(value);
            else if (key == "quantity") c.quantity = parse_quantity(value);
            else if (key == "analytic") c.analytic = parse_method(value);
            else if (key == "mc") {
                c.monte_carlo = parse_bool(value);
                curve_->mc_set = true;
            } else if (key == "association") c.association = parse_rule(value);
            else if (key == "sweep") c.sweep = parse_sweep(value);
            else if (key == "tier") c.tier = parse_tier_index(value);
            else if (key == "values") set_values(c, parse_values(value), line, key);
            else if (key == "range") set_values(c, parse_range(value), line, key);
            else if (key == "beta") c.beta = parse_number(value);
            else if (key == "density") c.density = parse_number(value);
            else if (key == "v") c.v = parse_number(value);
            else if (key == "direction") c.direction = parse_direction(value);
            else unknown();
        }
    }

    void set_once_tau(TierParams& t, double tau, std::size_t line, const std::string& key) {
        if (seen_.count("tau") && seen_.count("tau_db")) {
            throw ConfigError(line, key, "give either tau or tau_db, not both");
        }
        t.tau = tau;
    }

    void set_values(CurveSpec& c, std::vector<double> values, std::size_t line,
                    const std::string& key) {
        if (seen_.count("values") && seen_.count("range")) {
            throw ConfigError(line, key, "give either values or range, not both");
        }
        if (values.empty()) {
            throw ConfigError(line, key, "empty sweep range");
        }
        for (std::size_t i = 1; i < values.size(); ++i) {
            if (!(values[i] > values[i - 1])) {
                throw ConfigError(line, key, "sweep values must be strictly increasing");
            }
        }
        c.values = std::move(values);
    }

    Scenario finish() {
        if (s_.net.tiers.empty()) {
            throw ConfigError(0, "tier", "scenario defines no [tier] section");
        }
        for (std::size_t k = 0; k < s_.net.tiers.size(); ++k) {
            try {
                s_.net.tiers[k].validate();
            } catch (const DomainError& e) {
                throw ConfigError(tier_lines_[k], "tier", e.what());
            }
        }
        try {
            s_.net.validate();
            s_.mobility.validate();
            s_.sim.validate();
            s_.quad.validate();
        } catch (const DomainError& e) {
            throw ConfigError(0, "", e.what());
        }
        for (std::size_t i = 0; i < s_.curves.size(); ++i) {
            Scenario one = s_;
            one.curves = {s_.curves[i]};
            try {
                one.validate();
            } catch (const ConfigError& e) {
                throw ConfigError(curve_lines_[i], e.field(), e.what());
            }
        }
        return std::move(s_);
    }

    Scenario s_;
    std::string section_;
    std::set<std::string> seen_;
    std::set<std::string> singletons_;
    std::optional<CurveDraft> curve_;
    std::vector<std::size_t> tier_lines_;
    std::vector<std::size_t> curve_lines_;
};

// Densities and sweep grids that the reference setups leave open are choices
// of this tool and are marked as such in each preset.
const std::map<std::string, std::string>& presets() {
    static const std::map<std::string, std::string> table{
        {"fig3", R"(# Handoff rate vs displacement (density 1/1000 m^2) and vs density (v = 5 m).
# Sweep grids are a choice of this preset.
[network]
alpha = 3.5

[tier]
density = 1/1000
power_dbm = 46
tau_db = 0

[mobility]
v = 5
direction = uniform

[sim]
reps = 100000
seed = 1

[output]
name = fig3

[curve]
name = rate_vs_v_radial
quantity = handoff
direction = radial
analytic = radial
sweep = v
values = 1, 2.5, 5, 7.5, 10, 12.5, 15

[curve]
name = rate_vs_v_uniform
quantity = handoff
analytic = approx
sweep = v
values = 1, 2.5, 5, 7.5, 10, 12.5, 15

[curve]
name = rate_vs_density_radial
quantity = handoff
direction = radial
analytic = radial
sweep = density
values = 0.1/1000, 0.5/1000, 1/1000, 2/1000, 5/1000, 10/1000

[curve]
name = rate_vs_density_uniform
quantity = handoff
analytic = approx
sweep = density
values = 0.1/1000, 0.5/1000, 1/1000, 2/1000, 5/1000, 10/1000
)"},
        {"fig4", R"(# Single-tier coverage vs displacement with handoff cost, beta = 0.3 and 0.9,
# tau = 0 dB, alpha = 3.5. The densities {0.1, 1, 10}/1000 m^2 and the v grid
# are a choice of this preset.
[network]
alpha = 3.5

[tier]
density = 1/1000
power_dbm = 46
tau_db = 0

[mobility]
direction = uniform

[sim]
reps = 100000
seed = 1

[output]
name = fig4

[curve]
name = beta0.3_density0.1
beta = 0.3
density = 0.1/1000
sweep = v
values = 0, 5, 10, 15, 20, 30, 40

[curve]
name = beta0.3_density1
beta = 0.3
density = 1/1000
sweep = v
values = 0, 5, 10, 15, 20, 30, 40

[curve]
name = beta0.3_density10
beta = 0.3
density = 10/1000
sweep = v
values = 0, 5, 10, 15, 20, 30, 40

[curve]
name = beta0.9_density0.1
beta = 0.9
density = 0.1/1000
sweep = v
values = 0, 5, 10, 15, 20, 30, 40

[curve]
name = beta0.9_density1
beta = 0.9
density = 1/1000
sweep = v
values = 0, 5, 10, 15, 20, 30, 40

[curve]
name = beta0.9_density10
beta = 0.9
density = 10/1000
sweep = v
values = 0, 5, 10, 15, 20, 30, 40
)"},
        {"fig5", R"(# Single-tier coverage vs SIR threshold at v = 15 m, beta = 0.3 and 0.9.
# The densities {0.1, 1, 10}/1000 m^2 and the threshold grid are a choice of
# this preset.
[network]
alpha = 3.5

[tier]
density = 1/1000
power_dbm = 46
tau_db = 0

[mobility]
v = 15
direction = uniform

[sim]
reps = 100000
seed = 1

[output]
name = fig5

[curve]
name = beta0.3_density0.1
beta = 0.3
density = 0.1/1000
sweep = tau_db
range = -10:2.5:10

[curve]
name = beta0.3_density1
beta = 0.3
density = 1/1000
sweep = tau_db
range = -10:2.5:10

[curve]
name = beta0.3_density10
beta = 0.3
density = 10/1000
sweep = tau_db
range = -10:2.5:10

[curve]
name = beta0.9_density0.1
beta = 0.9
density = 0.1/1000
sweep = tau_db
range = -10:2.5:10

[curve]
name = beta0.9_density1
beta = 0.9
density = 1/1000
sweep = tau_db
range = -10:2.5:10

[curve]
name = beta0.9_density10
beta = 0.9
density = 10/1000
sweep = tau_db
range = -10:2.5:10
)"},
        {"fig6", R"(# Two-tier stationary coverage vs the lower tier's association probability.
# The A2 grid is a choice of this preset.
[network]
alpha = 3.5
beta = 0

[tier]
density = 0.1/1000
power_dbm = 46
tau_db = 0

[tier]
density = 1/1000
power_dbm = 20
tau_db = 0

[mobility]
v = 0

[sim]
reps = 100000
seed = 1

[output]
name = fig6

[curve]
name = coverage_vs_a2
quantity = coverage
analytic = stationary
sweep = association
tier = 2
range = 0.05:0.05:0.95
)"},
        {"fig7", R"(# Two-tier mobility-aware association: coverage, optimal A2 and bias vs v,
# beta = 0.9, tau = 0 dB on both tiers. The v grid is a choice of this preset.
[network]
alpha = 3.5
beta = 0.9

[tier]
density = 0.1/1000
power_dbm = 46
tau_db = 0

[tier]
density = 10/1000
power_dbm = 20
tau_db = 0

[mobility]
direction = uniform

[sim]
reps = 100000
seed = 1

[output]
name = fig7

[curve]
name = coverage_optimum_bias
quantity = coverage
association = optimal
sweep = v
range = 0:5:30

[curve]
name = coverage_optimum_bias_at_v0
quantity = coverage
association = stationary_optimum
sweep = v
range = 0:5:30

[curve]
name = coverage_max_sir
quantity = coverage
association = max_sir
sweep = v
range = 0:5:30

[curve]
name = optimal_a2
quantity = optimal_association
tier = 2
sweep = v
range = 0:5:30

[curve]
name = optimal_bias2_db
quantity = optimal_bias_db
tier = 2
sweep = v
range = 0:5:30
)"},
    };
    return table;
}

}  // namespace

ConfigError::ConfigError(std::size_t line, std::string field, const std::string& message)
    : DomainError((line ? "line " + std::to_string(line) + ": " : std::string()) +
                  (field.empty() ? std::string() : field + ": ") + message),
      line_(line),
      field_(std::move(field)) {}

double parse_number(std::string_view text, bool angle) {
    text = trim(text);
    double scale = 1.0;
    if (angle && text.size() > 3 && lower(text.substr(text.size() - 3)) == "deg") {
        text = trim(text.substr(0, text.size() - 3));
        scale = std::numbers::pi / 180.0;
    }
    const auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        const double den = parse_plain(text.substr(slash + 1));
        if (den == 0.0) {
            throw DomainError("division by zero in '" + std::string(text) + "'");
        }
        return scale * parse_plain(text.substr(0, slash)) / den;
    }
    return scale * parse_plain(text);
}

void Scenario::validate() const {
    const std::size_t K = net.size();
    for (const auto& c : curves) {
        auto fail = [&](const std::string& field, const std::string& msg) {
            throw ConfigError(0, field, "curve '" + c.name + "': " + msg);
        };
        if (c.values.empty()) {
            fail("values", "empty sweep range");
        }
        for (std::size_t i = 1; i < c.values.size(); ++i) {
            if (!(c.values[i] > c.values[i - 1])) {
                fail("values", "sweep values must be strictly increasing");
            }
        }
        if (c.tier >= K) {
            fail("tier", "tier " + std::to_string(c.tier + 1) + " does not exist");
        }
        const Direction dir = c.direction.value_or(mobility.direction);
        switch (c.quantity) {
        case Quantity::Handoff:
            if (K != 1) {
                fail("quantity", "handoff curves need a single-tier network");
            }
            if (c.analytic == AnalyticMethod::ExactGeometry || c.analytic == AnalyticMethod::Stationary) {
                fail("analytic", "use exact, approx, radial or none for handoff");
            }
            if (c.analytic == AnalyticMethod::Radial) {
                const auto* fixed = std::get_if<FixedAngle>(&dir);
                if (!fixed || fixed->theta != 0.0) {
                    fail("analytic", "the radial formula needs direction = radial");
                }
            }
            if (c.analytic == AnalyticMethod::Approx && !std::holds_alternative<UniformAngle>(dir)) {
                fail("analytic", "the approximate rate assumes direction = uniform");
            }
            break;
        case Quantity::Coverage:
            if (c.analytic == AnalyticMethod::Exact || c.analytic == AnalyticMethod::Approx ||
                c.analytic == AnalyticMethod::Radial) {
                fail("analytic", "use formula, exact_geometry, stationary or none for coverage");
            }
            if (c.analytic == AnalyticMethod::ExactGeometry && K != 1) {
                fail("analytic", "exact_geometry coverage is single-tier only");
            }
            break;
        case Quantity::OptimalAssociation:
        case Quantity::OptimalBiasDb:
            if (c.analytic != AnalyticMethod::Default && c.analytic != AnalyticMethod::None) {
                fail("analytic", "optimizer curves take no analytic method");
            }
            if (c.sweep == SweepVariable::Association) {
                fail("sweep", "cannot sweep the association of an association optimum");
            }
            if (c.quantity == Quantity::OptimalBiasDb && c.monte_carlo) {
                fail("mc", "a bias has no Monte Carlo estimate");
            }
            break;
        }
        if (c.sweep == SweepVariable::Association) {
            if (K != 2) {
                fail("sweep", "association sweeps need exactly two tiers");
            }
            if (c.quantity != Quantity::Coverage) {
                fail("sweep", "association sweeps apply to coverage");
            }
            for (double a : c.values) {
                if (!(a > 0.0 && a < 1.0)) {
                    fail("values", "association values must lie strictly inside (0, 1)");
                }
            }
        }
        if (c.beta && !(*c.beta >= 0.0 && *c.beta <= 1.0)) {
            fail("beta", "beta must lie in [0, 1]");
        }
        if (c.density && !(*c.density > 0.0)) {
            fail("density", "density must be positive");
        }
        if (c.v && !(*c.v >= 0.0)) {
            fail("v", "v must be nonnegative");
        }
    }
}

Scenario parse_scenario(std::string_view text) { return Parser{}.run(text); }

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(0, path, "cannot open scenario file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& [name, text] : presets()) {
        out.push_back(name);
    }
    return out;
}

std::string preset_text(const std::string& name) {
    const auto it = presets().find(name);
    if (it == presets().end()) {
        std::string known;
        for (const auto& n : preset_names()) {
            known += (known.empty() ? "" : ", ") + n;
        }
        throw ConfigError(0, name, "unknown preset (available: " + known + ")");
    }
    return it->second;
}

Scenario load_preset(const std::string& name) { return parse_scenario(preset_text(name)); }

}  // namespace hetnet
