#include "hetnet/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "hetnet/quadrature.hpp"

namespace hetnet {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint32_t kMovementSubstream = 0xFFFFFFFFu;

}  // namespace

void SimConfig::validate() const {
    if (replications < 1) {
        throw DomainError("replication count must be at least 1");
    }
    if (antithetic && replications % 2 != 0) {
        throw DomainError("antithetic sampling needs an even replication count");
    }
    if (!(window_radius >= 0.0) || !std::isfinite(window_radius)) {
        throw DomainError("window radius must be nonnegative (0 selects the automatic window)");
    }
    if (!(window_scale >= 1.0) || !std::isfinite(window_scale)) {
        throw DomainError("window scale must be at least 1");
    }
}

double default_window_radius(double density, double v) {
    if (!(density > 0.0)) {
        throw DomainError("density must be positive");
    }
    const double cutoff = std::sqrt(12.0 * std::numbers::ln10 / (kPi * density));
    return cutoff + v + 5.0 / std::sqrt(density);
}

TierRealization::TierRealization(double density, double radius, Philox4x32 rng)
    : density_(density), radius_(radius), rng_(rng) {}

void TierRealization::draw_pending() {
    // Fixed draw order per point keeps the sequence independent of how far
    // the tier has been revealed.
    area_ += rng_.exponential();
    pending_angle_ = 2.0 * kPi * 0x1.0p-32 * static_cast<double>(rng_());
    pending_gain_ = rng_.exponential();
    pending_r2_ = area_ / (kPi * density_);
    has_pending_ = true;
}

bool TierRealization::accept_within(double limit2) {
    if (!has_pending_) {
        draw_pending();
    }
    if (pending_r2_ > radius_ * radius_) {
        done_ = true;
        return false;
    }
    if (pending_r2_ > limit2) {
        return false;
    }
    r2_.push_back(pending_r2_);
    angle_.push_back(pending_angle_);
    gain_.push_back(pending_gain_);
    has_pending_ = false;
    return true;
}

void TierRealization::reveal(double extent) {
    const double limit = std::min(extent, radius_);
    while (!done_ && accept_within(limit * limit)) {
    }
}

void TierRealization::reveal_count(std::size_t n) {
    const double all = radius_ * radius_;
    while (!done_ && r2_.size() < n && accept_within(all)) {
    }
}

Point TierRealization::point(std::size_t i) const {
    const double r = std::sqrt(r2_[i]);
    return {r * std::cos(angle_[i]), r * std::sin(angle_[i])};
}

Philox4x32 ReplicationStreams::tier(std::size_t tier) const {
    return Philox4x32(seed_, stream_, static_cast<std::uint32_t>(tier), complement_);
}

Philox4x32 ReplicationStreams::movement() const {
    return Philox4x32(seed_, stream_, kMovementSubstream, complement_);
}

std::vector<double> window_radii(const NetworkModel& net, const SimConfig& cfg, double v) {
    std::vector<double> out;
    for (const auto& t : net.tiers) {
        const double base = cfg.window_radius > 0.0 ? cfg.window_radius
                                                    : default_window_radius(t.density, v);
        out.push_back(base * cfg.window_scale);
    }
    return out;
}

Realization make_realization(const NetworkModel& net, const SimConfig& cfg, double v,
                             const ReplicationStreams& streams) {
    const auto radii = window_radii(net, cfg, v);
    Realization real;
    real.tiers.reserve(net.size());
    for (std::size_t k = 0; k < net.size(); ++k) {
        real.tiers.emplace_back(net.tiers[k].density, radii[k], streams.tier(k));
    }
    return real;
}

Realization sample_realization(const NetworkModel& net, const SimConfig& cfg, double v,
                               const ReplicationStreams& streams) {
    Realization real = make_realization(net, cfg, v, streams);
    for (auto& t : real.tiers) {
        t.reveal_all();
    }
    return real;
}

std::optional<Association> associate(Realization& real, const NetworkModel& net) {
    std::optional<Association> best;
    double best_metric = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < real.tiers.size(); ++k) {
        auto& tier = real.tiers[k];
        tier.reveal_count(1);
        if (tier.size() == 0) {
            return std::nullopt;
        }
        const auto& t = net.tiers[k];
        const double r = std::sqrt(tier.distance2(0));
        // log of P L0 (r/r0)^-alpha B
        const double metric = std::log(t.power_mw()) + std::log(net.l0) -
                              net.alpha * std::log(r / net.r0) + std::log(t.bias);
        if (!best || metric > best_metric) {
            best = Association{k, 0, r};
            best_metric = metric;
        }
    }
    return best;
}

double sir(Realization& real, const Association& serving, const NetworkModel& net) {
    auto& tier = real.tiers.at(serving.tier);
    tier.reveal_all();
    const double scale = net.tiers[serving.tier].power_mw() * net.l0;
    const double half_alpha = 0.5 * net.alpha;
    const double r02 = net.r0 * net.r0;
    auto received = [&](std::size_t i) {
        return scale * tier.gain(i) * std::exp(-half_alpha * std::log(tier.distance2(i) / r02));
    };
    double interference = 0.0;
    for (std::size_t i = 0; i < tier.size(); ++i) {
        if (i != serving.ap) {
            interference += received(i);
        }
    }
    if (interference == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return received(serving.ap) / interference;
}

double far_field_coverage_factor(double density, double r, double window, double tau, double alpha) {
    if (!(window > 0.0) || !(r >= 0.0) || !(alpha > 2.0)) {
        throw DomainError("far-field factor needs window > 0, r >= 0, alpha > 2");
    }
    const double g = tau * std::pow(r / window, alpha);
    // int_W^inf x g(x)/(1+g(x)) dx = W^2 g_W / (alpha-2) * int_0^1 ds / (1 + g_W s^(alpha/(alpha-2)))
    double integral = 0.0;
    if (g < 0.5) {
        // Alternating series in g_W; terms fall geometrically.
        double term = g;
        for (int m = 1; m < 200; ++m) {
            const double add = term / (m * alpha - 2.0);
            integral += (m % 2 == 1) ? add : -add;
            if (add < 1e-17 * integral) {
                break;
            }
            term *= g;
        }
        integral *= window * window;
    } else {
        const double q = alpha / (alpha - 2.0);
        auto f = [&](double s) { return 1.0 / (1.0 + g * std::pow(s, q)); };
        const double inner = require_converged(integrate(f, 0.0, 1.0, QuadratureSpec{1e-13, 1e-12, 200}),
                                               "far-field interference");
        integral = window * window * g / (alpha - 2.0) * inner;
    }
    return std::exp(-2.0 * kPi * density * integral);
}

MoveOutcome move_and_detect_handoff(Realization& real, const Association& serving,
                                    const MobilityProfile& profile, const SimConfig& cfg,
                                    Philox4x32& rng) {
    MoveOutcome out;
    const double v = profile.v;
    if (const auto* fixed = std::get_if<FixedAngle>(&profile.direction)) {
        out.theta = fixed->theta;
    } else {
        out.theta = (cfg.half_plane_angles ? kPi : 2.0 * kPi) * rng.uniform();
    }
    if (v == 0.0) {
        return out;
    }
    auto& tier = real.tiers[serving.tier];
    const double r = serving.distance;

    // Every AP that could beat the serving one lies within R <= r + v of the
    // new position, hence within r + 2v of the old one; it must be inside the window.
    const double edge = tier.radius() - v;
    if (edge < v || edge < r + v) {
        out.discarded = true;
        return out;
    }
    tier.reveal(r + 2.0 * v);

    const Point ap = tier.point(serving.ap);
    // Unit vector pointing from the serving AP through the user (at the origin).
    double ux = 1.0;
    double uy = 0.0;
    if (r > 0.0) {
        ux = -ap.x / r;
        uy = -ap.y / r;
    }
    const double c = std::cos(out.theta);
    const double s = std::sin(out.theta);
    const Point moved{v * (c * ux - s * uy), v * (s * ux + c * uy)};
    auto dist2 = [](Point a, Point b) {
        const double dx = a.x - b.x;
        const double dy = a.y - b.y;
        return dx * dx + dy * dy;
    };
    const double reach2 = dist2(moved, ap);
    for (std::size_t i = 0; i < tier.size(); ++i) {
        if (i != serving.ap && dist2(moved, tier.point(i)) < reach2) {
            out.handoff = true;
            break;
        }
    }
    return out;
}

ReplicationRecord run_replication(const NetworkModel& net, const MobilityProfile& profile,
                                  const SimConfig& cfg, std::uint64_t rep) {
    const std::uint64_t stream = cfg.antithetic ? rep / 2 : rep;
    const bool complement = cfg.antithetic && (rep % 2 == 1);
    const ReplicationStreams streams(cfg.seed, stream, complement);

    ReplicationRecord rec;
    rec.rep = rep;
    Realization real = make_realization(net, cfg, profile.v, streams);
    const auto serving = associate(real, net);
    if (!serving) {
        rec.discarded = true;
        rec.sir_db = std::numeric_limits<double>::quiet_NaN();
        return rec;
    }
    rec.tier = serving->tier;
    rec.r = serving->distance;

    Philox4x32 move_rng = streams.movement();
    const MoveOutcome move = move_and_detect_handoff(real, *serving, profile, cfg, move_rng);
    rec.theta = move.theta;
    rec.handoff = move.handoff;
    rec.discarded = move.discarded;

    if (cfg.evaluate_coverage && !rec.discarded) {
        const auto& t = net.tiers[serving->tier];
        const double s = sir(real, *serving, net);
        rec.sir_db = 10.0 * std::log10(s);
        // Given h >= a (the in-window threshold), h - a is again unit
        // exponential, so it doubles as the draw that decides whether the
        // far-field interference still fits under the signal.
        const double h = real.tiers[serving->tier].gain(serving->ap);
        const double margin = std::isinf(s) ? h : h * (1.0 - t.tau / s);
        if (margin >= 0.0) {
            const double pass = far_field_coverage_factor(t.density, serving->distance,
                                                          real.tiers[serving->tier].radius(), t.tau,
                                                          net.alpha);
            rec.covered = margin >= -std::log(pass);
        }
    } else {
        rec.sir_db = std::numeric_limits<double>::quiet_NaN();
    }
    return rec;
}

Tally::Tally(std::size_t tiers, bool paired, bool coverage)
    : tiers_(tiers), paired_(paired), coverage_(coverage), counts_(4 * tiers + 1, 0) {
    if (paired_) {
        pairs_.assign(categories() * categories(), 0);
    }
}

std::size_t Tally::category_of(const ReplicationRecord& rec) const noexcept {
    if (rec.discarded || !rec.tier) {
        return discard_category();
    }
    return category_of(*rec.tier, rec.covered, rec.handoff);
}

void Tally::add(const ReplicationRecord& rec) { ++counts_[category_of(rec)]; }

void Tally::add_pair(const ReplicationRecord& first, const ReplicationRecord& second) {
    const std::size_t a = category_of(first);
    const std::size_t b = category_of(second);
    ++counts_[a];
    ++counts_[b];
    ++pairs_[a * categories() + b];
}

void Tally::merge(const Tally& other) {
    if (other.tiers_ != tiers_ || other.paired_ != paired_ || other.coverage_ != coverage_) {
        throw DomainError("cannot merge tallies of different shape");
    }
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        counts_[i] += other.counts_[i];
    }
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        pairs_[i] += other.pairs_[i];
    }
}

std::uint64_t Tally::total() const noexcept {
    std::uint64_t n = 0;
    for (auto c : counts_) {
        n += c;
    }
    return n;
}

namespace {

void prepare(const NetworkModel& net, const MobilityProfile& profile, const SimConfig& cfg) {
    net.validate();
    profile.validate();
    cfg.validate();
}

}  // namespace

Tally simulate_serial(const NetworkModel& net, const MobilityProfile& profile, const SimConfig& cfg,
                      std::vector<ReplicationRecord>* log) {
    prepare(net, profile, cfg);
    Tally tally(net.size(), cfg.antithetic, cfg.evaluate_coverage);
    if (log) {
        log->assign(cfg.replications, {});
    }
    const std::uint64_t n = cfg.replications;
    const std::uint64_t step = cfg.antithetic ? 2 : 1;
    for (std::uint64_t rep = 0; rep < n; rep += step) {
        const auto first = run_replication(net, profile, cfg, rep);
        if (log) {
            (*log)[rep] = first;
        }
        if (cfg.antithetic) {
            const auto second = run_replication(net, profile, cfg, rep + 1);
            if (log) {
                (*log)[rep + 1] = second;
            }
            tally.add_pair(first, second);
        } else {
            tally.add(first);
        }
    }
    return tally;
}

Tally simulate(const NetworkModel& net, const MobilityProfile& profile, const SimConfig& cfg,
               std::vector<ReplicationRecord>* log) {
    prepare(net, profile, cfg);
    Tally tally(net.size(), cfg.antithetic, cfg.evaluate_coverage);
    if (log) {
        log->assign(cfg.replications, {});
    }
    const auto units = static_cast<std::int64_t>(cfg.antithetic ? cfg.replications / 2
                                                                 : cfg.replications);
#pragma omp parallel
    {
        Tally local(net.size(), cfg.antithetic, cfg.evaluate_coverage);
#pragma omp for schedule(dynamic, 64)
        for (std::int64_t u = 0; u < units; ++u) {
            if (cfg.antithetic) {
                const auto rep = static_cast<std::uint64_t>(2 * u);
                const auto first = run_replication(net, profile, cfg, rep);
                const auto second = run_replication(net, profile, cfg, rep + 1);
                if (log) {
                    (*log)[rep] = first;
                    (*log)[rep + 1] = second;
                }
                local.add_pair(first, second);
            } else {
                const auto rep = static_cast<std::uint64_t>(u);
                const auto rec = run_replication(net, profile, cfg, rep);
                if (log) {
                    (*log)[rep] = rec;
                }
                local.add(rec);
            }
        }
        // Integer counts: the merge order cannot change the result.
#pragma omp critical(hetnet_tally_merge)
        tally.merge(local);
    }
    return tally;
}

bool EventSpec::needs_coverage() const noexcept {
    switch (kind) {
    case Kind::Always:
    case Kind::Handoff:
    case Kind::Tier:
        return false;
    default:
        return true;
    }
}

double EventSpec::score(std::size_t category) const noexcept {
    const std::size_t t = category / 4;
    const bool covered = (category & 2) != 0;
    const bool handoff = (category & 1) != 0;
    switch (kind) {
    case Kind::Always:
        return 1.0;
    case Kind::Handoff:
        return handoff ? 1.0 : 0.0;
    case Kind::Coverage:
        return covered ? 1.0 : 0.0;
    case Kind::CoverageNoHandoff:
        return covered && !handoff ? 1.0 : 0.0;
    case Kind::CoverageHandoff:
        return covered && handoff ? 1.0 : 0.0;
    case Kind::Tier:
        return t == tier ? 1.0 : 0.0;
    case Kind::TierCoverage:
        return t == tier && covered ? 1.0 : 0.0;
    case Kind::TierCoverageNoHandoff:
        return t == tier && covered && !handoff ? 1.0 : 0.0;
    case Kind::Composite:
        return covered ? (handoff ? 1.0 - beta : 1.0) : 0.0;
    }
    return 0.0;
}

double EstimateWithCI::z(double target) const {
    const double diff = target - estimate;
    if (se > 0.0) {
        return diff / se;
    }
    if (diff == 0.0) {
        return 0.0;
    }
    return std::copysign(std::numeric_limits<double>::infinity(), diff);
}

EstimateWithCI estimate(const EventSpec& event, const Tally& tally, std::uint64_t seed) {
    if (event.kind == EventSpec::Kind::Composite && !(event.beta >= 0.0 && event.beta <= 1.0)) {
        throw DomainError("composite beta must lie in [0, 1]");
    }
    if (event.tier >= tally.tiers()) {
        throw std::out_of_range("event tier out of range");
    }
    if (event.needs_coverage() && !tally.has_coverage()) {
        throw DomainError("coverage event requested from a run that skipped coverage");
    }
    const std::size_t C = tally.categories();
    const std::size_t drop = tally.discard_category();

    double units = 0.0;
    double sum = 0.0;
    // Two passes over (score, count) pairs: mean, then centred second moment.
    auto moments = [&](auto&& visit) {
        visit([&](double y, std::uint64_t n) {
            units += static_cast<double>(n);
            sum += static_cast<double>(n) * y;
        });
        const double mean = units > 0.0 ? sum / units : 0.0;
        double ss = 0.0;
        visit([&](double y, std::uint64_t n) { ss += static_cast<double>(n) * (y - mean) * (y - mean); });
        return std::pair{mean, ss};
    };

    std::pair<double, double> m;
    if (tally.paired()) {
        m = moments([&](auto&& f) {
            for (std::size_t a = 0; a < C; ++a) {
                for (std::size_t b = 0; b < C; ++b) {
                    const auto n = tally.pair_count(a, b);
                    if (n != 0 && a != drop && b != drop) {
                        f(0.5 * (event.score(a) + event.score(b)), n);
                    }
                }
            }
        });
    } else {
        m = moments([&](auto&& f) {
            for (std::size_t c = 0; c < C; ++c) {
                const auto n = tally.count(c);
                if (n != 0 && c != drop) {
                    f(event.score(c), n);
                }
            }
        });
    }
    if (!(units > 0.0)) {
        throw NumericalError("no usable replications (all discarded)", 0.0, 0.0);
    }

    EstimateWithCI out;
    out.estimate = m.first;
    out.se = std::sqrt(m.second / units / units);
    out.replications = static_cast<std::uint64_t>(units) * (tally.paired() ? 2 : 1);
    out.discarded = tally.discarded();
    out.seed = seed;
    const double rate = static_cast<double>(out.discarded) / static_cast<double>(tally.total());
    if (rate > 0.05) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "%.1f%% of replications discarded; the standard error is inflated and the "
                      "estimate is conditioned on the kept replications",
                      100.0 * rate);
        out.warning = buf;
    }
    return out;
}

EstimateWithCI estimate(const EventSpec& event, const NetworkModel& net,
                        const MobilityProfile& profile, const SimConfig& cfg) {
    if (cfg.replications < 100) {
        throw DomainError("estimates need at least 100 replications");
    }
    SimConfig run = cfg;
    run.evaluate_coverage = event.needs_coverage();
    return estimate(event, simulate(net, profile, run), cfg.seed);
}

void write_event_log(std::ostream& out, std::uint64_t seed, double v,
                     const std::vector<ReplicationRecord>& log) {
    out << "seed,rep,tier,r,theta,v,sir_db,covered,handoff,discarded\n";
    char buf[256];
    for (const auto& rec : log) {
        char tier[32] = "";
        if (rec.tier) {
            std::snprintf(tier, sizeof tier, "%zu", *rec.tier + 1);
        }
        std::snprintf(buf, sizeof buf, "%llu,%llu,%s,%.9g,%.9g,%.9g,%.9g,%d,%d,%d\n",
                      static_cast<unsigned long long>(seed), static_cast<unsigned long long>(rec.rep),
                      tier, rec.r, rec.theta, v, rec.sir_db, rec.covered ? 1 : 0,
                      rec.handoff ? 1 : 0, rec.discarded ? 1 : 0);
        out << buf;
    }
}

}  // namespace hetnet
