#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hetnet/model.hpp"
#include "hetnet/rng.hpp"

namespace hetnet {

struct SimConfig {
    std::size_t replications = 100000;
    std::uint64_t seed = 1;
    /// > 0 replaces the automatic per-tier base radius (m).
    double window_radius = 0.0;
    /// Multiplies every tier's window. Points are generated outward from the
    /// user, so a scaled window contains the unscaled realization.
    double window_scale = 1.0;
    /// Pairs replications 2m and 2m+1 on complemented uniforms.
    bool antithetic = false;
    /// Draw uniform movement angles on [0, pi) instead of [0, 2 pi).
    bool half_plane_angles = false;
    /// Evaluate SIR and coverage. Handoff- or association-only runs can skip
    /// the interference sum, which dominates the cost.
    bool evaluate_coverage = true;

    void validate() const;
};

/// Automatic window for one tier: nearest-AP cutoff (tail < 1e-12) plus the
/// displacement plus 5 mean inter-AP spacings. Interference from beyond the
/// window is accounted for exactly (see far_field_coverage_factor), so the
/// window only sets how much of the SIR is simulated explicitly.
[[nodiscard]] double default_window_radius(double density, double v);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// One tier's PPP inside a disc centred on the user. Points are produced in
/// order of increasing distance (cumulative unit-rate exponential areas), so
/// callers can reveal only as far out as they need; the realization does not
/// depend on how far it has been revealed.
class TierRealization {
public:
    TierRealization(double density, double radius, Philox4x32 rng);

    [[nodiscard]] double density() const noexcept { return density_; }
    [[nodiscard]] double radius() const noexcept { return radius_; }

    /// Generates every point within `extent` (capped at the window radius).
    void reveal(double extent);
    void reveal_all() { reveal(radius_); }
    /// Generates at least `n` points unless the window runs out first.
    void reveal_count(std::size_t n);
    [[nodiscard]] bool complete() const noexcept { return done_; }

    [[nodiscard]] std::size_t size() const noexcept { return r2_.size(); }
    [[nodiscard]] double distance2(std::size_t i) const { return r2_[i]; }
    [[nodiscard]] double gain(std::size_t i) const { return gain_[i]; }
    [[nodiscard]] Point point(std::size_t i) const;

private:
    void draw_pending();
    bool accept_within(double limit2);

    double density_;
    double radius_;
    Philox4x32 rng_;
    double area_ = 0.0;  // cumulative pi * density * r^2 of the pending point
    bool has_pending_ = false;
    bool done_ = false;
    double pending_r2_ = 0.0;
    double pending_angle_ = 0.0;
    double pending_gain_ = 0.0;
    std::vector<double> r2_;
    std::vector<double> angle_;
    std::vector<double> gain_;
};

/// All tiers around a user at the origin.
struct Realization {
    std::vector<TierRealization> tiers;
};

/// The random streams that belong to one replication.
class ReplicationStreams {
public:
    ReplicationStreams(std::uint64_t seed, std::uint64_t stream, bool complement)
        : seed_(seed), stream_(stream), complement_(complement) {}

    [[nodiscard]] Philox4x32 tier(std::size_t tier) const;
    [[nodiscard]] Philox4x32 movement() const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    bool complement_;
};

/// Window radius of every tier for displacement v.
[[nodiscard]] std::vector<double> window_radii(const NetworkModel& net, const SimConfig& cfg, double v);

/// Unrevealed realization; operations reveal what they need.
[[nodiscard]] Realization make_realization(const NetworkModel& net, const SimConfig& cfg, double v,
                                           const ReplicationStreams& streams);

/// Fully revealed realization.
[[nodiscard]] Realization sample_realization(const NetworkModel& net, const SimConfig& cfg,
                                             double v, const ReplicationStreams& streams);

struct Association {
    std::size_t tier = 0;
    std::size_t ap = 0;  // index within the tier; 0 is always the nearest
    double distance = 0.0;
};

/// Biased max-received-power association; nullopt if some tier has no AP in
/// its window. Ties go to the lowest tier index.
[[nodiscard]] std::optional<Association> associate(Realization& real, const NetworkModel& net);

/// Same-tier SIR at the user over the serving tier's window; +infinity when
/// the serving AP has no interferer.
[[nodiscard]] double sir(Realization& real, const Association& serving, const NetworkModel& net);

/// Probability that the same-tier interference from beyond the window does
/// not break coverage: E[exp(-tau (r/r0)^alpha I_far / ...)] over the outer
/// PPP and its fading, i.e. exp(-2 pi density int_W^inf x g/(1+g) dx) with
/// g = tau (r/x)^alpha.
[[nodiscard]] double far_field_coverage_factor(double density, double r, double window,
                                               double tau, double alpha);

struct MoveOutcome {
    bool handoff = false;
    bool discarded = false;  // displaced position too close to the window edge
    double theta = 0.0;      // angle to the user->AP line, 0 = moving away
};

[[nodiscard]] MoveOutcome move_and_detect_handoff(Realization& real, const Association& serving,
                                                  const MobilityProfile& profile,
                                                  const SimConfig& cfg, Philox4x32& rng);

struct ReplicationRecord {
    std::uint64_t rep = 0;
    std::optional<std::size_t> tier;
    double r = 0.0;
    double theta = 0.0;
    double sir_db = 0.0;  // in-window SIR; NaN when coverage is not evaluated
    bool covered = false;
    bool handoff = false;
    bool discarded = false;
};

/// Runs replication `rep` end to end. Coverage is decided exactly: the
/// serving gain must clear the in-window threshold, and because the fading is
/// memoryless the excess must also beat -log(far_field_coverage_factor).
[[nodiscard]] ReplicationRecord run_replication(const NetworkModel& net,
                                                const MobilityProfile& profile,
                                                const SimConfig& cfg, std::uint64_t rep);

/// Integer outcome counts. A replication falls into category
/// 4*tier + 2*covered + handoff, or `discard_category()` when discarded.
/// Antithetic runs additionally count (first, second) category pairs.
class Tally {
public:
    explicit Tally(std::size_t tiers = 1, bool paired = false, bool coverage = true);

    [[nodiscard]] std::size_t tiers() const noexcept { return tiers_; }
    [[nodiscard]] bool paired() const noexcept { return paired_; }
    [[nodiscard]] bool has_coverage() const noexcept { return coverage_; }
    [[nodiscard]] std::size_t categories() const noexcept { return 4 * tiers_ + 1; }
    [[nodiscard]] std::size_t discard_category() const noexcept { return 4 * tiers_; }
    [[nodiscard]] static std::size_t category_of(std::size_t tier, bool covered, bool handoff) noexcept {
        return 4 * tier + (covered ? 2 : 0) + (handoff ? 1 : 0);
    }
    [[nodiscard]] std::size_t category_of(const ReplicationRecord& rec) const noexcept;

    void add(const ReplicationRecord& rec);
    void add_pair(const ReplicationRecord& first, const ReplicationRecord& second);
    void merge(const Tally& other);

    [[nodiscard]] std::uint64_t count(std::size_t category) const { return counts_.at(category); }
    [[nodiscard]] std::uint64_t pair_count(std::size_t first, std::size_t second) const {
        return pairs_.at(first * categories() + second);
    }
    [[nodiscard]] std::uint64_t total() const noexcept;
    [[nodiscard]] std::uint64_t discarded() const noexcept { return counts_[discard_category()]; }

    friend bool operator==(const Tally&, const Tally&) = default;

private:
    std::size_t tiers_;
    bool paired_;
    bool coverage_;
    std::vector<std::uint64_t> counts_;
    std::vector<std::uint64_t> pairs_;
};

/// Reference kernel: replications in index order on one thread.
[[nodiscard]] Tally simulate_serial(const NetworkModel& net, const MobilityProfile& profile,
                                    const SimConfig& cfg,
                                    std::vector<ReplicationRecord>* log = nullptr);

/// OpenMP kernel with thread-local tallies; results equal simulate_serial's.
[[nodiscard]] Tally simulate(const NetworkModel& net, const MobilityProfile& profile,
                             const SimConfig& cfg, std::vector<ReplicationRecord>* log = nullptr);

struct EventSpec {
    enum class Kind {
        Always,
        Handoff,
        Coverage,
        CoverageNoHandoff,
        CoverageHandoff,
        Tier,
        TierCoverage,
        TierCoverageNoHandoff,
        Composite,  // (1 - beta) cov + beta cov * no-handoff, summed over tiers
    };
    Kind kind = Kind::Always;
    std::size_t tier = 0;
    double beta = 0.0;

    [[nodiscard]] bool needs_coverage() const noexcept;
    /// Score of one non-discarded replication category, in [0, 1].
    [[nodiscard]] double score(std::size_t category) const noexcept;
};

struct EstimateWithCI {
    double estimate = 0.0;
    double se = 0.0;
    std::uint64_t replications = 0;  // replications that entered the estimate
    std::uint64_t discarded = 0;
    std::uint64_t seed = 0;
    std::string warning;

    /// (target - estimate) / se; 0 or +-inf when se = 0.
    [[nodiscard]] double z(double target) const;
};

/// Estimate from an existing tally. Discarded replications are dropped; for
/// antithetic tallies the pair is the sampling unit and a pair with a discard
/// is dropped whole.
[[nodiscard]] EstimateWithCI estimate(const EventSpec& event, const Tally& tally, std::uint64_t seed);

/// Runs the parallel kernel (skipping coverage when the event does not need
/// it) and estimates `event`.
[[nodiscard]] EstimateWithCI estimate(const EventSpec& event, const NetworkModel& net,
                                      const MobilityProfile& profile, const SimConfig& cfg);

void write_event_log(std::ostream& out, std::uint64_t seed, double v,
                     const std::vector<ReplicationRecord>& log);

}  // namespace hetnet
