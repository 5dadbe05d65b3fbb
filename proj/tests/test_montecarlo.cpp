#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "hetnet/analytic.hpp"
#include "hetnet/montecarlo.hpp"
#include "hetnet/multitier.hpp"
#include "hetnet/quadrature.hpp"
#include "oracles.hpp"

using namespace hetnet;
using Kind = EventSpec::Kind;

namespace {

SimConfig config(std::size_t reps, std::uint64_t seed) {
    SimConfig cfg;
    cfg.replications = reps;
    cfg.seed = seed;
    return cfg;
}

bool within(const EstimateWithCI& e, double target, double k = 4.0) { return std::fabs(e.z(target)) < k; }

bool agree(const EstimateWithCI& a, const EstimateWithCI& b, double k = 4.0) {
    return std::fabs(a.estimate - b.estimate) < k * std::hypot(a.se, b.se);
}

NetworkModel biased_two_tier() {
    NetworkModel net;
    net.tiers = {{1e-4, 46.0, 1.0, 1.0}, {1e-3, 20.0, db_to_linear(-2.0), db_to_linear(8.0)}};
    net.alpha = 3.5;
    return net;
}

}  // namespace

TEST_CASE("configuration checks") {
    SimConfig cfg;
    cfg.replications = 0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg.replications = 101;
    cfg.antithetic = true;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg.antithetic = false;
    cfg.window_scale = 0.5;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg.window_scale = 1.0;
    cfg.window_radius = -1.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);

    const auto net = NetworkModel::single_tier(1e-3, 1.0, 3.5);
    CHECK_THROWS_AS((void)estimate(EventSpec{Kind::Coverage}, net, MobilityProfile::isotropic(0.0), config(99, 1)),
                    DomainError);
}

TEST_CASE("point counts in the window are Poisson") {
    const auto net = NetworkModel::single_tier(1e-3, 1.0, 3.5);
    auto cfg = config(1, 3);
    cfg.window_radius = 100.0;
    const double mean = 1e-3 * oracle::pi * 100.0 * 100.0;
    const int n = 4000;
    double s = 0.0;
    double s2 = 0.0;
    double cos_sum = 0.0;
    double points = 0.0;
    for (int rep = 0; rep < n; ++rep) {
        auto real = sample_realization(net, cfg, 0.0, ReplicationStreams(cfg.seed, rep, false));
        const auto& t = real.tiers[0];
        const double c = static_cast<double>(t.size());
        s += c;
        s2 += c * c;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const auto p = t.point(i);
            cos_sum += p.x / std::sqrt(t.distance2(i));
            CHECK(t.distance2(i) <= 100.0 * 100.0);
            if (i > 0) {
                CHECK(t.distance2(i) >= t.distance2(i - 1));
            }
        }
        points += c;
    }
    const double m = s / n;
    const double var = s2 / n - m * m;
    CHECK(std::fabs(m - mean) < 4.0 * std::sqrt(mean / n));
    CHECK(var / mean == doctest::Approx(1.0).epsilon(0.1));
    CHECK(std::fabs(cos_sum / points) < 4.0 * std::sqrt(0.5 / points));
}

TEST_CASE("an almost empty window discards the replication") {
    const auto net = NetworkModel::single_tier(1e-12, 1.0, 3.5);
    auto cfg = config(200, 1);
    cfg.window_radius = 1000.0;
    const auto tally = simulate(net, MobilityProfile::isotropic(1.0), cfg);
    CHECK(tally.discarded() == 200);
    CHECK_THROWS_AS((void)estimate(EventSpec{Kind::Coverage}, tally, cfg.seed), NumericalError);
}

TEST_CASE("realizations are reproducible and windows nest") {
    const auto net = biased_two_tier();
    auto cfg = config(1, 77);
    auto a = sample_realization(net, cfg, 10.0, ReplicationStreams(77, 5, false));
    auto b = sample_realization(net, cfg, 10.0, ReplicationStreams(77, 5, false));
    auto c = sample_realization(net, cfg, 10.0, ReplicationStreams(78, 5, false));
    REQUIRE(a.tiers[1].size() > 0);
    CHECK(a.tiers[1].size() == b.tiers[1].size());
    CHECK(a.tiers[1].distance2(0) == b.tiers[1].distance2(0));
    CHECK(a.tiers[1].distance2(0) != c.tiers[1].distance2(0));

    cfg.window_scale = 2.0;
    auto wide = make_realization(net, cfg, 10.0, ReplicationStreams(77, 5, false));
    for (std::size_t k = 0; k < 2; ++k) {
        wide.tiers[k].reveal(a.tiers[k].radius());
        REQUIRE(wide.tiers[k].size() == a.tiers[k].size());
        for (std::size_t i = 0; i < a.tiers[k].size(); ++i) {
            CHECK(wide.tiers[k].distance2(i) == a.tiers[k].distance2(i));
            CHECK(wide.tiers[k].gain(i) == a.tiers[k].gain(i));
        }
    }
}

TEST_CASE("single tier associates with the nearest AP") {
    const auto net = NetworkModel::single_tier(1e-3, 1.0, 3.5);
    const auto cfg = config(1, 9);
    for (int rep = 0; rep < 50; ++rep) {
        auto real = sample_realization(net, cfg, 0.0, ReplicationStreams(9, rep, false));
        const auto s = associate(real, net);
        REQUIRE(s);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < real.tiers[0].size(); ++i) {
            best = std::min(best, std::sqrt(real.tiers[0].distance2(i)));
        }
        CHECK(s->distance == best);
        CHECK(s->ap == 0);
    }
}

TEST_CASE("outcomes do not depend on the reference loss") {
    auto net = biased_two_tier();
    auto scaled = net;
    scaled.l0 *= 1e6;
    const auto cfg = config(1, 4);
    const auto prof = MobilityProfile::isotropic(10.0);
    for (std::uint64_t rep = 0; rep < 200; ++rep) {
        const auto a = run_replication(net, prof, cfg, rep);
        const auto b = run_replication(scaled, prof, cfg, rep);
        CHECK(a.tier == b.tier);
        CHECK(a.covered == b.covered);
        CHECK(a.handoff == b.handoff);
        CHECK(a.sir_db == doctest::Approx(b.sir_db).epsilon(1e-9));
    }
}

TEST_CASE("a lone AP has infinite SIR") {
    const auto net = NetworkModel::single_tier(1e-3, 1.0, 3.5);
    auto cfg = config(1, 12);
    cfg.window_radius = std::sqrt(1.0 / (1e-3 * oracle::pi));  // one AP expected
    int found = 0;
    for (int rep = 0; rep < 200 && found < 5; ++rep) {
        auto real = sample_realization(net, cfg, 0.0, ReplicationStreams(12, rep, false));
        if (real.tiers[0].size() != 1) {
            continue;
        }
        const auto s = associate(real, net);
        REQUIRE(s);
        CHECK(std::isinf(sir(real, *s, net)));
        ++found;
    }
    CHECK(found == 5);
}

TEST_CASE("far-field factor") {
    const double d = 1e-3;
    const double W = 150.0;
    for (double r : {0.0, 5.0, 40.0, 99.0, 120.0}) {
        for (double alpha : {2.5, 3.5, 4.0}) {
            const double tau = 1.3;
            // Direct form exp(-2 pi d int_W^inf x g/(1+g) dx); the tail beyond
            // X is integrated with g/(1+g) ~ g.
            const double X = 200.0 * W;
            auto f = [&](double x) {
                const double g = tau * std::pow(r / x, alpha);
                return x * g / (1.0 + g);
            };
            const double body =
                integrate(f, W, X, QuadratureSpec{1e-14, 1e-12, 2000}).value;
            const double tail = tau * std::pow(r, alpha) * std::pow(X, 2.0 - alpha) / (alpha - 2.0);
            const double ref = std::exp(-2.0 * oracle::pi * d * (body + tail));
            CHECK(far_field_coverage_factor(d, r, W, tau, alpha) == doctest::Approx(ref).epsilon(1e-6));
        }
    }
    CHECK(far_field_coverage_factor(d, 0.0, W, 1.0, 3.5) == 1.0);
    CHECK(far_field_coverage_factor(d, 10.0, 1e9, 1.0, 3.5) == doctest::Approx(1.0).epsilon(1e-12));
    // Continuous where the evaluation switches from series to quadrature (g = 1/2).
    const double r_switch = W * std::pow(0.5, 1.0 / 3.5);
    CHECK(far_field_coverage_factor(d, r_switch * (1 - 1e-9), W, 1.0, 3.5) ==
          doctest::Approx(far_field_coverage_factor(d, r_switch * (1 + 1e-9), W, 1.0, 3.5)).epsilon(1e-9));
    CHECK_THROWS_AS((void)far_field_coverage_factor(d, 1.0, 0.0, 1.0, 3.5), DomainError);
}

TEST_CASE("serial and parallel kernels agree exactly") {
    const auto net = biased_two_tier();
    auto cfg = config(3000, 21);
    for (bool anti : {false, true}) {
        cfg.antithetic = anti;
        std::vector<ReplicationRecord> ls;
        std::vector<ReplicationRecord> lp;
        const auto s = simulate_serial(net, MobilityProfile::isotropic(12.0), cfg, &ls);
        const auto p = simulate(net, MobilityProfile::isotropic(12.0), cfg, &lp);
        CHECK(s == p);
        REQUIRE(ls.size() == lp.size());
        bool same = true;
        for (std::size_t i = 0; i < ls.size(); ++i) {
            same = same && ls[i].rep == lp[i].rep && ls[i].covered == lp[i].covered &&
                   ls[i].handoff == lp[i].handoff && ls[i].r == lp[i].r;
        }
        CHECK(same);
    }
}

TEST_CASE("same seed reproduces, another seed differs") {
    const auto net = NetworkModel::single_tier(1e-3, 1.0, 3.5);
    const auto prof = MobilityProfile::isotropic(5.0);
    const auto a = simulate(net, prof, config(2000, 5));
    const auto b = simulate(net, prof, config(2000, 5));
    const auto c = simulate(net, prof, config(2000, 6));
    CHECK(a == b);
    CHECK_FALSE(a == c);
}

TEST_CASE("event algebra holds exactly on one tally") {
    const auto net = biased_two_tier();
    const auto cfg = config(4000, 31);
    const auto tally = simulate(net, MobilityProfile::isotropic(15.0), cfg);
    auto est = [&](Kind k, std::size_t tier = 0, double beta = 0.0) {
        return estimate(EventSpec{k, tier, beta}, tally, cfg.seed).estimate;
    };
    CHECK(est(Kind::Always) == 1.0);
    CHECK(estimate(EventSpec{Kind::Always}, tally, cfg.seed).se == 0.0);
    CHECK(est(Kind::Coverage) == doctest::Approx(est(Kind::CoverageNoHandoff) + est(Kind::CoverageHandoff)).epsilon(1e-14));
    CHECK(est(Kind::Tier, 0) + est(Kind::Tier, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(est(Kind::TierCoverage, 0) + est(Kind::TierCoverage, 1) == doctest::Approx(est(Kind::Coverage)).epsilon(1e-14));
    CHECK(est(Kind::Composite, 0, 0.0) == est(Kind::Coverage));
    CHECK(est(Kind::Composite, 0, 1.0) == doctest::Approx(est(Kind::CoverageNoHandoff)).epsilon(1e-14));
    CHECK(est(Kind::Composite, 0, 0.4) ==
          doctest::Approx(0.6 * est(Kind::Coverage) + 0.4 * est(Kind::CoverageNoHandoff)).epsilon(1e-13));
    CHECK_THROWS_AS((void)estimate(EventSpec{Kind::Tier, 2}, tally, 1), std::out_of_range);
    CHECK_THROWS_AS((void)estimate(EventSpec{Kind::Composite, 0, 1.5}, tally, 1), DomainError);

    auto no_cov = cfg;
    no_cov.evaluate_coverage = false;
    const auto t2 = simulate(net, MobilityProfile::isotropic(15.0), no_cov);
    CHECK_THROWS_AS((void)estimate(EventSpec{Kind::Coverage}, t2, 1), DomainError);
    CHECK(estimate(EventSpec{Kind::Handoff}, t2, 1).estimate == est(Kind::Handoff));
}

TEST_CASE("stationary coverage matches the closed form at any density") {
    const double target = coverage_stationary(1.0, 3.5);
    std::uint64_t seed = 100;
    std::vector<EstimateWithCI> runs;
    for (double d : {1e-4, 1e-3, 1e-2}) {
        const auto e = estimate(EventSpec{Kind::Coverage}, NetworkModel::single_tier(d, 1.0, 3.5),
                                MobilityProfile::isotropic(0.0), config(20000, seed++));
        CHECK(within(e, target));
        runs.push_back(e);
    }
    CHECK(agree(runs[0], runs[2]));
}

TEST_CASE("conditional coverage given the serving distance") {
    const double d = 1e-3;
    const auto net = NetworkModel::single_tier(d, 1.0, 3.5);
    std::vector<ReplicationRecord> log;
    (void)simulate(net, MobilityProfile::isotropic(0.0), config(20000, 8), &log);
    for (auto [lo, hi] : {std::pair{0.0, 8.0}, std::pair{8.0, 16.0}, std::pair{16.0, 30.0}}) {
        double hits = 0.0;
        double expected = 0.0;
        double n = 0.0;
        for (const auto& rec : log) {
            if (rec.r >= lo && rec.r < hi) {
                n += 1.0;
                hits += rec.covered;
                expected += coverage_given_distance(d, rec.r, 1.0, 3.5);
            }
        }
        REQUIRE(n > 500.0);
        const double p = expected / n;
        CHECK(std::fabs(hits / n - p) < 4.0 * std::sqrt(p * (1 - p) / n));
    }
}

TEST_CASE("multi-tier coverage and association frequencies") {
    const auto net = biased_two_tier();
    const auto a = association_probabilities(net);
    const auto cfg = config(20000, 41);
    const auto tally = simulate(net, MobilityProfile::isotropic(0.0), cfg);
    CHECK(within(estimate(EventSpec{Kind::Tier, 1}, tally, cfg.seed), a[1]));
    CHECK(within(estimate(EventSpec{Kind::Coverage}, tally, cfg.seed), coverage_multitier_stationary(net, a)));
    CHECK(within(estimate(EventSpec{Kind::TierCoverage, 0}, tally, cfg.seed),
                 tier_coverage_terms(net, 0, a[0], MobilityProfile::isotropic(0.0)).stationary));
}

TEST_CASE("handoff frequencies match the closed forms") {
    const auto net = NetworkModel::single_tier(1e-3, 1.0, 3.5);
    for (double v : {2.0, 8.0}) {
        auto e = estimate(EventSpec{Kind::Handoff}, net, MobilityProfile::radial(v), config(20000, 50 + v));
        CHECK(within(e, handoff_rate_radial(1e-3, v)));
        e = estimate(EventSpec{Kind::Handoff}, net, MobilityProfile::isotropic(v), config(20000, 60 + v));
        CHECK(within(e, handoff_rate_exact(1e-3, MobilityProfile::isotropic(v))));
    }
    CHECK(estimate(EventSpec{Kind::Handoff}, net, MobilityProfile::isotropic(0.0), config(1000, 1)).estimate == 0.0);
}

TEST_CASE("independent box sampler agrees on handoff frequency") {
    const auto net = NetworkModel::single_tier(1e-3, 1.0, 3.5);
    for (double theta : {-1.0, 0.0}) {
        const auto prof = theta < 0 ? MobilityProfile::isotropic(6.0) : MobilityProfile::radial(6.0);
        const auto ours = estimate(EventSpec{Kind::Handoff}, net, prof, config(20000, 70));
        const auto box = oracle::box_handoff(1e-3, 6.0, theta, 10000, 71);
        CHECK(std::fabs(ours.estimate - box.p) < 4.0 * std::hypot(ours.se, box.se));
    }
}

TEST_CASE("half-plane and full-circle angles give the same handoff rate") {
    const auto net = NetworkModel::single_tier(1e-3, 1.0, 3.5);
    auto full = config(20000, 80);
    auto half = config(20000, 81);
    half.half_plane_angles = true;
    const auto prof = MobilityProfile::isotropic(7.0);
    CHECK(agree(estimate(EventSpec{Kind::Handoff}, net, prof, full), estimate(EventSpec{Kind::Handoff}, net, prof, half)));
}

TEST_CASE("antithetic pairs") {
    const auto net = NetworkModel::single_tier(1e-3, 1.0, 3.5);
    auto cfg = config(20000, 90);
    cfg.antithetic = true;
    const auto tally = simulate(net, MobilityProfile::isotropic(5.0), cfg);
    CHECK(tally.paired());
    std::uint64_t pairs = 0;
    for (std::size_t a = 0; a < tally.categories(); ++a) {
        for (std::size_t b = 0; b < tally.categories(); ++b) {
            pairs += tally.pair_count(a, b);
        }
    }
    CHECK(pairs == 10000);
    const auto e = estimate(EventSpec{Kind::Handoff}, tally, cfg.seed);
    CHECK(e.replications == 20000);
    CHECK(within(e, handoff_rate_exact(1e-3, MobilityProfile::isotropic(5.0))));
    const auto c = estimate(EventSpec{Kind::Coverage}, tally, cfg.seed);
    CHECK(within(c, coverage_stationary(1.0, 3.5)));
}

TEST_CASE("doubling the window changes estimates by less than one standard error") {
    const auto net = NetworkModel::single_tier(1e-3, 1.0, 3.5);
    auto cfg = config(5000, 95);
    const auto prof = MobilityProfile::isotropic(10.0);
    const auto a = estimate(EventSpec{Kind::Composite, 0, 0.5}, net, prof, cfg);
    cfg.window_scale = 2.0;
    const auto b = estimate(EventSpec{Kind::Composite, 0, 0.5}, net, prof, cfg);
    CHECK(std::fabs(a.estimate - b.estimate) < a.se);
}

TEST_CASE("heavy discarding raises a warning") {
    const auto net = NetworkModel::single_tier(1e-3, 1.0, 3.5);
    auto cfg = config(2000, 3);
    cfg.window_radius = 60.0;
    const auto e = estimate(EventSpec{Kind::Handoff}, net, MobilityProfile::isotropic(20.0), cfg);
    CHECK(e.discarded > 100);
    CHECK(e.warning.find("discarded") != std::string::npos);
    const auto ok = estimate(EventSpec{Kind::Handoff}, net, MobilityProfile::isotropic(5.0), config(2000, 3));
    CHECK(ok.discarded == 0);
    CHECK(ok.warning.empty());
}

TEST_CASE("event log") {
    const auto net = biased_two_tier();
    std::vector<ReplicationRecord> log;
    (void)simulate(net, MobilityProfile::isotropic(4.0), config(300, 17), &log);
    std::ostringstream out;
    write_event_log(out, 17, 4.0, log);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "seed,rep,tier,r,theta,v,sir_db,covered,handoff,discarded");
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.rfind("17,", 0) == 0);
        ++rows;
    }
    CHECK(rows == 300);
}
