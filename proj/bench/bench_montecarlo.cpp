// Serial reference kernel vs the OpenMP kernel on a few representative networks.
// Usage: bench_montecarlo [replications]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "hetnet/montecarlo.hpp"

using namespace hetnet;

namespace {

struct Case {
    const char* label;
    NetworkModel net;
    MobilityProfile profile;
};

template <class F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t reps = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20000;

    NetworkModel two_tier;
    two_tier.tiers = {{1e-4, 46.0, 1.0, 1.0}, {1e-2, 20.0, 1.0, 1.0}};
    two_tier.beta = 0.9;

    const Case cases[] = {
        {"single tier 1e-3, v=5 uniform", NetworkModel::single_tier(1e-3, 1.0, 3.5, 0.3),
         MobilityProfile::isotropic(5.0)},
        {"single tier 1e-4, v=15 radial", NetworkModel::single_tier(1e-4, 1.0, 3.5, 0.0),
         MobilityProfile::radial(15.0)},
        {"two tier {1e-4, 1e-2}, v=15", two_tier, MobilityProfile::isotropic(15.0)},
    };

    std::printf("threads: %d, replications: %zu\n", omp_get_max_threads(), reps);
    std::printf("%-34s %12s %12s %9s %s\n", "case", "serial [s]", "openmp [s]", "speedup", "match");
    bool all_match = true;
    for (const auto& c : cases) {
        SimConfig cfg;
        cfg.replications = reps;
        cfg.seed = 7;
        Tally serial;
        Tally parallel;
        const double ts = seconds([&] { serial = simulate_serial(c.net, c.profile, cfg); });
        const double tp = seconds([&] { parallel = simulate(c.net, c.profile, cfg); });
        const bool match = serial == parallel;
        all_match = all_match && match;
        std::printf("%-34s %12.3f %12.3f %9.2f %s\n", c.label, ts, tp, ts / tp, match ? "yes" : "NO");
    }
    return all_match ? 0 : 1;
}
