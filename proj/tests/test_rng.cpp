#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>

#include "hetnet/rng.hpp"

using hetnet::Philox4x32;

// Known-answer vectors published with the reference Random123 implementation.
TEST_CASE("philox4x32-10 known answers") {
    struct Kat {
        Philox4x32::Block ctr;
        Philox4x32::Key key;
        Philox4x32::Block out;
    };
    const Kat kats[] = {
        {{0, 0, 0, 0}, {0, 0}, {0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}},
        {{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
         {0xffffffff, 0xffffffff},
         {0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}},
        {{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
         {0xa4093822, 0x299f31d0},
         {0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}},
    };
    for (const auto& k : kats) {
        CHECK(Philox4x32::bijection(k.ctr, k.key) == k.out);
    }
}

TEST_CASE("generator walks the counter") {
    Philox4x32 g(0x0123456789abcdefULL, 0xfedcba9876543210ULL, 7);
    const auto first = Philox4x32::bijection({0, 7, 0x76543210u, 0xfedcba98u}, {0x89abcdefu, 0x01234567u});
    const auto second = Philox4x32::bijection({1, 7, 0x76543210u, 0xfedcba98u}, {0x89abcdefu, 0x01234567u});
    for (auto x : first) {
        CHECK(g() == x);
    }
    for (auto x : second) {
        CHECK(g() == x);
    }
}

TEST_CASE("complemented stream") {
    Philox4x32 a(5, 9, 1);
    Philox4x32 b(5, 9, 1, true);
    for (int i = 0; i < 64; ++i) {
        CHECK(b() == static_cast<std::uint32_t>(~a()));
    }
}

TEST_CASE("streams and substreams differ, same triple repeats") {
    std::set<std::uint32_t> firsts;
    for (std::uint64_t stream = 0; stream < 16; ++stream) {
        for (std::uint32_t sub = 0; sub < 4; ++sub) {
            Philox4x32 g(42, stream, sub);
            firsts.insert(g());
        }
    }
    CHECK(firsts.size() == 64);

    Philox4x32 a(42, 3, 2);
    Philox4x32 b(42, 3, 2);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.uniform() == b.uniform());
    }
}

TEST_CASE("uniform and exponential moments") {
    Philox4x32 g(2024, 1);
    const int n = 200000;
    double su = 0.0;
    double su2 = 0.0;
    double se = 0.0;
    double lo = 1.0;
    double hi = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = g.uniform();
        lo = std::fmin(lo, u);
        hi = std::fmax(hi, u);
        su += u;
        su2 += u * u;
        se += g.exponential();
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(std::fabs(su / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::fabs(su2 / n - 1.0 / 3.0) < 5.0 * std::sqrt(4.0 / 45.0 / n));
    CHECK(std::fabs(se / n - 1.0) < 5.0 / std::sqrt(n));
}
