#include <catch2/catch_amalgamated.hpp>

#include "anderson/rng.hpp"

using namespace anderson;

// Known-answer vectors from the Random123 distribution (kat_vectors,
// philox4x32-10).
TEST_CASE("philox4x32-10 known-answer vectors") {
    auto v0 = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    CHECK(v0[0] == 0x6627e8d5u);
    CHECK(v0[1] == 0xe169c58du);
    CHECK(v0[2] == 0xbc57ac4cu);
    CHECK(v0[3] == 0x9b00dbd8u);

    auto v1 = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                {0xffffffffu, 0xffffffffu});
    CHECK(v1[0] == 0x408f276du);
    CHECK(v1[1] == 0x41c83b0eu);
    CHECK(v1[2] == 0xa20bc7c6u);
    CHECK(v1[3] == 0x6d5451fdu);

    auto v2 = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                {0xa4093822u, 0x299f31d0u});
    CHECK(v2[0] == 0xd16cfe09u);
    CHECK(v2[1] == 0x94fdccebu);
    CHECK(v2[2] == 0x5001e420u);
    CHECK(v2[3] == 0x24126ea1u);
}

TEST_CASE("counter rng is a pure function of key and counter") {
    CounterRng a(42, 7), b(42, 7), c(43, 7), d(42, 8);
    CHECK(a.uniform2(3, 9) == b.uniform2(3, 9));
    CHECK(a.uniform2(3, 9) != c.uniform2(3, 9));
    CHECK(a.uniform2(3, 9) != d.uniform2(3, 9));
    CHECK(a.uniform2(3, 9) != a.uniform2(3, 10));
}

TEST_CASE("uniforms land strictly inside (0,1), gaussians are standard") {
    CounterRng rng(123, 0);
    double sum = 0.0, sumsq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const auto u = rng.uniform2(0, uint64_t(i));
        REQUIRE(u[0] > 0.0);
        REQUIRE(u[0] < 1.0);
        const auto g = rng.gaussian2(1, uint64_t(i));
        sum += g[0] + g[1];
        sumsq += g[0] * g[0] + g[1] * g[1];
    }
    const double mean = sum / (2.0 * n);
    const double var = sumsq / (2.0 * n) - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(2.0 * n));
    CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / (2.0 * n)));
}

TEST_CASE("replicate seeds decorrelate") {
    CHECK(replicate_seed(1, 0) != replicate_seed(1, 1));
    CHECK(replicate_seed(1, 0) != replicate_seed(2, 0));
}
