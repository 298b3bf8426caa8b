#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "dht/belief.hpp"
#include "dht/rng.hpp"

using namespace dht;

TEST_CASE("constructor accepts non-negative finite entries") {
    Belief b({0.25, 0.0, 0.75});
    CHECK(b.size() == 3);
    CHECK(b[0] == 0.25);
    CHECK(b[1] == 0.0);
    CHECK(b[2] == 0.75);
}

TEST_CASE("constructor rejects negative and non-finite entries") {
    CHECK_THROWS_AS(Belief({0.5, -0.1}), std::invalid_argument);
    CHECK_THROWS_AS(Belief({std::numeric_limits<double>::quiet_NaN(), 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Belief({std::numeric_limits<double>::infinity(), 1.0}),
                    std::invalid_argument);
}

TEST_CASE("uniform spreads mass evenly") {
    const Belief u = Belief::uniform(4);
    CHECK(u.size() == 4);
    for (std::size_t h = 0; h < 4; ++h) CHECK(u[h] == 0.25);
    CHECK(u.is_normalized());
}

TEST_CASE("sum and argmax") {
    Belief b({0.1, 0.6, 0.3});
    CHECK(b.sum() == doctest::Approx(1.0));
    CHECK(b.argmax() == 1);
    // first index wins ties
    CHECK(Belief({0.4, 0.4, 0.2}).argmax() == 0);
}

TEST_CASE("is_normalized tolerates tiny drift only") {
    CHECK(Belief({0.5, 0.5}).is_normalized());
    CHECK(Belief({0.5, 0.5 + 1e-12}).is_normalized());
    CHECK_FALSE(Belief({0.5, 0.6}).is_normalized());
    CHECK_FALSE(Belief({0.0, 0.0}).is_normalized());
}

TEST_CASE("normalize rescales weights") {
    const Belief b = normalize(Belief({2.0, 2.0}));
    CHECK(b[0] == 0.5);
    CHECK(b[1] == 0.5);

    const Belief c = normalize(Belief({1.0, 3.0}));
    CHECK(c[0] == 0.25);
    CHECK(c[1] == 0.75);
    CHECK(c.is_normalized());
}

TEST_CASE("normalize rejects zero-sum and empty input") {
    CHECK_THROWS_AS(normalize(Belief({0.0, 0.0})), std::domain_error);
    CHECK_THROWS_AS(normalize(Belief(std::vector<double>{})), std::invalid_argument);
}

TEST_CASE("normalizing a normalized vector is the identity") {
    auto rng = SplitMix64::stream(7, 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> w(5);
        for (double& v : w) v = rng.next_double() + 1e-3;
        const Belief once = normalize(Belief(w));
        const Belief twice = normalize(once);
        for (std::size_t h = 0; h < once.size(); ++h) {
            CHECK(twice[h] == doctest::Approx(once[h]).epsilon(1e-15));
        }
        CHECK(once.is_normalized());
    }
}

TEST_CASE("divergence of identical distributions is zero") {
    const Belief p({0.2, 0.3, 0.5});
    CHECK(kl_divergence(p, p) == 0.0);
}

TEST_CASE("divergence against the uniform coin is ln 2 for a point mass") {
    const Belief point({1.0, 0.0});
    const Belief coin({0.5, 0.5});
    CHECK(kl_divergence(point, coin) == 0.6931471805599453);
}

TEST_CASE("divergence of the coin from a (1/4, 3/4) split") {
    const Belief coin({0.5, 0.5});
    const Belief skew({0.25, 0.75});
    CHECK(kl_divergence(coin, skew) == 0.14384103622589042);
}

TEST_CASE("zero mass in p contributes nothing") {
    // 0 * log 0 is taken as 0, so the point mass on index 1 works out to ln 2.
    const Belief p({0.0, 1.0});
    const Belief coin({0.5, 0.5});
    CHECK(kl_divergence(p, coin) == 0.6931471805599453);
}

TEST_CASE("support mismatch diverges to infinity") {
    const Belief p({0.5, 0.5});
    const Belief q({1.0, 0.0});
    CHECK(std::isinf(kl_divergence(p, q)));
    CHECK(kl_divergence(p, q) > 0);
}

TEST_CASE("divergence rejects mismatched or empty vectors") {
    CHECK_THROWS_AS(kl_divergence(Belief({1.0}), Belief({0.5, 0.5})),
                    std::invalid_argument);
    CHECK_THROWS_AS(kl_divergence(Belief(std::vector<double>{}),
                                  Belief(std::vector<double>{})),
                    std::invalid_argument);
}

TEST_CASE("divergence is non-negative on random distribution pairs") {
    auto rng = SplitMix64::stream(11, 2);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> wp(4), wq(4);
        for (double& v : wp) v = rng.next_double() + 1e-6;
        for (double& v : wq) v = rng.next_double() + 1e-6;
        const double d = kl_divergence(normalize(Belief(wp)), normalize(Belief(wq)));
        CHECK(d >= -1e-15); // Gibbs' inequality, up to rounding dust
    }
}

TEST_CASE("generator reproduces the published reference sequence from seed 0") {
    SplitMix64 rng(0);
    CHECK(rng.next_u64() == 0xe220a8397b1dcdafULL);
    CHECK(rng.next_u64() == 0x6e789e6aa1b965f4ULL);
    CHECK(rng.next_u64() == 0x06c45d188009454fULL);
}

TEST_CASE("keyed streams are deterministic and distinct") {
    auto a = SplitMix64::stream(42, 3, 7, 11);
    CHECK(a.next_double() == 0.8821733407913901);
    CHECK(a.next_double() == 0.8132316761704058);
    CHECK(a.next_double() == 0.3864013240540889);

    auto b = SplitMix64::stream(42, 3, 7, 12);
    CHECK(b.next_double() == 0.9080379220513193);

    auto a2 = SplitMix64::stream(42, 3, 7, 11);
    CHECK(a2.next_double() == 0.8821733407913901);
}

TEST_CASE("doubles stay inside the unit interval") {
    auto rng = SplitMix64::stream(99);
    for (int k = 0; k < 10000; ++k) {
        const double u = rng.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}
