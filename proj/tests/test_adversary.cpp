#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "dht/adversary.hpp"

using namespace dht;

namespace {
const HypothesisSet kHyps({0b111, 0b011, 0b101}, 3);
} // namespace

TEST_CASE("fixed-false broadcasts put all mass on the pushed hypothesis") {
    AdversaryConfig cfg;
    cfg.policy = AdversaryConfig::Policy::FixedFalse;
    cfg.false_label = 0b101; // index 2
    const Belief b = adversarial_broadcast(cfg, kHyps, 7, 1, 1);
    CHECK(b[0] == 0.0);
    CHECK(b[1] == 0.0);
    CHECK(b[2] == 1.0);
    // identical at every step and for every seed
    CHECK(adversarial_broadcast(cfg, kHyps, 99, 1, 50) == b);
}

TEST_CASE("coordinated broadcasts behave like fixed-false per agent") {
    AdversaryConfig cfg;
    cfg.policy = AdversaryConfig::Policy::Coordinated;
    cfg.false_label = 0b011;
    const Belief b3 = adversarial_broadcast(cfg, kHyps, 7, 3, 1);
    const Belief b8 = adversarial_broadcast(cfg, kHyps, 7, 8, 9);
    CHECK(b3 == b8);
    CHECK(b3[1] == 1.0);
}

TEST_CASE("a pushed hypothesis outside the set is rejected") {
    AdversaryConfig cfg;
    cfg.policy = AdversaryConfig::Policy::FixedFalse;
    cfg.false_label = 0b110; // not a member of kHyps
    CHECK_THROWS_AS(adversarial_broadcast(cfg, kHyps, 7, 1, 1),
                    std::invalid_argument);
}

TEST_CASE("random-belief broadcasts are normalized and reproducible") {
    AdversaryConfig cfg;
    cfg.policy = AdversaryConfig::Policy::RandomBelief;
    const Belief a = adversarial_broadcast(cfg, kHyps, 42, 2, 5);
    const Belief b = adversarial_broadcast(cfg, kHyps, 42, 2, 5);
    CHECK(a == b);
    double sum = 0.0;
    for (std::size_t h = 0; h < 3; ++h) {
        CHECK(a[h] >= 0.0);
        sum += a[h];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random-belief broadcasts vary across agents, steps, and seeds") {
    AdversaryConfig cfg;
    cfg.policy = AdversaryConfig::Policy::RandomBelief;
    const Belief base = adversarial_broadcast(cfg, kHyps, 42, 2, 5);
    CHECK(adversarial_broadcast(cfg, kHyps, 42, 3, 5) != base);
    CHECK(adversarial_broadcast(cfg, kHyps, 42, 2, 6) != base);
    CHECK(adversarial_broadcast(cfg, kHyps, 43, 2, 5) != base);
}

TEST_CASE("scripted broadcasts index by step and repeat the last entry") {
    AdversaryConfig cfg;
    cfg.policy = AdversaryConfig::Policy::Custom;
    cfg.script = {Belief({1.0, 0.0, 0.0}), Belief({0.0, 0.5, 0.5})};
    CHECK(adversarial_broadcast(cfg, kHyps, 7, 1, 1) == cfg.script[0]);
    CHECK(adversarial_broadcast(cfg, kHyps, 7, 1, 2) == cfg.script[1]);
    CHECK(adversarial_broadcast(cfg, kHyps, 7, 1, 3) == cfg.script[1]);
    CHECK(adversarial_broadcast(cfg, kHyps, 7, 1, 1000) == cfg.script[1]);
}

TEST_CASE("an empty script is rejected") {
    AdversaryConfig cfg;
    cfg.policy = AdversaryConfig::Policy::Custom;
    CHECK_THROWS_AS(adversarial_broadcast(cfg, kHyps, 7, 1, 1),
                    std::invalid_argument);
}
