#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "dht/engine.hpp"
#include "dht/rng.hpp"

using namespace dht;

namespace {

// Six static agents; agent 5's good and bad instances sit at (5,5) and (7,5).
// Agents 1-4 surround that spot closely enough to tell the instances apart,
// agent 0 idles far away in the corner, and agent 5 never watches itself, so
// the source set for both hypothesis pairs is exactly {1,2,3,4}.
ScenarioSpec six_agent_world() {
    ScenarioSpec s;
    s.name = "partition-world";
    s.grid = GridDims{12, 12};
    s.hypotheses = HypothesisSet({0b111111, 0b011111}, 6);
    s.true_hypothesis = 0;
    s.sigma = 1.0;
    s.horizon = 5;
    const GridPos posts[6] = {{0, 0}, {4, 5}, {6, 5}, {5, 4}, {5, 6}, {5, 5}};
    for (AgentId i = 0; i < 6; ++i) {
        AgentSpec a;
        a.id = i;
        a.comm_radius = 20;
        a.sensing_radius = 1;
        a.path.good_cycle = {posts[i]};
        a.path.bad_cycle = {posts[i]};
        a.initial_local = Belief::uniform(2);
        a.initial_actual = Belief::uniform(2);
        s.agents.push_back(a);
    }
    s.agents[5].path.bad_cycle = {{7, 5}};
    return s;
}

// Three static agents where hypothesis 1 flips agents 1 and 2 to bad; the
// geometry makes every agent a source for both pairs (each one can always
// tell some differing peer's two instances apart).
ScenarioSpec all_sources_world() {
    ScenarioSpec s;
    s.name = "abu-world";
    s.grid = GridDims{9, 9};
    s.hypotheses = HypothesisSet({0b111, 0b001}, 3);
    s.true_hypothesis = 0;
    s.sigma = 1.0;
    s.horizon = 5;
    const GridPos good[3] = {{4, 4}, {5, 4}, {3, 4}};
    const GridPos bad[3] = {{4, 4}, {6, 4}, {7, 4}};
    for (AgentId i = 0; i < 3; ++i) {
        AgentSpec a;
        a.id = i;
        a.comm_radius = 20;
        a.sensing_radius = 2;
        a.path.good_cycle = {good[i]};
        a.path.bad_cycle = {bad[i]};
        a.initial_local = Belief::uniform(2);
        a.initial_actual = Belief::uniform(2);
        s.agents.push_back(a);
    }
    return s;
}

SharedPool example_pool() {
    return {{0, 0.25}, {1, 0.22}, {2, 0.35}, {3, 0.35}, {4, 0.35}, {5, 0.37}};
}

} // namespace

TEST_CASE("posterior update multiplies and renormalizes") {
    const Belief prev({0.6, 0.4});
    const Belief post = lb_update(prev, {0.3, 0.7});
    CHECK(post[0] == 0.391304347826087);
    CHECK(post[1] == 0.6086956521739131);
}

TEST_CASE("posterior update rejects bad likelihood vectors") {
    const Belief prev({0.6, 0.4});
    CHECK_THROWS_AS(lb_update(prev, {0.3}), std::invalid_argument);
    CHECK_THROWS_AS(lb_update(prev, {0.3, -0.1}), std::invalid_argument);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(lb_update(prev, {0.3, nan}), std::invalid_argument);
    CHECK_THROWS_AS(lb_update(prev, {0.0, 0.0}), std::domain_error);
    // zero likelihood on one hypothesis is fine as long as mass survives
    const Belief post = lb_update(prev, {0.0, 1.0});
    CHECK(post[0] == 0.0);
    CHECK(post[1] == 1.0);
}

TEST_CASE("minimum rule discards the f lowest entries") {
    const SharedPool pool = example_pool();
    // ascending: 0.22, 0.25, 0.35, 0.35, 0.35, 0.37; drop one -> 0.25 survives
    CHECK(min_fuse(pool, 1, 0.30) == 0.25);
    // own belief clamps from above
    CHECK(min_fuse(pool, 1, 0.20) == 0.20);
    // f = 0 keeps the global minimum
    CHECK(min_fuse(pool, 0, 1.0) == 0.22);
    // f = 2 drops 0.22 and 0.25
    CHECK(min_fuse(pool, 2, 1.0) == 0.35);
}

TEST_CASE("minimum rule breaks value ties by agent id") {
    const SharedPool pool = {{0, 0.5}, {1, 0.5}, {2, 0.6}};
    // ascending order is (0,0.5),(1,0.5),(2,0.6); dropping f=1 leaves (1,0.5)
    CHECK(min_fuse(pool, 1, 1.0) == 0.5);
    CHECK(min_fuse(pool, 2, 1.0) == 0.6);
}

TEST_CASE("minimum rule needs more than f entries") {
    const SharedPool pool = {{0, 0.5}};
    CHECK_THROWS_AS(min_fuse(pool, 1, 1.0), std::logic_error);
    CHECK_THROWS_AS(min_fuse({}, 0, 1.0), std::logic_error);
}

TEST_CASE("average-rule partition on the six-agent pool") {
    const ScenarioSpec s = six_agent_world();
    const SourceSetIndex idx = SourceSetIndex::compute(s);
    REQUIRE(idx.source_agents(0, 1) == 0b011110);

    const SharedPool pool = example_pool();
    const LmhPartition part = partition_lmh(pool, idx, 0, 1);
    // L: the single lowest value 0.22 at agent 1.
    CHECK(part.low == std::vector<AgentId>{1});
    // Descending order 0.37(5), 0.35(2), 0.35(3), 0.35(4), ...; agents 2 and 3
    // are the first two sources in it, so H closes as {5, 2, 3}.
    CHECK(part.high == std::vector<AgentId>({2, 3, 5}));
    CHECK(part.mid == std::vector<AgentId>({0, 4}));
}

TEST_CASE("average rule takes the middle mean clamped by own belief") {
    const ScenarioSpec s = six_agent_world();
    const SourceSetIndex idx = SourceSetIndex::compute(s);
    const SharedPool pool = example_pool();
    const LmhPartition part = partition_lmh(pool, idx, 0, 1);
    // mean over M = {0, 4}: (0.25 + 0.35) / 2 = 0.3 exactly
    CHECK(avg_fuse(pool, part, 0.37) == 0.3);
    CHECK(avg_fuse(pool, part, 0.25) == 0.25);
}

TEST_CASE("average-rule partition requires 2f+2 pooled sources") {
    const ScenarioSpec s = six_agent_world();
    const SourceSetIndex idx = SourceSetIndex::compute(s);
    // f = 2 needs six source agents in the pool; only four exist
    CHECK_THROWS_AS(partition_lmh(example_pool(), idx, 0, 2), std::logic_error);
    // dropping source agents from the pool breaks the bound for f = 1
    SharedPool thin = example_pool();
    thin.erase(thin.begin() + 2); // remove agent 2, a source
    CHECK_THROWS_AS(partition_lmh(thin, idx, 0, 1), std::logic_error);
}

TEST_CASE("partition invariants hold over randomized pools") {
    const ScenarioSpec s = six_agent_world();
    const SourceSetIndex idx = SourceSetIndex::compute(s);
    auto rng = SplitMix64::stream(99, 0, 0, 0);
    for (int trial = 0; trial < 200; ++trial) {
        SharedPool pool;
        for (AgentId j = 0; j < 6; ++j) pool.emplace_back(j, rng.next_double());
        const LmhPartition part = partition_lmh(pool, idx, 0, 1);
        CHECK(part.low.size() == 1);
        CHECK_FALSE(part.mid.empty());
        CHECK(part.low.size() + part.mid.size() + part.high.size() == 6);
        for (AgentId l : part.low) {
            CHECK(std::find(part.high.begin(), part.high.end(), l) == part.high.end());
        }
        // H holds at least f+1 = 2 sources
        int h_sources = 0;
        for (AgentId a : part.high) {
            if (a >= 1 && a <= 4) ++h_sources;
        }
        CHECK(h_sources >= 2);
        const double own = rng.next_double();
        CHECK(avg_fuse(pool, part, own) <= own);
    }
}

TEST_CASE("corrupting an already-discarded low entry changes nothing") {
    const ScenarioSpec s = six_agent_world();
    const SourceSetIndex idx = SourceSetIndex::compute(s);
    const SharedPool pool = example_pool();
    const LmhPartition ref = partition_lmh(pool, idx, 0, 1);
    const double ref_avg = avg_fuse(pool, ref, 1.0);
    const double ref_min = min_fuse(pool, 1, 1.0);

    SharedPool corrupted = pool;
    corrupted[1].second = 0.0; // agent 1 held the lowest value already
    const LmhPartition part = partition_lmh(corrupted, idx, 0, 1);
    CHECK(avg_fuse(corrupted, part, 1.0) == ref_avg);
    CHECK(min_fuse(corrupted, 1, 1.0) == ref_min);
}

TEST_CASE("tied pool values keep the low and high sets disjoint") {
    const ScenarioSpec s = six_agent_world();
    const SourceSetIndex idx = SourceSetIndex::compute(s);

    // All values equal: ascending and descending order both start at agent 0,
    // so the high scan must pass over the entry L already claimed.
    SharedPool flat;
    for (AgentId j = 0; j < 6; ++j) flat.emplace_back(j, 0.25);
    const LmhPartition part = partition_lmh(flat, idx, 0, 1);
    CHECK(part.low == std::vector<AgentId>{0});
    CHECK(part.high == std::vector<AgentId>({1, 2}));
    CHECK(part.mid == std::vector<AgentId>({3, 4, 5}));
    CHECK(avg_fuse(flat, part, 1.0) == 0.25);

    // A lone high outlier on a non-source, everything else tied.
    SharedPool spiked = flat;
    spiked[5].second = 0.9;
    const LmhPartition sp = partition_lmh(spiked, idx, 0, 1);
    CHECK(sp.low == std::vector<AgentId>{0});
    CHECK(sp.high == std::vector<AgentId>({1, 2, 5}));
    CHECK(sp.mid == std::vector<AgentId>({3, 4}));
    CHECK(avg_fuse(spiked, sp, 1.0) == 0.25);
}

TEST_CASE("coverage thresholds per rule") {
    CHECK(coverage_threshold({0, FusionRule::Min}) == 1);
    CHECK(coverage_threshold({1, FusionRule::Min}) == 3);
    CHECK(coverage_threshold({0, FusionRule::Avg}) == 2);
    CHECK(coverage_threshold({1, FusionRule::Avg}) == 4);
}

TEST_CASE("synchronous step fuses when current neighbors cover every pair") {
    const ScenarioSpec s = six_agent_world();
    const SourceSetIndex idx = SourceSetIndex::compute(s);
    // a 2-agent slice is enough: reuse the index but feed a 6-share vector
    AgentState prev;
    prev.id = 0;
    prev.local = Belief({0.6, 0.4});
    prev.actual = Belief({0.5, 0.5});
    std::vector<Belief> shares(6, Belief::uniform(2));
    shares[0] = Belief({0.8, 0.2});
    shares[1] = Belief({0.3, 0.7});
    // neighbors {0,1,2,3,4} hold all four sources: case one at f=1 (min rule)
    // but keep it simple: f=0 min, neighbors {0,1}, sources {1..4} so the
    // single source agent 1 satisfies threshold 1 for every pair
    const EngineParams params{0, FusionRule::Min};
    const StepResult out =
        sdht_step(prev, shares, 0b000011, {0.3, 0.7}, idx, params);
    CHECK(out.case_one == std::vector<HypId>({0, 1}));
    CHECK(out.state.local[0] == 0.391304347826087);
    CHECK(out.state.local[1] == 0.6086956521739131);
    // fused raw values are min(0.8,0.3,local') = 0.3 and min(0.2,0.7,local') = 0.2,
    // which normalize to exactly (0.6, 0.4)
    CHECK(out.state.actual[0] == 0.6);
    CHECK(out.state.actual[1] == 0.4);
}

TEST_CASE("synchronous step clamps by fresh evidence when coverage fails") {
    const ScenarioSpec s = six_agent_world();
    const SourceSetIndex idx = SourceSetIndex::compute(s);
    AgentState prev;
    prev.id = 0;
    prev.local = Belief({0.6, 0.4});
    prev.actual = Belief({0.5, 0.5});
    const std::vector<Belief> shares(6, Belief::uniform(2));
    // neighbors {0,5} contain no source agent: case two for every hypothesis
    const EngineParams params{0, FusionRule::Min};
    const StepResult out =
        sdht_step(prev, shares, 0b100001, {0.3, 0.7}, idx, params);
    CHECK(out.case_one.empty());
    CHECK(out.state.actual[0] == 0.4390243902439025);
    CHECK(out.state.actual[1] == 0.5609756097560976);
}

TEST_CASE("accumulator gathers neighbors across calls until coverage") {
    const ScenarioSpec s = all_sources_world();
    const SourceSetIndex idx = SourceSetIndex::compute(s);
    REQUIRE(idx.source_agents(0, 1) == 0b111);
    const EngineParams params{1, FusionRule::Min}; // threshold 3

    AdhtState st = AdhtState::initial(3, 2);
    AdhtHypState& acc = st.per_hyp[0];

    std::vector<Belief> shares = {Belief({0.5, 0.5}), Belief({0.4, 0.6}),
                                  Belief({0.9, 0.1})};
    // first round: agents {0,1} heard; two sources < 3
    CHECK_FALSE(abu(acc, 0b011, shares, 0, idx, params));
    CHECK(acc.collected == 0b011);
    CHECK(acc.saved[0] == 0.5);
    CHECK(acc.saved[1] == 0.4);
    CHECK_FALSE(acc.reset_flag);

    // second round: {0,2} arrive; agent 0's newer value overwrites, agent 1's
    // older value survives, and the accumulated set now covers
    shares[0] = Belief({0.55, 0.45});
    CHECK(abu(acc, 0b101, shares, 0, idx, params));
    CHECK(acc.collected == 0b111);
    CHECK(acc.saved[0] == 0.55);
    CHECK(acc.saved[1] == 0.4);
    CHECK(acc.saved[2] == 0.9);
    CHECK(acc.reset_flag);

    // third round: the pending reset clears everything before accumulating
    shares[0] = Belief({0.6, 0.4});
    CHECK_FALSE(abu(acc, 0b001, shares, 0, idx, params));
    CHECK(acc.collected == 0b001);
    CHECK(acc.saved[0] == 0.6);
    CHECK(acc.saved[1] == 0.0);
    CHECK_FALSE(acc.reset_flag);
}

TEST_CASE("asynchronous step equals the synchronous step on first contact") {
    const ScenarioSpec s = all_sources_world();
    const SourceSetIndex idx = SourceSetIndex::compute(s);
    const EngineParams params{0, FusionRule::Min};

    AgentState prev;
    prev.id = 0;
    prev.local = Belief({0.6, 0.4});
    prev.actual = Belief({0.5, 0.5});
    prev.adht = AdhtState::initial(3, 2);
    std::vector<Belief> shares = {Belief({0.8, 0.2}), Belief({0.3, 0.7}),
                                  Belief({0.5, 0.5})};

    const StepResult sync =
        sdht_step(prev, shares, 0b011, {0.3, 0.7}, idx, params);
    const StepResult async =
        adht_step(prev, shares, 0b011, {0.3, 0.7}, idx, params);
    CHECK(async.case_one == sync.case_one);
    for (HypId h = 0; h < 2; ++h) {
        CHECK(async.state.actual[h] == sync.state.actual[h]);
        CHECK(async.state.local[h] == sync.state.local[h]);
    }
}

TEST_CASE("accumulation fuses where the instantaneous snapshot cannot") {
    const ScenarioSpec s = all_sources_world();
    const SourceSetIndex idx = SourceSetIndex::compute(s);
    const EngineParams params{1, FusionRule::Min}; // threshold 3

    AgentState prev;
    prev.id = 0;
    prev.local = Belief({0.6, 0.4});
    prev.actual = Belief({0.5, 0.5});
    prev.adht = AdhtState::initial(3, 2);
    const std::vector<Belief> shares = {Belief({0.8, 0.2}), Belief({0.3, 0.7}),
                                        Belief({0.5, 0.5})};

    // round one: only {0,1} in range - neither algorithm can fuse
    const StepResult a1 = adht_step(prev, shares, 0b011, {0.5, 0.5}, idx, params);
    CHECK(a1.case_one.empty());

    // round two: {0,2} in range - the accumulated pool {0,1,2} covers, the
    // instantaneous pool {0,2} does not
    const StepResult a2 =
        adht_step(a1.state, shares, 0b101, {0.5, 0.5}, idx, params);
    CHECK(a2.case_one == std::vector<HypId>({0, 1}));
    const StepResult s2 =
        sdht_step(a1.state, shares, 0b101, {0.5, 0.5}, idx, params);
    CHECK(s2.case_one.empty());
}
