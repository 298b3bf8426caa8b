#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <string>

#include "dht/simulator.hpp"

using namespace dht;

namespace {

// Four static agents on a 9x9 board.  Agent 2 is bad: its declared post is
// (3,4) but it actually parks at (6,5) and keeps broadcasting "everyone is
// good".  Agents 0, 1, 3 can all see both spots, so the source set for the
// single hypothesis pair is {0,1,3} - enough for case one at f=1 under the
// minimum rule.
ScenarioSpec sim_world() {
    ScenarioSpec s;
    s.name = "sim-world";
    s.grid = GridDims{9, 9};
    s.hypotheses = HypothesisSet({0b1111, 0b1011}, 4);
    s.true_hypothesis = 1; // agent 2 bad
    s.sigma = 1.0;
    s.f = 1;
    s.horizon = 30;
    s.seed = 1;
    s.tau = 0.95;
    s.algorithm = Algorithm::Sdht;
    s.rule = FusionRule::Min;
    const GridPos posts[4] = {{4, 4}, {5, 4}, {3, 4}, {4, 5}};
    for (AgentId i = 0; i < 4; ++i) {
        AgentSpec a;
        a.id = i;
        a.comm_radius = 8;
        a.sensing_radius = 2;
        a.path.good_cycle = {posts[i]};
        a.path.bad_cycle = {posts[i]};
        a.initial_local = Belief::uniform(2);
        a.initial_actual = Belief::uniform(2);
        s.agents.push_back(a);
    }
    s.agents[2].identity = Identity::Bad;
    s.agents[2].path.bad_cycle = {{6, 5}};
    AdversaryConfig cfg;
    cfg.policy = AdversaryConfig::Policy::FixedFalse;
    cfg.false_label = 0b1111;
    s.agents[2].adversary = cfg;
    return s;
}

bool has_error_containing(const std::vector<Finding>& fs, const std::string& what) {
    return std::any_of(fs.begin(), fs.end(), [&](const Finding& f) {
        return f.level == Finding::Level::Error &&
               f.message.find(what) != std::string::npos;
    });
}

} // namespace

TEST_CASE("the reference world validates cleanly") {
    const auto findings = validate(sim_world());
    CHECK_FALSE(has_errors(findings));
}

TEST_CASE("validation flags broken parameters") {
    ScenarioSpec s = sim_world();
    s.sigma = 0.0;
    CHECK(has_error_containing(validate(s), "sigma"));

    s = sim_world();
    s.tau = 1.5;
    CHECK(has_error_containing(validate(s), "tau"));

    s = sim_world();
    s.agents[1].id = 3;
    CHECK(has_errors(validate(s)));

    s = sim_world();
    s.agents.clear();
    CHECK(has_errors(validate(s)));
}

TEST_CASE("validation flags bad paths and priors") {
    ScenarioSpec s = sim_world();
    s.agents[0].path.good_cycle = {{4, 4}, {8, 8}}; // teleport
    CHECK(has_errors(validate(s)));

    s = sim_world();
    s.agents[0].path.good_cycle.clear();
    CHECK(has_errors(validate(s)));

    s = sim_world();
    s.agents[3].initial_local = Belief({1.0, 0.0}); // zero prior entry
    CHECK(has_errors(validate(s)));

    s = sim_world();
    s.agents[3].initial_actual = Belief({0.9, 0.2}); // not normalized
    CHECK(has_errors(validate(s)));
}

TEST_CASE("validation ties identities to the true hypothesis") {
    ScenarioSpec s = sim_world();
    s.true_hypothesis = 0; // all good, but agent 2 is marked bad
    CHECK(has_errors(validate(s)));

    s = sim_world();
    s.agents[2].identity = Identity::Good; // label says bad
    s.agents[2].adversary.reset();
    CHECK(has_errors(validate(s)));

    s = sim_world();
    s.agents[2].adversary.reset(); // bad agent without a policy
    CHECK(has_errors(validate(s)));

    s = sim_world();
    AdversaryConfig cfg;
    cfg.policy = AdversaryConfig::Policy::RandomBelief;
    s.agents[0].adversary = cfg; // good agent with a policy
    CHECK(has_errors(validate(s)));
}

TEST_CASE("validation enforces the bad-neighbor bound") {
    ScenarioSpec s = sim_world();
    s.f = 0; // one bad agent is always in everyone's range
    CHECK(has_error_containing(validate(s), "f"));
}

TEST_CASE("a run on an invalid scenario throws instead of proceeding") {
    ScenarioSpec s = sim_world();
    s.sigma = -1.0;
    CHECK_THROWS_AS(run(s), std::invalid_argument);
}

TEST_CASE("zero-horizon runs record only the initial state") {
    ScenarioSpec s = sim_world();
    s.horizon = 0;
    const RunResult r = run(s);
    REQUIRE(r.trace.steps.size() == 1);
    REQUIRE(r.trace.steps[0].size() == 4);
    CHECK(r.trace.events.empty());
    CHECK(r.metrics.case_one_total == 0);
    REQUIRE(r.metrics.cumulative_case_one.size() == 1);
    CHECK(r.metrics.cumulative_case_one[0] == 0);
    for (AgentId i = 0; i < 4; ++i) {
        CHECK(r.trace.steps[0][i].local == Belief::uniform(2));
        CHECK(r.trace.steps[0][i].actual == Belief::uniform(2));
    }
    // positions reflect identities: agent 2 is really at its hidden post
    CHECK(r.trace.steps[0][2].position == GridPos{6, 5});
    CHECK(r.trace.steps[0][0].position == GridPos{4, 4});
    // everyone hears everyone at comm radius 8
    CHECK(r.trace.steps[0][0].neighbors == 0b1111);
}

TEST_CASE("runs are deterministic and converge on the reference world") {
    const ScenarioSpec s = sim_world();
    const RunResult a = run(s);
    const RunResult b = run(s);
    CHECK(a.trace == b.trace);

    REQUIRE(a.metrics.convergence_time.has_value());
    CHECK(*a.metrics.convergence_time <= 30);
    // case one fires for both hypotheses at every step for all three good
    // agents once coverage holds (it holds from step 1 here)
    CHECK(a.metrics.case_one_total == 30 * 3 * 2);
    REQUIRE(a.metrics.cumulative_case_one.size() == 31);
    CHECK(a.metrics.cumulative_case_one[0] == 0);
    CHECK(a.metrics.cumulative_case_one[30] == a.metrics.case_one_total);
    CHECK(std::is_sorted(a.metrics.cumulative_case_one.begin(),
                         a.metrics.cumulative_case_one.end()));
    // the metric series cover every step
    CHECK(a.metrics.mean_good_actual_true.size() == 31);
    CHECK(a.metrics.mean_good_local_true.size() == 31);
    CHECK(a.metrics.mean_good_actual_true[0] == 0.5);
    // good agents end convinced; the bad agent's slot holds its broadcast lie
    REQUIRE(a.metrics.final_actual_true.size() == 4);
    for (AgentId i : {0, 1, 3}) {
        CHECK(a.metrics.final_actual_true[i] >= 0.95);
    }
    CHECK(a.metrics.final_actual_true[2] == 0.0);
}

TEST_CASE("different seeds give different traces") {
    ScenarioSpec s = sim_world();
    const RunResult a = run(s);
    s.seed = 2;
    const RunResult b = run(s);
    CHECK(a.trace != b.trace);
}

TEST_CASE("bad agents never update their recorded local belief") {
    const ScenarioSpec s = sim_world();
    const RunResult r = run(s);
    for (long t = 0; t <= 30; ++t) {
        CHECK(r.trace.steps[t][2].local == Belief::uniform(2));
    }
    // and their broadcast is the fixed lie from step 1 on
    CHECK(r.trace.steps[5][2].actual == Belief({1.0, 0.0}));
}

TEST_CASE("no case-one event ever names a bad agent") {
    const ScenarioSpec s = sim_world();
    const RunResult r = run(s);
    for (const auto& e : r.trace.events) {
        CHECK(e.agent != 2);
        CHECK(e.t >= 1);
        CHECK(e.t <= 30);
    }
}

TEST_CASE("the asynchronous algorithm runs the same world") {
    ScenarioSpec s = sim_world();
    s.algorithm = Algorithm::Adht;
    const RunResult r = run(s);
    REQUIRE(r.metrics.convergence_time.has_value());
    // with full connectivity the accumulated pool equals the instantaneous
    // one, so case-one counts match the synchronous run
    CHECK(r.metrics.case_one_total == 30 * 3 * 2);
}

TEST_CASE("replay audit accepts a faithful trace") {
    const ScenarioSpec s = sim_world();
    const RunResult r = run(s);
    CHECK(replay_audit(s, r.trace).empty());

    ScenarioSpec a = sim_world();
    a.algorithm = Algorithm::Adht;
    const RunResult ra = run(a);
    CHECK(replay_audit(a, ra.trace).empty());
}

TEST_CASE("replay audit catches a tampered belief") {
    const ScenarioSpec s = sim_world();
    RunResult r = run(s);
    auto& cell = r.trace.steps[7][0].actual;
    std::vector<double> vals = {cell[0] + 1e-6, cell[1] - 1e-6};
    cell = Belief(std::move(vals));
    const auto issues = replay_audit(s, r.trace);
    REQUIRE_FALSE(issues.empty());
    bool found = std::any_of(issues.begin(), issues.end(), [](const AuditIssue& i) {
        return i.t == 7 && i.agent == 0;
    });
    CHECK(found);
}

TEST_CASE("replay audit catches fabricated and missing events") {
    const ScenarioSpec s = sim_world();
    {
        RunResult r = run(s);
        r.trace.events.push_back({3, 2, 0}); // bad agents never fuse
        CHECK_FALSE(replay_audit(s, r.trace).empty());
    }
    {
        RunResult r = run(s);
        REQUIRE_FALSE(r.trace.events.empty());
        r.trace.events.erase(r.trace.events.begin());
        CHECK_FALSE(replay_audit(s, r.trace).empty());
    }
}

TEST_CASE("replay audit catches a forged adversary broadcast") {
    const ScenarioSpec s = sim_world();
    RunResult r = run(s);
    r.trace.steps[4][2].actual = Belief({0.5, 0.5}); // not the scripted lie
    const auto issues = replay_audit(s, r.trace);
    REQUIRE_FALSE(issues.empty());
    CHECK(issues.front().agent == 2);
}

TEST_CASE("paired comparison runs every variant on every seed") {
    ScenarioSpec min_variant = sim_world();
    min_variant.name = "w-min";
    ScenarioSpec adht_variant = sim_world();
    adht_variant.name = "w-adht";
    adht_variant.algorithm = Algorithm::Adht;

    const ComparisonTable table =
        compare({min_variant, adht_variant}, {1, 2, 3});
    REQUIRE(table.rows.size() == 6);
    CHECK(table.rows[0].variant == "w-min");
    CHECK(table.rows[0].seed == 1);
    CHECK(table.rows[3].variant == "w-adht");
    REQUIRE(table.median_convergence.size() == 2);
    // all seeds converge here, so both medians are defined
    CHECK(table.median_convergence[0].second.has_value());
    CHECK(table.median_convergence[1].second.has_value());
    // identical variants under the same seed give identical rows
    const ComparisonTable twice =
        compare({min_variant, min_variant}, {5});
    REQUIRE(twice.rows.size() == 2);
    CHECK(twice.rows[0].convergence_time == twice.rows[1].convergence_time);
    CHECK(twice.rows[0].case_one_total == twice.rows[1].case_one_total);
}

TEST_CASE("median convergence is undefined without a strict majority") {
    // horizon too short to converge: every seed fails, median is undefined
    ScenarioSpec s = sim_world();
    s.horizon = 1;
    const ComparisonTable table = compare({s}, {1, 2});
    REQUIRE(table.median_convergence.size() == 1);
    CHECK_FALSE(table.median_convergence[0].second.has_value());
}
