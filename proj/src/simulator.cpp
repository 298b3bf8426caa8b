#include "dht/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "dht/adversary.hpp"
#include "dht/sensor.hpp"

namespace dht {

namespace {

std::string agent_tag(AgentId i) { return "agent " + std::to_string(i); }

void check_parameters(const ScenarioSpec& s, std::vector<Finding>& out) {
    auto error = [&out](std::string msg) {
        out.push_back({Finding::Level::Error, std::move(msg)});
    };
    if (s.agents.empty()) error("scenario declares no agents");
    if (s.num_agents() > kMaxAgents) {
        error("scenario declares more than " + std::to_string(kMaxAgents) + " agents");
    }
    for (AgentId i = 0; i < s.num_agents(); ++i) {
        if (s.agents[i].id != i) {
            error("agent ids must be 0..N-1 in order; slot " + std::to_string(i) +
                  " holds id " + std::to_string(s.agents[i].id));
            break;
        }
    }
    if (s.grid.width < 1 || s.grid.height < 1 || s.grid.width > 4096 ||
        s.grid.height > 4096) {
        error("grid dimensions must be within 1..4096");
    }
    if (!(s.sigma > 0.0)) error("sigma must be > 0");
    if (!(s.tau > 0.0) || s.tau > 1.0) error("tau must be in (0, 1]");
    if (s.f < 0) error("f must be >= 0");
    if (s.horizon < 0) error("horizon must be >= 0");
    if (s.hypotheses.count() < 2) {
        error("scenario needs at least two hypotheses");
    } else if (s.true_hypothesis < 0 || s.true_hypothesis >= s.hypotheses.count()) {
        error("true hypothesis index out of range");
    }
}

void check_agents(const ScenarioSpec& s, std::vector<Finding>& out) {
    const int m = s.hypotheses.count();
    for (const auto& a : s.agents) {
        auto error = [&](const std::string& msg) {
            out.push_back({Finding::Level::Error, agent_tag(a.id) + ": " + msg});
        };
        if (a.comm_radius < 0) error("communication radius must be >= 0");
        if (a.sensing_radius < 0) error("sensing radius must be >= 0");
        const std::pair<const char*, const std::vector<GridPos>*> cycles[] = {
            {"good", &a.path.good_cycle}, {"bad", &a.path.bad_cycle}};
        for (const auto& [which, cyc] : cycles) {
            const std::string problem = validate_cycle(*cyc, s.motion, s.grid);
            if (!problem.empty()) {
                error(std::string(which) + " cycle invalid: " + problem);
            }
        }
        const std::pair<const char*, const Belief*> priors[] = {
            {"local", &a.initial_local}, {"actual", &a.initial_actual}};
        for (const auto& [which, b] : priors) {
            if (static_cast<int>(b->size()) != m) {
                error(std::string("initial ") + which + " prior has " +
                      std::to_string(b->size()) + " entries, expected " +
                      std::to_string(m));
                continue;
            }
            bool positive = true;
            for (std::size_t h = 0; h < b->size(); ++h) {
                positive = positive && (*b)[h] > 0.0;
            }
            if (!positive) {
                error(std::string("initial ") + which +
                      " prior must be strictly positive in every hypothesis");
            } else if (!b->is_normalized()) {
                error(std::string("initial ") + which + " prior is not normalized");
            }
        }
        if (a.identity == Identity::Bad && !a.adversary.has_value()) {
            error("bad agent lacks an adversary policy");
        }
        if (a.identity == Identity::Good && a.adversary.has_value()) {
            error("good agent declares an adversary policy");
        }
    }
}

void check_identity_labels(const ScenarioSpec& s, std::vector<Finding>& out) {
    if (s.hypotheses.count() < 2 || s.true_hypothesis < 0 ||
        s.true_hypothesis >= s.hypotheses.count()) {
        return; // reported already
    }
    for (const auto& a : s.agents) {
        const bool label_good = s.hypotheses.good_bit(s.true_hypothesis, a.id);
        if (label_good != (a.identity == Identity::Good)) {
            out.push_back({Finding::Level::Error,
                           agent_tag(a.id) + ": identity contradicts the true "
                           "hypothesis label"});
        }
    }
}

void check_adversaries(const ScenarioSpec& s, std::vector<Finding>& out) {
    const int m = s.hypotheses.count();
    std::set<std::uint64_t> coordinated_labels;
    for (const auto& a : s.agents) {
        if (!a.adversary.has_value()) continue;
        const AdversaryConfig& cfg = *a.adversary;
        auto error = [&](const std::string& msg) {
            out.push_back({Finding::Level::Error, agent_tag(a.id) + ": " + msg});
        };
        using Policy = AdversaryConfig::Policy;
        if (cfg.policy == Policy::FixedFalse || cfg.policy == Policy::Coordinated) {
            const HypId h = s.hypotheses.index_of(cfg.false_label);
            if (h < 0) {
                error("adversary pushes a label that is not in the hypothesis set");
            } else if (h == s.true_hypothesis) {
                out.push_back({Finding::Level::Warning,
                               agent_tag(a.id) + ": adversary pushes the true "
                               "hypothesis; it will help, not hurt"});
            }
            if (cfg.policy == Policy::Coordinated) {
                coordinated_labels.insert(cfg.false_label);
            }
        }
        if (cfg.policy == Policy::Custom) {
            if (cfg.script.empty()) {
                error("custom adversary script is empty");
            }
            for (std::size_t k = 0; k < cfg.script.size(); ++k) {
                if (static_cast<int>(cfg.script[k].size()) != m ||
                    !cfg.script[k].is_normalized()) {
                    error("custom script entry " + std::to_string(k) +
                          " is not a normalized belief over the hypothesis set");
                    break;
                }
            }
        }
    }
    if (coordinated_labels.size() > 1) {
        out.push_back({Finding::Level::Error,
                       "coordinated adversaries disagree on the pushed label"});
    }
}

void check_f_bound(const ScenarioSpec& s, std::vector<Finding>& out) {
    const long period = s.joint_period();
    std::vector<int> radii(s.agents.size());
    for (const auto& a : s.agents) radii[a.id] = a.comm_radius;
    for (long t = 0; t < period; ++t) {
        const auto pos = s.actual_positions(t);
        for (AgentId i = 0; i < s.num_agents(); ++i) {
            if (!s.is_good(i)) continue;
            const AgentMask nbrs = neighbors_of(i, pos, radii);
            const int bad = mask_count(nbrs & ~s.good_mask());
            if (bad > s.f) {
                out.push_back({Finding::Level::Error,
                               agent_tag(i) + " has " + std::to_string(bad) +
                               " bad neighbors at step phase " + std::to_string(t) +
                               ", exceeding f=" + std::to_string(s.f)});
                return; // one witness is enough
            }
        }
    }
}

// Warning-level heuristics backing the convergence conditions.
void check_convergence_heuristics(const ScenarioSpec& s, const SourceSetIndex& idx,
                                  std::vector<Finding>& out) {
    const long period = s.joint_period();
    const int m = s.hypotheses.count();
    const int n = s.num_agents();

    // (1) Pairwise discriminability: each good agent's patrol should let it
    // tell every other agent's two instances apart at some phase.
    for (AgentId k = 0; k < n; ++k) {
        if (!s.is_good(k)) continue;
        for (AgentId j = 0; j < n; ++j) {
            if (j == k) continue;
            bool can = false;
            for (long t = 0; t < period && !can; ++t) {
                const GridPos q = position_at(s.agents[k].path.good_cycle, t);
                const GridPos a = s.instance_position(j, true, t);
                const GridPos b = s.instance_position(j, false, t);
                const int radius = s.agents[k].sensing_radius;
                can = a != b && (in_sensing_window(q, a, radius) ||
                                 in_sensing_window(q, b, radius));
            }
            if (!can) {
                out.push_back({Finding::Level::Warning,
                               agent_tag(k) + " never distinguishes agent " +
                               std::to_string(j) +
                               "'s instances along its patrol"});
            }
        }
    }

    // (2) Per-hypothesis source coverage: each good agent should either be
    // a source agent for every pair involving h, or be able to gather enough
    // source-agent neighbors for case one to fire (instantaneously for the
    // synchronous algorithm, unioned over a period for the asynchronous one).
    std::vector<int> radii(s.agents.size());
    for (const auto& a : s.agents) radii[a.id] = a.comm_radius;
    const int threshold = coverage_threshold({s.f, s.rule});

    for (AgentId i = 0; i < n; ++i) {
        if (!s.is_good(i)) continue;
        AgentMask union_nbrs = 0;
        std::vector<AgentMask> per_phase;
        per_phase.reserve(period);
        for (long t = 0; t < period; ++t) {
            const AgentMask nb = neighbors_of(i, s.actual_positions(t), radii);
            union_nbrs |= nb;
            per_phase.push_back(nb);
        }
        for (HypId h = 0; h < m; ++h) {
            bool alone = true;
            for (HypId hp = 0; hp < m && alone; ++hp) {
                if (hp != h) alone = mask_test(idx.source_agents(h, hp), i);
            }
            if (alone) continue;
            bool reachable = false;
            if (s.algorithm == Algorithm::Adht) {
                reachable = idx.coverage_holds(h, union_nbrs, threshold);
            } else {
                for (const AgentMask nb : per_phase) {
                    if (idx.coverage_holds(h, nb, threshold)) {
                        reachable = true;
                        break;
                    }
                }
            }
            if (!reachable) {
                out.push_back({Finding::Level::Warning,
                               agent_tag(i) + ", hypothesis " + std::to_string(h) +
                               ": not a source agent for every pair and the "
                               "case-one condition is never met along the period; "
                               "convergence is not guaranteed"});
            }
        }
    }
}

void check_invariants_after_step(const ScenarioSpec& s, long t,
                                 const std::vector<AgentState>& states) {
    for (const auto& st : states) {
        if (!s.is_good(st.id)) continue;
        if (!st.actual.is_normalized() || !st.local.is_normalized()) {
            throw SimulationError("step " + std::to_string(t) + ", " +
                                  agent_tag(st.id) + ": belief left the simplex");
        }
        if (!(st.actual[s.true_hypothesis] > 0.0)) {
            throw SimulationError("step " + std::to_string(t) + ", " +
                                  agent_tag(st.id) +
                                  ": actual belief in the true hypothesis hit zero");
        }
    }
}

RunMetrics compute_metrics(const ScenarioSpec& s, const SimulationTrace& trace) {
    RunMetrics mx;
    mx.case_one_total = static_cast<long>(trace.events.size());
    std::vector<long> per_step(trace.steps.size(), 0);
    for (const auto& e : trace.events) ++per_step[e.t];
    long running = 0;
    for (const long c : per_step) {
        running += c;
        mx.cumulative_case_one.push_back(running);
    }
    const AgentMask good = s.good_mask();
    const int n_good = mask_count(good);
    for (long t = 0; t < static_cast<long>(trace.steps.size()); ++t) {
        double sum_a = 0.0, sum_l = 0.0;
        bool all_converged = true;
        for (AgentId i = 0; i < s.num_agents(); ++i) {
            if (!mask_test(good, i)) continue;
            const double a = trace.steps[t][i].actual[s.true_hypothesis];
            sum_a += a;
            sum_l += trace.steps[t][i].local[s.true_hypothesis];
            all_converged = all_converged && a >= s.tau;
        }
        mx.mean_good_actual_true.push_back(sum_a / n_good);
        mx.mean_good_local_true.push_back(sum_l / n_good);
        if (all_converged && !mx.convergence_time.has_value()) {
            mx.convergence_time = t;
        }
    }
    for (AgentId i = 0; i < s.num_agents(); ++i) {
        mx.final_actual_true.push_back(
            trace.steps.back()[i].actual[s.true_hypothesis]);
    }
    return mx;
}

} // namespace

std::vector<Finding> validate(const ScenarioSpec& s) {
    std::vector<Finding> out;
    check_parameters(s, out);
    if (has_errors(out)) return out; // structure is broken; stop before walking paths
    check_agents(s, out);
    check_identity_labels(s, out);
    check_adversaries(s, out);
    if (has_errors(out)) return out;
    check_f_bound(s, out);
    const SourceSetIndex idx = SourceSetIndex::compute(s);
    check_convergence_heuristics(s, idx, out);
    return out;
}

RunResult run(const ScenarioSpec& s) {
    return run(s, SourceSetIndex::compute(s));
}

RunResult run(const ScenarioSpec& s, const SourceSetIndex& sources) {
    {
        const auto findings = validate(s);
        if (has_errors(findings)) {
            std::string msg = "scenario failed validation:";
            for (const auto& f : findings) {
                if (f.level == Finding::Level::Error) msg += "\n  " + f.message;
            }
            throw std::invalid_argument(msg);
        }
    }

    const int n = s.num_agents();
    const int m = s.hypotheses.count();
    const EngineParams params{s.f, s.rule};
    SensorCache cache(s);
    std::vector<int> radii(n);
    for (const auto& a : s.agents) radii[a.id] = a.comm_radius;

    std::vector<AgentState> states(n);
    for (AgentId i = 0; i < n; ++i) {
        states[i].id = i;
        states[i].local = s.agents[i].initial_local;
        states[i].actual = s.agents[i].initial_actual;
        if (s.algorithm == Algorithm::Adht) {
            states[i].adht = AdhtState::initial(n, m);
        }
    }

    SimulationTrace trace;
    trace.steps.reserve(s.horizon + 1);
    auto record = [&trace, &s, &radii, n](long t, const std::vector<AgentState>& sts) {
        const auto pos = s.actual_positions(t);
        std::vector<AgentRecord> row(n);
        for (AgentId i = 0; i < n; ++i) {
            row[i] = AgentRecord{sts[i].local, sts[i].actual, pos[i],
                                 neighbors_of(i, pos, radii)};
        }
        trace.steps.push_back(std::move(row));
    };
    record(0, states);

    for (long t = 1; t <= s.horizon; ++t) {
        // Phase one: snapshot what everyone broadcasts this step.
        std::vector<Belief> shares(n);
        for (AgentId j = 0; j < n; ++j) {
            if (s.is_good(j)) {
                shares[j] = states[j].actual;
            } else {
                shares[j] = adversarial_broadcast(*s.agents[j].adversary,
                                                  s.hypotheses, s.seed, j, t);
                // The broadcast is what the world saw of this agent at t.
                states[j].actual = shares[j];
            }
        }

        // Phase two: every good agent observes and updates against the
        // snapshot; nothing written in this phase is read within it.
        const auto pos = s.actual_positions(t);
        std::vector<AgentState> next = states;
        for (AgentId i = 0; i < n; ++i) {
            if (!s.is_good(i)) continue;
            const Observation obs = cache.observe(i, t, pos);
            const std::vector<double> lik = cache.likelihood_vector(i, t, obs);
            const AgentMask nbrs = neighbors_of(i, pos, radii);
            StepResult r = s.algorithm == Algorithm::Sdht
                               ? sdht_step(states[i], shares, nbrs, lik, sources, params)
                               : adht_step(states[i], shares, nbrs, lik, sources, params);
            next[i] = std::move(r.state);
            for (HypId h : r.case_one) {
                trace.events.push_back(CaseOneEvent{t, i, h});
            }
        }
        states = std::move(next);
        check_invariants_after_step(s, t, states);
        record(t, states);
    }

    RunResult result;
    result.trace = std::move(trace);
    result.metrics = compute_metrics(s, result.trace);
    return result;
}

namespace {

bool within_one_ulp(double a, double b) {
    if (a == b) return true;
    return std::nextafter(a, b) == b;
}

bool beliefs_match(const Belief& a, const Belief& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t h = 0; h < a.size(); ++h) {
        if (!within_one_ulp(a[h], b[h])) return false;
    }
    return true;
}

} // namespace

std::vector<AuditIssue> replay_audit(const ScenarioSpec& s,
                                     const SimulationTrace& trace) {
    std::vector<AuditIssue> issues;
    if (trace.steps.empty()) {
        issues.push_back({0, 0, "trace has no steps"});
        return issues;
    }
    const int n = s.num_agents();
    const int m = s.hypotheses.count();
    const EngineParams params{s.f, s.rule};
    const SourceSetIndex sources = SourceSetIndex::compute(s);
    SensorCache cache(s);
    std::vector<int> radii(n);
    for (const auto& a : s.agents) radii[a.id] = a.comm_radius;

    // Accumulators are not traced; rebuild them by replaying in order.
    std::vector<AdhtState> adht(n);
    for (AgentId i = 0; i < n; ++i) adht[i] = AdhtState::initial(n, m);

    // Group recorded events by (t, agent) once; per-agent lists sorted by hyp.
    std::map<std::pair<long, AgentId>, std::vector<HypId>> recorded;
    for (const auto& e : trace.events) {
        if (!s.is_good(e.agent)) {
            issues.push_back({e.t, e.agent, "case-one event recorded for a bad agent"});
            continue;
        }
        recorded[{e.t, e.agent}].push_back(e.hyp);
    }
    for (auto& [key, hs] : recorded) std::sort(hs.begin(), hs.end());
    static const std::vector<HypId> kNoEvents;
    auto recorded_events = [&recorded](long t, AgentId i) -> const std::vector<HypId>& {
        const auto it = recorded.find({t, i});
        return it == recorded.end() ? kNoEvents : it->second;
    };

    const long horizon = static_cast<long>(trace.steps.size()) - 1;
    for (long t = 0; t <= horizon; ++t) {
        const auto pos_t = s.actual_positions(t);
        for (AgentId i = 0; i < n; ++i) {
            if (trace.steps[t][i].position != pos_t[i]) {
                issues.push_back({t, i, "recorded position is off the agent's path"});
            }
            if (trace.steps[t][i].neighbors != neighbors_of(i, pos_t, radii)) {
                issues.push_back({t, i, "recorded neighbor set does not match "
                                        "the positions"});
            }
        }
    }
    for (long t = 1; t <= horizon; ++t) {
        std::vector<Belief> shares(n);
        for (AgentId j = 0; j < n; ++j) {
            if (s.is_good(j)) {
                shares[j] = trace.steps[t - 1][j].actual;
            } else {
                shares[j] = trace.steps[t][j].actual;
                const Belief expect = adversarial_broadcast(
                    *s.agents[j].adversary, s.hypotheses, s.seed, j, t);
                if (!beliefs_match(shares[j], expect)) {
                    issues.push_back({t, j, "recorded adversarial broadcast does "
                                            "not match the policy"});
                }
                if (!beliefs_match(trace.steps[t][j].local,
                                   s.agents[j].initial_local)) {
                    issues.push_back({t, j, "bad agent's recorded local belief "
                                            "is not its frozen prior"});
                }
            }
        }
        const auto pos = s.actual_positions(t);
        for (AgentId i = 0; i < n; ++i) {
            if (!s.is_good(i)) continue;
            AgentState prev;
            prev.id = i;
            prev.local = trace.steps[t - 1][i].local;
            prev.actual = trace.steps[t - 1][i].actual;
            prev.adht = std::move(adht[i]);

            const Observation obs = cache.observe(i, t, pos);
            const std::vector<double> lik = cache.likelihood_vector(i, t, obs);
            const AgentMask nbrs = neighbors_of(i, pos, radii);
            StepResult r = s.algorithm == Algorithm::Sdht
                               ? sdht_step(prev, shares, nbrs, lik, sources, params)
                               : adht_step(prev, shares, nbrs, lik, sources, params);
            adht[i] = std::move(r.state.adht);

            if (!beliefs_match(r.state.local, trace.steps[t][i].local)) {
                issues.push_back({t, i, "recomputed local belief differs"});
            }
            if (!beliefs_match(r.state.actual, trace.steps[t][i].actual)) {
                issues.push_back({t, i, "recomputed actual belief differs"});
            }
            std::vector<HypId> expect_events = r.case_one;
            std::sort(expect_events.begin(), expect_events.end());
            if (expect_events != recorded_events(t, i)) {
                issues.push_back({t, i, "recorded case-one events differ"});
            }
        }
    }
    return issues;
}

ComparisonTable compare(const std::vector<ScenarioSpec>& variants,
                        const std::vector<std::uint64_t>& seeds) {
    if (variants.empty()) {
        throw std::invalid_argument("compare: no variants given");
    }
    ComparisonTable table;
    for (const auto& v : variants) {
        const SourceSetIndex sources = SourceSetIndex::compute(v);
        std::vector<double> conv;
        long never = 0;
        for (std::uint64_t seed : seeds) {
            ScenarioSpec vs = v;
            vs.seed = seed;
            const RunResult r = run(vs, sources);
            table.rows.push_back(CompareRow{v.name, seed,
                                            r.metrics.convergence_time,
                                            r.metrics.case_one_total});
            if (r.metrics.convergence_time.has_value()) {
                conv.push_back(static_cast<double>(*r.metrics.convergence_time));
            } else {
                ++never;
            }
        }
        std::optional<double> median;
        if (!seeds.empty() && conv.size() * 2 > seeds.size()) {
            // Non-convergent seeds sit above every convergent one; the median
            // is defined whenever a strict majority converged.
            std::sort(conv.begin(), conv.end());
            const std::size_t total = seeds.size();
            if (total % 2 == 1) {
                median = conv[total / 2];
            } else {
                const std::size_t hi = total / 2, lo = hi - 1;
                if (hi < conv.size()) {
                    median = (conv[lo] + conv[hi]) / 2.0;
                }
            }
        }
        table.median_convergence.emplace_back(v.name, median);
    }
    return table;
}

} // namespace dht
