#include "dht/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace dht {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ScenarioFormatError(path + ": " + what);
}

void require_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) fail(path, "unknown key \"" + key + "\"");
    }
}

const json& require(const json& obj, const std::string& path, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing required key \"") + key + "\"");
    return *it;
}

long get_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<long>();
}

double get_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
}

std::string get_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

GridPos get_pos(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) fail(path, "expected an [x, y] pair");
    return GridPos{static_cast<int>(get_int(v[0], path + "[0]")),
                   static_cast<int>(get_int(v[1], path + "[1]"))};
}

std::vector<GridPos> get_cycle(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) {
        fail(path, "expected a non-empty array of [x, y] pairs");
    }
    std::vector<GridPos> out;
    out.reserve(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        out.push_back(get_pos(v[k], path + "[" + std::to_string(k) + "]"));
    }
    return out;
}

// A per-agent good/bad tuple written as an array of 0/1 bits, e.g.
// [1, 1, 1, 0, 1] for "agent 3 is bad".
std::uint64_t get_label(const json& v, const std::string& path, int num_agents) {
    if (!v.is_array() || static_cast<int>(v.size()) != num_agents) {
        fail(path, "expected an array of " + std::to_string(num_agents) + " 0/1 bits");
    }
    std::uint64_t label = 0;
    for (int j = 0; j < num_agents; ++j) {
        const long bit = get_int(v[j], path + "[" + std::to_string(j) + "]");
        if (bit != 0 && bit != 1) {
            fail(path + "[" + std::to_string(j) + "]", "bits must be 0 or 1");
        }
        if (bit) label |= 1ULL << j;
    }
    return label;
}

ordered_json label_to_bits(std::uint64_t label, int num_agents) {
    ordered_json bits = ordered_json::array();
    for (int j = 0; j < num_agents; ++j) {
        bits.push_back(static_cast<int>((label >> j) & 1ULL));
    }
    return bits;
}

// Positive weight vectors are accepted and normalized, so priors can be
// written as e.g. [1, 1, 1, 1].  Negative or non-finite entries are a
// format error; an all-zero vector is left as-is for validate() to flag.
Belief get_weights(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) {
        fail(path, "expected a non-empty array of weights");
    }
    std::vector<double> w;
    w.reserve(v.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double d = get_number(v[k], path + "[" + std::to_string(k) + "]");
        if (d < 0.0) fail(path + "[" + std::to_string(k) + "]", "weights must be >= 0");
        w.push_back(d);
        sum += d;
    }
    Belief raw{std::move(w)};
    if (sum > 0.0) return normalize(raw);
    return raw;
}

MotionGraph get_motion(const json& v, const std::string& path) {
    if (v.is_string()) {
        if (v.get<std::string>() == "eight_connected") {
            return MotionGraph::eight_connected();
        }
        fail(path, "expected \"eight_connected\" or an {\"explicit_edges\": ...} object");
    }
    if (!v.is_object()) {
        fail(path, "expected \"eight_connected\" or an {\"explicit_edges\": ...} object");
    }
    require_keys(v, path, {"explicit_edges"});
    const json& ed = require(v, path, "explicit_edges");
    if (!ed.is_array()) fail(path + ".explicit_edges", "expected an array of edges");
    std::vector<std::pair<GridPos, GridPos>> edges;
    edges.reserve(ed.size());
    for (std::size_t k = 0; k < ed.size(); ++k) {
        const std::string epath = path + ".explicit_edges[" + std::to_string(k) + "]";
        if (!ed[k].is_array() || ed[k].size() != 2) {
            fail(epath, "expected a [[x,y], [x,y]] pair");
        }
        edges.emplace_back(get_pos(ed[k][0], epath + "[0]"),
                           get_pos(ed[k][1], epath + "[1]"));
    }
    return MotionGraph::explicit_edges(std::move(edges));
}

HypothesisSet get_hypotheses(const json& v, const std::string& path, int num_agents) {
    if (!v.is_object()) {
        fail(path, "expected {\"labels\": ...} or {\"at_most_bad\": ...}");
    }
    require_keys(v, path, {"labels", "at_most_bad"});
    const bool has_labels = v.contains("labels");
    const bool has_bound = v.contains("at_most_bad");
    if (has_labels == has_bound) {
        fail(path, "give exactly one of \"labels\" and \"at_most_bad\"");
    }
    try {
        if (has_bound) {
            const long k = get_int(v["at_most_bad"], path + ".at_most_bad");
            return HypothesisSet::at_most_bad(num_agents, static_cast<int>(k));
        }
        const json& rows = v["labels"];
        if (!rows.is_array()) fail(path + ".labels", "expected an array of labels");
        std::vector<std::uint64_t> labels;
        labels.reserve(rows.size());
        for (std::size_t h = 0; h < rows.size(); ++h) {
            labels.push_back(get_label(rows[h],
                                       path + ".labels[" + std::to_string(h) + "]",
                                       num_agents));
        }
        return HypothesisSet(std::move(labels), num_agents);
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

AdversaryConfig get_adversary(const json& v, const std::string& path,
                              const HypothesisSet& hyps) {
    if (!v.is_object()) fail(path, "expected an adversary object");
    require_keys(v, path, {"policy", "false_label", "script"});
    AdversaryConfig cfg;
    const std::string policy = get_string(require(v, path, "policy"), path + ".policy");
    using Policy = AdversaryConfig::Policy;
    if (policy == "random_belief") {
        cfg.policy = Policy::RandomBelief;
    } else if (policy == "fixed_false") {
        cfg.policy = Policy::FixedFalse;
    } else if (policy == "coordinated") {
        cfg.policy = Policy::Coordinated;
    } else if (policy == "custom") {
        cfg.policy = Policy::Custom;
    } else {
        fail(path + ".policy", "expected one of \"random_belief\", \"fixed_false\", "
                               "\"coordinated\", \"custom\"");
    }
    const bool wants_label = cfg.policy == Policy::FixedFalse ||
                             cfg.policy == Policy::Coordinated;
    if (v.contains("false_label") != wants_label) {
        fail(path, wants_label ? "this policy requires \"false_label\""
                               : "\"false_label\" only applies to fixed_false "
                                 "and coordinated policies");
    }
    if (wants_label) {
        cfg.false_label = get_label(v["false_label"], path + ".false_label",
                                    hyps.num_agents());
        if (hyps.index_of(cfg.false_label) < 0) {
            fail(path + ".false_label", "label is not in the hypothesis set");
        }
    }
    if (v.contains("script") != (cfg.policy == Policy::Custom)) {
        fail(path, cfg.policy == Policy::Custom
                       ? "the custom policy requires \"script\""
                       : "\"script\" only applies to the custom policy");
    }
    if (cfg.policy == Policy::Custom) {
        const json& sc = v["script"];
        if (!sc.is_array() || sc.empty()) {
            fail(path + ".script", "expected a non-empty array of weight vectors");
        }
        for (std::size_t k = 0; k < sc.size(); ++k) {
            cfg.script.push_back(
                get_weights(sc[k], path + ".script[" + std::to_string(k) + "]"));
        }
    }
    return cfg;
}

AgentSpec get_agent(const json& v, const std::string& path, int expected_id,
                    const HypothesisSet& hyps, const json* defaults) {
    if (!v.is_object()) fail(path, "expected an agent object");
    require_keys(v, path,
                 {"id", "identity", "comm_radius", "sensing_radius", "good_cycle",
                  "bad_cycle", "initial_local", "initial_actual", "adversary"});
    AgentSpec a;
    a.id = static_cast<AgentId>(get_int(require(v, path, "id"), path + ".id"));
    if (a.id != expected_id) {
        fail(path + ".id", "agent ids must be 0..N-1 in listing order; expected " +
                               std::to_string(expected_id));
    }
    if (v.contains("identity")) {
        const std::string id = get_string(v["identity"], path + ".identity");
        if (id == "good") {
            a.identity = Identity::Good;
        } else if (id == "bad") {
            a.identity = Identity::Bad;
        } else {
            fail(path + ".identity", "expected \"good\" or \"bad\"");
        }
    }
    auto radius = [&](const char* key) {
        if (v.contains(key)) {
            return static_cast<int>(get_int(v[key], path + "." + key));
        }
        if (defaults && defaults->contains(key)) {
            return static_cast<int>(get_int((*defaults)[key],
                                            std::string("defaults.") + key));
        }
        fail(path, std::string("missing \"") + key +
                       "\" (set it here or in the top-level \"defaults\" block)");
    };
    a.comm_radius = radius("comm_radius");
    a.sensing_radius = radius("sensing_radius");
    a.path.good_cycle = get_cycle(require(v, path, "good_cycle"), path + ".good_cycle");
    a.path.bad_cycle = v.contains("bad_cycle")
                           ? get_cycle(v["bad_cycle"], path + ".bad_cycle")
                           : a.path.good_cycle;
    a.initial_local = v.contains("initial_local")
                          ? get_weights(v["initial_local"], path + ".initial_local")
                          : Belief::uniform(hyps.count());
    a.initial_actual = v.contains("initial_actual")
                           ? get_weights(v["initial_actual"], path + ".initial_actual")
                           : a.initial_local;
    if (v.contains("adversary")) {
        a.adversary = get_adversary(v["adversary"], path + ".adversary", hyps);
    }
    return a;
}

} // namespace

ScenarioSpec parse_scenario(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioFormatError(origin + ": " + e.what());
    }
    if (!doc.is_object()) fail(origin, "top level must be a JSON object");
    require_keys(doc, origin,
                 {"schema_version", "name", "grid", "motion", "hypotheses",
                  "true_hypothesis", "sigma", "f", "algorithm", "rule", "horizon",
                  "seed", "tau", "defaults", "agents"});

    const long version =
        get_int(require(doc, origin, "schema_version"), origin + ".schema_version");
    if (version != kScenarioSchemaVersion) {
        fail(origin + ".schema_version",
             "this build reads version " + std::to_string(kScenarioSchemaVersion) +
                 ", file says " + std::to_string(version));
    }

    ScenarioSpec s;
    s.name = doc.contains("name") ? get_string(doc["name"], origin + ".name") : origin;
    if (s.name.empty()) fail(origin + ".name", "name must not be empty");

    const json& grid = require(doc, origin, "grid");
    if (!grid.is_object()) fail(origin + ".grid", "expected {\"width\": ..., \"height\": ...}");
    require_keys(grid, origin + ".grid", {"width", "height"});
    s.grid.width = static_cast<int>(
        get_int(require(grid, origin + ".grid", "width"), origin + ".grid.width"));
    s.grid.height = static_cast<int>(
        get_int(require(grid, origin + ".grid", "height"), origin + ".grid.height"));
    if (s.grid.width < 1 || s.grid.height < 1 || s.grid.width > 4096 ||
        s.grid.height > 4096) {
        fail(origin + ".grid", "width and height must be within 1..4096");
    }

    if (doc.contains("motion")) s.motion = get_motion(doc["motion"], origin + ".motion");

    const json& agents = require(doc, origin, "agents");
    if (!agents.is_array() || agents.empty()) {
        fail(origin + ".agents", "expected a non-empty array of agents");
    }
    const int n = static_cast<int>(agents.size());
    if (n > kMaxAgents) {
        fail(origin + ".agents", "at most " + std::to_string(kMaxAgents) + " agents");
    }

    s.hypotheses =
        get_hypotheses(require(doc, origin, "hypotheses"), origin + ".hypotheses", n);

    const std::uint64_t star = get_label(require(doc, origin, "true_hypothesis"),
                                         origin + ".true_hypothesis", n);
    s.true_hypothesis = s.hypotheses.index_of(star);
    if (s.true_hypothesis < 0) {
        fail(origin + ".true_hypothesis", "label is not in the hypothesis set");
    }

    if (doc.contains("sigma")) {
        s.sigma = get_number(doc["sigma"], origin + ".sigma");
        if (!(s.sigma > 0.0)) fail(origin + ".sigma", "sigma must be > 0");
    }
    if (doc.contains("f")) {
        const long f = get_int(doc["f"], origin + ".f");
        if (f < 0) fail(origin + ".f", "f must be >= 0");
        s.f = static_cast<int>(f);
    }
    if (doc.contains("algorithm")) {
        const std::string a = get_string(doc["algorithm"], origin + ".algorithm");
        if (a == "sdht") {
            s.algorithm = Algorithm::Sdht;
        } else if (a == "adht") {
            s.algorithm = Algorithm::Adht;
        } else {
            fail(origin + ".algorithm", "expected \"sdht\" or \"adht\"");
        }
    }
    if (doc.contains("rule")) {
        const std::string r = get_string(doc["rule"], origin + ".rule");
        if (r == "min") {
            s.rule = FusionRule::Min;
        } else if (r == "avg") {
            s.rule = FusionRule::Avg;
        } else {
            fail(origin + ".rule", "expected \"min\" or \"avg\"");
        }
    }
    s.horizon = 50;
    if (doc.contains("horizon")) {
        const long h = get_int(doc["horizon"], origin + ".horizon");
        if (h < 0) fail(origin + ".horizon", "horizon must be >= 0");
        s.horizon = static_cast<int>(h);
    }
    if (doc.contains("seed")) {
        const json& v = doc["seed"];
        if (!v.is_number_unsigned() && !v.is_number_integer()) {
            fail(origin + ".seed", "expected a non-negative integer");
        }
        if (v.is_number_integer() && v.get<long long>() < 0) {
            fail(origin + ".seed", "expected a non-negative integer");
        }
        s.seed = v.get<std::uint64_t>();
    }
    if (doc.contains("tau")) {
        s.tau = get_number(doc["tau"], origin + ".tau");
        if (!(s.tau > 0.0) || s.tau > 1.0) fail(origin + ".tau", "tau must be in (0, 1]");
    }

    const json* defaults = nullptr;
    if (doc.contains("defaults")) {
        const json& d = doc["defaults"];
        if (!d.is_object()) fail(origin + ".defaults", "expected an object");
        require_keys(d, origin + ".defaults", {"comm_radius", "sensing_radius"});
        defaults = &d;
    }

    s.agents.reserve(n);
    for (int k = 0; k < n; ++k) {
        s.agents.push_back(get_agent(agents[k],
                                     origin + ".agents[" + std::to_string(k) + "]", k,
                                     s.hypotheses, defaults));
    }
    return s;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ScenarioFormatError(path.string() + ": cannot open file");
    }
    std::ostringstream text;
    text << in.rdbuf();
    ScenarioSpec s = parse_scenario(text.str(), path.string());
    if (!path.stem().string().empty() && s.name == path.string()) {
        s.name = path.stem().string();
    }
    return s;
}

std::string serialize_scenario(const ScenarioSpec& s) {
    const int n = s.num_agents();
    ordered_json doc;
    doc["schema_version"] = kScenarioSchemaVersion;
    doc["name"] = s.name;
    doc["grid"] = {{"width", s.grid.width}, {"height", s.grid.height}};
    if (s.motion.is_explicit()) {
        ordered_json edges = ordered_json::array();
        for (const auto& [from, to] : s.motion.edges()) {
            edges.push_back({{from.x, from.y}, {to.x, to.y}});
        }
        doc["motion"] = {{"explicit_edges", std::move(edges)}};
    } else {
        doc["motion"] = "eight_connected";
    }
    ordered_json labels = ordered_json::array();
    for (HypId h = 0; h < s.hypotheses.count(); ++h) {
        labels.push_back(label_to_bits(s.hypotheses.label(h), n));
    }
    doc["hypotheses"] = {{"labels", std::move(labels)}};
    doc["true_hypothesis"] = label_to_bits(s.hypotheses.label(s.true_hypothesis), n);
    doc["sigma"] = s.sigma;
    doc["f"] = s.f;
    doc["algorithm"] = to_string(s.algorithm);
    doc["rule"] = to_string(s.rule);
    doc["horizon"] = s.horizon;
    doc["seed"] = s.seed;
    doc["tau"] = s.tau;
    ordered_json agents = ordered_json::array();
    for (const AgentSpec& a : s.agents) {
        ordered_json row;
        row["id"] = a.id;
        row["identity"] = a.identity == Identity::Good ? "good" : "bad";
        row["comm_radius"] = a.comm_radius;
        row["sensing_radius"] = a.sensing_radius;
        auto cycle = [](const std::vector<GridPos>& c) {
            ordered_json out = ordered_json::array();
            for (const GridPos& p : c) out.push_back({p.x, p.y});
            return out;
        };
        row["good_cycle"] = cycle(a.path.good_cycle);
        row["bad_cycle"] = cycle(a.path.bad_cycle);
        row["initial_local"] = a.initial_local.probs();
        row["initial_actual"] = a.initial_actual.probs();
        if (a.adversary.has_value()) {
            ordered_json adv;
            using Policy = AdversaryConfig::Policy;
            switch (a.adversary->policy) {
                case Policy::RandomBelief: adv["policy"] = "random_belief"; break;
                case Policy::FixedFalse: adv["policy"] = "fixed_false"; break;
                case Policy::Coordinated: adv["policy"] = "coordinated"; break;
                case Policy::Custom: adv["policy"] = "custom"; break;
            }
            if (a.adversary->policy == Policy::FixedFalse ||
                a.adversary->policy == Policy::Coordinated) {
                adv["false_label"] = label_to_bits(a.adversary->false_label, n);
            }
            if (a.adversary->policy == Policy::Custom) {
                ordered_json script = ordered_json::array();
                for (const Belief& b : a.adversary->script) script.push_back(b.probs());
                adv["script"] = std::move(script);
            }
            row["adversary"] = std::move(adv);
        }
        agents.push_back(std::move(row));
    }
    doc["agents"] = std::move(agents);
    return doc.dump(2) + "\n";
}

void save_scenario(const ScenarioSpec& s, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ScenarioFormatError(path.string() + ": cannot open file for writing");
    }
    out << serialize_scenario(s);
    if (!out) {
        throw ScenarioFormatError(path.string() + ": write failed");
    }
}

} // namespace dht
