#include "dht/trace_io.hpp"

#include "dht/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include <json.hpp>

namespace dht {

namespace {

constexpr const char* kBeliefsHeader = "t,agent,kind,hyp,value";
constexpr const char* kEventsHeader = "t,agent,hyp,algorithm";

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw TraceFormatError(path.string() + ": cannot open file for writing");
    }
    out << content;
    if (!out) {
        throw TraceFormatError(path.string() + ": write failed");
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw TraceFormatError(path.string() + ": cannot open file");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

// Splits into lines; tolerates a missing final newline and skips blank
// trailing lines.
std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

long parse_long(const std::string& field, const std::string& where) {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw TraceFormatError(where + ": expected an integer, got \"" + field + "\"");
    }
    return v;
}

double parse_double(const std::string& field, const std::string& where) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw TraceFormatError(where + ": expected a finite number, got \"" + field +
                               "\"");
    }
    return v;
}

} // namespace

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) {
        throw TraceFormatError("number does not fit its formatting buffer");
    }
    return std::string(buf, ptr);
}

std::string run_dir_name(const ScenarioSpec& s) {
    return s.name + "-seed" + std::to_string(s.seed) + "-" + to_string(s.algorithm) +
           "-" + to_string(s.rule);
}

std::string beliefs_csv(const SimulationTrace& trace) {
    std::string out = kBeliefsHeader;
    out += '\n';
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
        const std::string t_prefix = std::to_string(t) + ',';
        for (std::size_t i = 0; i < trace.steps[t].size(); ++i) {
            const AgentRecord& rec = trace.steps[t][i];
            const std::string agent_prefix = t_prefix + std::to_string(i) + ',';
            const std::pair<const char*, const Belief*> kinds[] = {
                {"local", &rec.local}, {"actual", &rec.actual}};
            for (const auto& [kind, belief] : kinds) {
                for (std::size_t h = 0; h < belief->size(); ++h) {
                    out += agent_prefix;
                    out += kind;
                    out += ',';
                    out += std::to_string(h);
                    out += ',';
                    out += format_double((*belief)[h]);
                    out += '\n';
                }
            }
        }
    }
    return out;
}

std::string events_csv(const SimulationTrace& trace, Algorithm algorithm) {
    std::string out = kEventsHeader;
    out += '\n';
    for (const CaseOneEvent& e : trace.events) {
        out += std::to_string(e.t);
        out += ',';
        out += std::to_string(e.agent);
        out += ',';
        out += std::to_string(e.hyp);
        out += ',';
        out += to_string(algorithm);
        out += '\n';
    }
    return out;
}

std::string metrics_json(const ScenarioSpec& s, const RunMetrics& m) {
    nlohmann::ordered_json doc;
    doc["scenario"] = s.name;
    doc["seed"] = s.seed;
    doc["algorithm"] = to_string(s.algorithm);
    doc["rule"] = to_string(s.rule);
    doc["horizon"] = s.horizon;
    doc["tau"] = s.tau;
    doc["converged"] = m.convergence_time.has_value();
    if (m.convergence_time.has_value()) {
        doc["convergence_time"] = *m.convergence_time;
    } else {
        doc["convergence_time"] = nullptr;
    }
    doc["case_one_total"] = m.case_one_total;
    doc["cumulative_case_one"] = m.cumulative_case_one;
    doc["mean_good_actual_true"] = m.mean_good_actual_true;
    doc["mean_good_local_true"] = m.mean_good_local_true;
    doc["final_actual_true"] = m.final_actual_true;
    return doc.dump(2) + "\n";
}

void write_run(const ScenarioSpec& s, const RunResult& r,
               const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw TraceFormatError(dir.string() + ": cannot create directory (" +
                               ec.message() + ")");
    }
    write_file(dir / "scenario.json", serialize_scenario(s));
    write_file(dir / "beliefs.csv", beliefs_csv(r.trace));
    write_file(dir / "events.csv", events_csv(r.trace, s.algorithm));
    write_file(dir / "metrics.json", metrics_json(s, r.metrics));
}

SimulationTrace parse_trace(const ScenarioSpec& s, const std::string& beliefs_text,
                            const std::string& events_text) {
    const int n = s.num_agents();
    const int m = s.hypotheses.count();

    const auto belief_lines = split_lines(beliefs_text);
    if (belief_lines.empty() || belief_lines[0] != kBeliefsHeader) {
        throw TraceFormatError("beliefs CSV: expected header \"" +
                               std::string(kBeliefsHeader) + "\"");
    }
    const std::size_t rows = belief_lines.size() - 1;
    const std::size_t per_step = static_cast<std::size_t>(n) * 2 * m;
    if (rows == 0 || rows % per_step != 0) {
        throw TraceFormatError("beliefs CSV: expected a multiple of " +
                               std::to_string(per_step) + " data rows, found " +
                               std::to_string(rows));
    }
    const long horizon = static_cast<long>(rows / per_step) - 1;

    // values[t][agent][kind][hyp]; -1 marks a cell no row has filled yet.
    std::vector<std::vector<std::array<std::vector<double>, 2>>> values(
        horizon + 1,
        std::vector<std::array<std::vector<double>, 2>>(
            n, {std::vector<double>(m, -1.0), std::vector<double>(m, -1.0)}));

    for (std::size_t k = 1; k < belief_lines.size(); ++k) {
        const std::string where = "beliefs CSV, line " + std::to_string(k + 1);
        const auto f = split_fields(belief_lines[k]);
        if (f.size() != 5) {
            throw TraceFormatError(where + ": expected 5 fields, got " +
                                   std::to_string(f.size()));
        }
        const long t = parse_long(f[0], where);
        const long agent = parse_long(f[1], where);
        const long hyp = parse_long(f[3], where);
        if (t < 0 || t > horizon) throw TraceFormatError(where + ": step out of range");
        if (agent < 0 || agent >= n) {
            throw TraceFormatError(where + ": agent out of range");
        }
        if (hyp < 0 || hyp >= m) {
            throw TraceFormatError(where + ": hypothesis out of range");
        }
        int kind;
        if (f[2] == "local") {
            kind = 0;
        } else if (f[2] == "actual") {
            kind = 1;
        } else {
            throw TraceFormatError(where + ": kind must be \"local\" or \"actual\"");
        }
        double& cell = values[t][agent][kind][hyp];
        if (cell >= 0.0) throw TraceFormatError(where + ": duplicate row");
        const double v = parse_double(f[4], where);
        if (v < 0.0) throw TraceFormatError(where + ": belief values must be >= 0");
        cell = v;
    }

    SimulationTrace trace;
    trace.steps.resize(horizon + 1);
    std::vector<int> radii(n);
    for (const auto& a : s.agents) radii[a.id] = a.comm_radius;
    for (long t = 0; t <= horizon; ++t) {
        const auto pos = s.actual_positions(t);
        trace.steps[t].resize(n);
        for (int i = 0; i < n; ++i) {
            for (const int kind : {0, 1}) {
                for (int h = 0; h < m; ++h) {
                    if (values[t][i][kind][h] < 0.0) {
                        throw TraceFormatError(
                            "beliefs CSV: no row for t=" + std::to_string(t) +
                            " agent=" + std::to_string(i) + " kind=" +
                            (kind == 0 ? "local" : "actual") +
                            " hyp=" + std::to_string(h));
                    }
                }
            }
            trace.steps[t][i].local = Belief(values[t][i][0]);
            trace.steps[t][i].actual = Belief(values[t][i][1]);
            trace.steps[t][i].position = pos[i];
            trace.steps[t][i].neighbors = neighbors_of(i, pos, radii);
        }
    }

    const auto event_lines = split_lines(events_text);
    if (event_lines.empty() || event_lines[0] != kEventsHeader) {
        throw TraceFormatError("events CSV: expected header \"" +
                               std::string(kEventsHeader) + "\"");
    }
    for (std::size_t k = 1; k < event_lines.size(); ++k) {
        const std::string where = "events CSV, line " + std::to_string(k + 1);
        const auto f = split_fields(event_lines[k]);
        if (f.size() != 4) {
            throw TraceFormatError(where + ": expected 4 fields, got " +
                                   std::to_string(f.size()));
        }
        const long t = parse_long(f[0], where);
        const long agent = parse_long(f[1], where);
        const long hyp = parse_long(f[2], where);
        if (t < 1 || t > horizon || agent < 0 || agent >= n || hyp < 0 || hyp >= m) {
            throw TraceFormatError(where + ": event out of range");
        }
        if (f[3] != to_string(s.algorithm)) {
            throw TraceFormatError(where + ": algorithm \"" + f[3] +
                                   "\" does not match the scenario's \"" +
                                   to_string(s.algorithm) + "\"");
        }
        trace.events.push_back(
            CaseOneEvent{t, static_cast<AgentId>(agent), static_cast<HypId>(hyp)});
    }
    return trace;
}

SimulationTrace read_trace(const ScenarioSpec& s, const std::filesystem::path& dir) {
    return parse_trace(s, read_file(dir / "beliefs.csv"),
                       read_file(dir / "events.csv"));
}

} // namespace dht
