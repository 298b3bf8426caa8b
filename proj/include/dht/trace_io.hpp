#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "dht/scenario.hpp"
#include "dht/simulator.hpp"

namespace dht {

// Raised when a trace file cannot be read back: bad header, malformed row,
// out-of-range ids, missing rows, or an algorithm column that contradicts
// the scenario.
class TraceFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shortest decimal string that parses back to exactly this double ("0.25",
// "1", "0.1").  All trace values are serialized through this, so written
// files are byte-deterministic and read back bit-for-bit.
std::string format_double(double v);

// Directory name identifying one run: "<scenario>-seed<k>-<algorithm>-<rule>".
std::string run_dir_name(const ScenarioSpec& s);

// Belief rows, header "t,agent,kind,hyp,value", kind in {local, actual};
// one row per (step, agent, kind, hypothesis), in that nesting order.
std::string beliefs_csv(const SimulationTrace& trace);

// Case-one rows, header "t,agent,hyp,algorithm", in trace order.
std::string events_csv(const SimulationTrace& trace, Algorithm algorithm);

// Run summary as a JSON document with stable key order.
std::string metrics_json(const ScenarioSpec& s, const RunMetrics& m);

/**
 * Writes one run's complete file set into `dir` (created if needed):
 * scenario.json (the materialized spec), beliefs.csv, events.csv,
 * metrics.json.  Overwrites; a rerun of the same run reproduces the same
 * bytes.  Throws TraceFormatError on I/O failure.
 */
void write_run(const ScenarioSpec& s, const RunResult& r,
               const std::filesystem::path& dir);

/**
 * Rebuilds a trace from CSV text.  Belief values are read back exactly
 * (format_double round-trips); positions and neighbor sets are recomputed
 * from the scenario, which defines them.  Rows may appear in any order but
 * every
 * (step, agent, kind, hypothesis) cell must appear exactly once.
 */
SimulationTrace parse_trace(const ScenarioSpec& s, const std::string& beliefs_text,
                            const std::string& events_text);

// parse_trace over `dir`'s beliefs.csv and events.csv.
SimulationTrace read_trace(const ScenarioSpec& s, const std::filesystem::path& dir);

} // namespace dht
