#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "dht/scenario.hpp"

namespace dht {

// Raised for anything wrong with a scenario file itself: unreadable file,
// malformed JSON, wrong schema version, unknown keys, missing or mistyped
// fields, and cross-references that do not resolve (a label that is not in
// the hypothesis set, agent ids out of order).  Semantic problems with a
// well-formed scenario (an invalid cycle, too many bad neighbors) are the
// business of validate(), not the loader.
class ScenarioFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The one schema version this build reads and writes.
inline constexpr int kScenarioSchemaVersion = 1;

/**
 * Parses a scenario from JSON text.  `origin` names the source in error
 * messages and supplies the default scenario name.
 *
 * The returned spec has every default materialized: sigma 1.0, f 0,
 * algorithm "sdht", rule "min", horizon 50, seed 0, tau 0.99, motion
 * "eight_connected", identity "good", bad_cycle = good_cycle, initial_local
 * uniform, initial_actual = initial_local, and per-agent radii falling back
 * to the optional top-level "defaults" block.  Prior weight vectors are
 * normalized on the way in, so files may state them as unnormalized weights.
 *
 * Unknown keys anywhere are rejected.  Throws ScenarioFormatError.
 */
ScenarioSpec parse_scenario(const std::string& text, const std::string& origin);

// parse_scenario over a file's contents; the file's stem is the default name.
ScenarioSpec load_scenario(const std::filesystem::path& path);

// Canonical JSON for a spec: stable key order, two-space indent, explicit
// hypothesis labels, trailing newline.  serialize -> parse is the identity
// on materialized specs, and equal specs serialize to identical bytes.
std::string serialize_scenario(const ScenarioSpec& s);

// serialize_scenario to a file, overwriting.
void save_scenario(const ScenarioSpec& s, const std::filesystem::path& path);

} // namespace dht
