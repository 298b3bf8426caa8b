#pragma once

#include <string>
#include <vector>

namespace dht {

/**
 * The dhtsim command line, callable in-process for tests.  `args` excludes
 * the program name, e.g. {"run", "scenario.json", "--seed", "3"}.
 *
 * Subcommands: run, validate, compare, sweep, replay-audit.
 * Exit codes: 0 success; 1 validation errors, runtime invariant violations,
 * or audit mismatches; 2 usage or file-format errors.
 */
int cli_main(const std::vector<std::string>& args);

} // namespace dht
