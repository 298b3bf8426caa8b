#include "dht/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "dht/scenario_io.hpp"
#include "dht/simulator.hpp"
#include "dht/trace_io.hpp"

namespace dht {

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1; // validation ERRORs, invariant breaks, audit hits
constexpr int kExitUsage = 2;     // bad invocation or malformed input files

// Per-run parameter overrides shared by the subcommands.
struct Overrides {
    std::optional<std::string> algorithm;
    std::optional<std::string> rule;
    std::optional<double> sigma;
    std::optional<int> f;
    std::optional<int> horizon;
    std::optional<double> tau;
    std::optional<std::uint64_t> seed;
};

void add_override_flags(CLI::App& cmd, Overrides& o) {
    cmd.add_option("--algorithm", o.algorithm, "Override the algorithm (sdht|adht)")
        ->check(CLI::IsMember({"sdht", "adht"}));
    cmd.add_option("--rule", o.rule, "Override the fusion rule (min|avg)")
        ->check(CLI::IsMember({"min", "avg"}));
    cmd.add_option("--sigma", o.sigma, "Override the sensor noise (must be > 0)");
    cmd.add_option("--f", o.f, "Override the resilience parameter f (must be >= 0)");
    cmd.add_option("--horizon", o.horizon, "Override the number of steps (must be >= 0)");
    cmd.add_option("--tau", o.tau, "Override the convergence threshold (in (0, 1])");
    cmd.add_option("--seed", o.seed, "Override the RNG seed");
}

// CLI11 validates types; ranges are checked here so the message names the flag.
void apply(const Overrides& o, ScenarioSpec& s) {
    if (o.algorithm) {
        s.algorithm = *o.algorithm == "sdht" ? Algorithm::Sdht : Algorithm::Adht;
    }
    if (o.rule) s.rule = *o.rule == "min" ? FusionRule::Min : FusionRule::Avg;
    if (o.sigma) {
        if (!(*o.sigma > 0.0)) throw CLI::ValidationError("--sigma must be > 0");
        s.sigma = *o.sigma;
    }
    if (o.f) {
        if (*o.f < 0) throw CLI::ValidationError("--f must be >= 0");
        s.f = *o.f;
    }
    if (o.horizon) {
        if (*o.horizon < 0) throw CLI::ValidationError("--horizon must be >= 0");
        s.horizon = *o.horizon;
    }
    if (o.tau) {
        if (!(*o.tau > 0.0) || *o.tau > 1.0) {
            throw CLI::ValidationError("--tau must be in (0, 1]");
        }
        s.tau = *o.tau;
    }
    if (o.seed) s.seed = *o.seed;
}

// "7" -> {7}; "0..19" -> {0, ..., 19} inclusive.
std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
    const auto dots = text.find("..");
    auto parse_one = [&text](const std::string& part) {
        std::size_t used = 0;
        std::uint64_t v = 0;
        try {
            v = std::stoull(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != part.size() || part.empty()) {
            throw CLI::ValidationError("--seeds expects K or A..B, got \"" + text +
                                       "\"");
        }
        return v;
    };
    if (dots == std::string::npos) return {parse_one(text)};
    const std::uint64_t a = parse_one(text.substr(0, dots));
    const std::uint64_t b = parse_one(text.substr(dots + 2));
    if (b < a || b - a > 100000) {
        throw CLI::ValidationError("--seeds range must be ascending and modest: \"" +
                                   text + "\"");
    }
    std::vector<std::uint64_t> seeds;
    seeds.reserve(b - a + 1);
    for (std::uint64_t k = a; k <= b; ++k) seeds.push_back(k);
    return seeds;
}

// Output root: --out beats DHTSIM_OUT beats the working directory.
fs::path out_root(const std::string& out_flag) {
    if (!out_flag.empty()) return out_flag;
    if (const char* env = std::getenv("DHTSIM_OUT"); env && *env) return env;
    return ".";
}

int print_findings(const std::vector<Finding>& findings) {
    for (const auto& f : findings) {
        std::cerr << (f.level == Finding::Level::Error ? "ERROR: " : "WARNING: ")
                  << f.message << "\n";
    }
    return has_errors(findings) ? kExitViolation : kExitOk;
}

std::string series_csv(const RunMetrics& m) {
    std::string out = "t,mean_good_actual_true,mean_good_local_true,cumulative_case_one\n";
    for (std::size_t t = 0; t < m.mean_good_actual_true.size(); ++t) {
        out += std::to_string(t);
        out += ',';
        out += format_double(m.mean_good_actual_true[t]);
        out += ',';
        out += format_double(m.mean_good_local_true[t]);
        out += ',';
        out += std::to_string(m.cumulative_case_one[t]);
        out += '\n';
    }
    return out;
}

constexpr const char* kGnuplotScript =
    "set datafile separator ','\n"
    "set key autotitle columnhead\n"
    "set xlabel 'step'\n"
    "set terminal pngcairo size 960,540\n"
    "set output 'beliefs.png'\n"
    "set ylabel 'mean good-agent belief in the true hypothesis'\n"
    "set yrange [0:1]\n"
    "plot 'series.csv' using 1:2 with lines lw 2, \\\n"
    "     'series.csv' using 1:3 with lines lw 2\n"
    "set output 'case_one.png'\n"
    "set ylabel 'cumulative case-one fusions'\n"
    "set yrange [*:*]\n"
    "plot 'series.csv' using 1:4 with steps lw 2\n";

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw TraceFormatError(path.string() + ": cannot open file for writing");
    out << content;
    if (!out) throw TraceFormatError(path.string() + ": write failed");
}

int cmd_run(const std::string& scenario_path, const Overrides& o,
            const std::string& out_flag, bool fast, bool gnuplot) {
    ScenarioSpec s = load_scenario(scenario_path);
    apply(o, s);

    const auto findings = validate(s);
    if (print_findings(findings) != kExitOk) return kExitViolation;

    const RunResult result = run(s);

    const fs::path dir = out_root(out_flag) / fs::path(run_dir_name(s));
    write_run(s, result, dir);
    if (gnuplot) {
        write_text(dir / "series.csv", series_csv(result.metrics));
        write_text(dir / "plot.gp", kGnuplotScript);
    }

    if (!fast) {
        const SimulationTrace reread = read_trace(s, dir);
        const auto issues = replay_audit(s, reread);
        if (!issues.empty()) {
            for (const auto& is : issues) {
                std::cerr << "AUDIT: step " << is.t << ", agent " << is.agent << ": "
                          << is.what << "\n";
            }
            return kExitViolation;
        }
        std::cout << "replay audit clean over " << result.trace.steps.size() - 1
                  << " steps\n";
    }

    std::cout << "wrote " << dir.string() << "\n";
    if (result.metrics.convergence_time.has_value()) {
        std::cout << "converged at t=" << *result.metrics.convergence_time;
    } else {
        std::cout << "did not converge within horizon " << s.horizon;
    }
    std::cout << ", case-one fusions: " << result.metrics.case_one_total << "\n";
    return kExitOk;
}

int cmd_validate(const std::vector<std::string>& paths, const Overrides& o) {
    int worst = kExitOk;
    for (const auto& p : paths) {
        ScenarioSpec s = load_scenario(p);
        apply(o, s);
        const auto findings = validate(s);
        if (paths.size() > 1) std::cout << p << ":\n";
        if (findings.empty()) {
            std::cout << "no findings\n";
        }
        worst = std::max(worst, print_findings(findings));
    }
    return worst;
}

std::string table_csv(const ComparisonTable& table) {
    std::string out = "variant,seed,converged,convergence_time,case_one_total\n";
    for (const auto& r : table.rows) {
        out += r.variant;
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += r.convergence_time.has_value() ? "yes" : "no";
        out += ',';
        if (r.convergence_time.has_value()) out += std::to_string(*r.convergence_time);
        out += ',';
        out += std::to_string(r.case_one_total);
        out += '\n';
    }
    return out;
}

void print_table(const ComparisonTable& table) {
    std::cout << "variant,seed,converged,convergence_time,case_one_total\n";
    for (const auto& r : table.rows) {
        std::cout << r.variant << ',' << r.seed << ','
                  << (r.convergence_time.has_value() ? "yes" : "no") << ',';
        if (r.convergence_time.has_value()) std::cout << *r.convergence_time;
        std::cout << ',' << r.case_one_total << "\n";
    }
    for (const auto& [variant, median] : table.median_convergence) {
        std::cout << "median convergence, " << variant << ": ";
        if (median.has_value()) {
            std::cout << format_double(*median) << "\n";
        } else {
            std::cout << "undefined (half or more seeds never converged)\n";
        }
    }
}

int run_variants(std::vector<ScenarioSpec> variants,
                 const std::vector<std::uint64_t>& seeds_flag,
                 const std::string& out_flag, const std::string& table_name) {
    std::vector<std::uint64_t> seeds = seeds_flag;
    if (seeds.empty()) seeds = {variants.front().seed};
    const ComparisonTable table = compare(variants, seeds);
    print_table(table);
    if (!out_flag.empty() || std::getenv("DHTSIM_OUT")) {
        const fs::path root = out_root(out_flag);
        std::error_code ec;
        fs::create_directories(root, ec);
        if (ec) {
            throw TraceFormatError(root.string() + ": cannot create directory (" +
                                   ec.message() + ")");
        }
        const fs::path out = root / table_name;
        write_text(out, table_csv(table));
        std::cout << "wrote " << out.string() << "\n";
    }
    return kExitOk;
}

int cmd_compare(const std::vector<std::string>& paths, const std::string& axis,
                const Overrides& o, const std::vector<std::uint64_t>& seeds,
                const std::string& out_flag) {
    if (!axis.empty() && paths.size() != 1) {
        throw CLI::ValidationError("--axis expands a single scenario; give one file");
    }
    if (axis == "algorithm" && o.algorithm) {
        throw CLI::ValidationError("--axis algorithm conflicts with --algorithm");
    }
    if (axis == "rule" && o.rule) {
        throw CLI::ValidationError("--axis rule conflicts with --rule");
    }
    std::vector<ScenarioSpec> variants;
    for (const auto& p : paths) {
        ScenarioSpec s = load_scenario(p);
        apply(o, s);
        variants.push_back(std::move(s));
    }
    if (!axis.empty()) {
        ScenarioSpec base = std::move(variants.front());
        variants.clear();
        if (axis == "algorithm") {
            for (const Algorithm a : {Algorithm::Sdht, Algorithm::Adht}) {
                ScenarioSpec v = base;
                v.algorithm = a;
                v.name += std::string("-") + to_string(a);
                variants.push_back(std::move(v));
            }
        } else { // "rule" (CLI11 already restricted the choices)
            for (const FusionRule r : {FusionRule::Min, FusionRule::Avg}) {
                ScenarioSpec v = base;
                v.rule = r;
                v.name += std::string("-") + to_string(r);
                variants.push_back(std::move(v));
            }
        }
    }
    return run_variants(std::move(variants), seeds, out_flag, "compare.csv");
}

int cmd_sweep(const std::string& path, const std::string& param,
              const std::vector<double>& values, const Overrides& o,
              const std::vector<std::uint64_t>& seeds, const std::string& out_flag) {
    if (param == "sigma" && o.sigma) {
        throw CLI::ValidationError("--param sigma conflicts with --sigma");
    }
    if (param == "f" && o.f) {
        throw CLI::ValidationError("--param f conflicts with --f");
    }
    if (values.empty()) {
        throw CLI::ValidationError("--values must list at least one grid point");
    }
    ScenarioSpec base = load_scenario(path);
    apply(o, base);
    std::vector<ScenarioSpec> variants;
    for (const double v : values) {
        ScenarioSpec s = base;
        if (param == "sigma") {
            if (!(v > 0.0)) throw CLI::ValidationError("sigma grid points must be > 0");
            s.sigma = v;
            s.name += "-sigma" + format_double(v);
        } else { // "f"
            const int fi = static_cast<int>(v);
            if (fi < 0 || static_cast<double>(fi) != v) {
                throw CLI::ValidationError("f grid points must be non-negative integers");
            }
            s.f = fi;
            s.name += "-f" + std::to_string(fi);
        }
        variants.push_back(std::move(s));
    }
    return run_variants(std::move(variants), seeds, out_flag, "sweep.csv");
}

int cmd_replay_audit(const std::string& run_dir) {
    const fs::path dir(run_dir);
    const ScenarioSpec s = load_scenario(dir / "scenario.json");
    const SimulationTrace trace = read_trace(s, dir);
    const auto issues = replay_audit(s, trace);
    for (const auto& is : issues) {
        std::cerr << "AUDIT: step " << is.t << ", agent " << is.agent << ": " << is.what
                  << "\n";
    }
    if (!issues.empty()) return kExitViolation;
    std::cout << "replay audit clean over " << trace.steps.size() - 1 << " steps\n";
    return kExitOk;
}

} // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"Byzantine-resilient distributed hypothesis testing on a gridworld"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "Run one scenario and write its trace");
    std::string run_path;
    run_cmd->add_option("scenario", run_path, "Scenario JSON file")->required();
    Overrides run_o;
    add_override_flags(*run_cmd, run_o);
    std::string run_out;
    run_cmd->add_option("--out", run_out,
                        "Output root (default: $DHTSIM_OUT, else the working "
                        "directory); the run writes into <root>/<name>-seed<k>-"
                        "<algorithm>-<rule>/");
    bool run_fast = false;
    run_cmd->add_flag("--fast", run_fast,
                      "Skip the post-run replay audit (runtime invariant checks "
                      "stay on)");
    bool run_gnuplot = false;
    run_cmd->add_flag("--gnuplot-script", run_gnuplot,
                      "Also write series.csv and plot.gp beside the trace");

    // validate
    auto* val_cmd = app.add_subcommand("validate", "Check scenarios and print findings");
    std::vector<std::string> val_paths;
    val_cmd->add_option("scenario", val_paths, "Scenario JSON file(s)")->required();
    Overrides val_o;
    add_override_flags(*val_cmd, val_o);

    // compare
    auto* cmp_cmd = app.add_subcommand(
        "compare", "Run variants over shared seeds and tabulate the results");
    std::vector<std::string> cmp_paths;
    cmp_cmd->add_option("scenario", cmp_paths, "Scenario JSON file(s), one per variant")
        ->required();
    std::string cmp_axis;
    cmp_cmd->add_option("--axis", cmp_axis,
                        "Expand one scenario into a pair of variants along this "
                        "dimension (algorithm|rule)")
        ->check(CLI::IsMember({"algorithm", "rule"}));
    Overrides cmp_o;
    add_override_flags(*cmp_cmd, cmp_o);
    std::string cmp_seeds_text;
    cmp_cmd->add_option("--seeds", cmp_seeds_text,
                        "Seed or inclusive seed range, K or A..B (default: the "
                        "scenario's own seed)");
    std::string cmp_out;
    cmp_cmd->add_option("--out", cmp_out,
                        "Where to write compare.csv (default: $DHTSIM_OUT if set, "
                        "else print only)");

    // sweep
    auto* swp_cmd =
        app.add_subcommand("sweep", "Run a parameter grid over shared seeds");
    std::string swp_path;
    swp_cmd->add_option("scenario", swp_path, "Scenario JSON file")->required();
    std::string swp_param;
    swp_cmd->add_option("--param", swp_param, "Grid dimension (sigma|f)")
        ->required()
        ->check(CLI::IsMember({"sigma", "f"}));
    std::vector<double> swp_values;
    swp_cmd->add_option("--values", swp_values, "Grid points, comma separated")
        ->required()
        ->delimiter(',');
    Overrides swp_o;
    add_override_flags(*swp_cmd, swp_o);
    std::string swp_seeds_text;
    swp_cmd->add_option("--seeds", swp_seeds_text,
                        "Seed or inclusive seed range, K or A..B (default: the "
                        "scenario's own seed)");
    std::string swp_out;
    swp_cmd->add_option("--out", swp_out,
                        "Where to write sweep.csv (default: $DHTSIM_OUT if set, "
                        "else print only)");

    // replay-audit
    auto* aud_cmd = app.add_subcommand(
        "replay-audit", "Re-derive every update in a written run and report drift");
    std::string aud_dir;
    aud_cmd->add_option("run_dir", aud_dir, "A directory written by `run`")->required();

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.push_back("dhtsim");
    for (const auto& a : args) argv_storage.push_back(a);
    std::vector<const char*> argv;
    argv.reserve(argv_storage.size());
    for (const auto& a : argv_storage) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exit 0
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the diagnostic
        return kExitUsage;
    }

    try {
        if (*run_cmd) {
            return cmd_run(run_path, run_o, run_out, run_fast, run_gnuplot);
        }
        if (*val_cmd) {
            return cmd_validate(val_paths, val_o);
        }
        if (*cmp_cmd) {
            const auto seeds = cmp_seeds_text.empty()
                                   ? std::vector<std::uint64_t>{}
                                   : parse_seed_range(cmp_seeds_text);
            return cmd_compare(cmp_paths, cmp_axis, cmp_o, seeds, cmp_out);
        }
        if (*swp_cmd) {
            const auto seeds = swp_seeds_text.empty()
                                   ? std::vector<std::uint64_t>{}
                                   : parse_seed_range(swp_seeds_text);
            return cmd_sweep(swp_path, swp_param, swp_values, swp_o, seeds, swp_out);
        }
        if (*aud_cmd) {
            return cmd_replay_audit(aud_dir);
        }
        std::cerr << "no subcommand selected\n";
        return kExitUsage;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ScenarioFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const TraceFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SimulationError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kExitViolation;
    } catch (const std::invalid_argument& e) {
        // run() refusing a scenario that failed validation, and kin.
        std::cerr << "error: " << e.what() << "\n";
        return kExitViolation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitViolation;
    }
}

} // namespace dht
