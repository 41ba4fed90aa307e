#pragma once

#include <string>
#include <vector>

#include "fracdecay/datum.hpp"

namespace fracdecay {

// Thrown by parse_config when --help is requested; carries the help text.
struct HelpRequested {
    std::string text;
};

// Resolved configuration for one CLI invocation. Flags override config-file
// keys; every key is validated before any computation starts.
struct RunConfig {
    std::string subcommand;  // profile | fundsol | evolve | verify | decay

    std::vector<double> alphas{0.5};
    double tol = 1e-8;
    double x_max = 20.0;        // profile table extent
    std::size_t n_nodes = 20000;
    double grading = 2.0;
    double a0_tol = 1e-2;

    std::string datum = "indicator:0:1";
    std::string bc = "dirichlet";          // evolve: dirichlet | neumann
    std::vector<double> times;             // evolve / fundsol / decay
    std::vector<double> p_values{2.0};     // decay (inf allowed)
    double eval_x_max = 20.0;              // evolve / fundsol lattice extent
    std::size_t eval_nx = 401;

    std::string out;                        // single-artifact subcommands
    std::string out_dir = "out";            // verify artifact directory
};

// Parses argv-style arguments (without the program name). Throws UsageError
// with a specific diagnostic on any invalid flag, config key or value.
RunConfig parse_config(const std::vector<std::string>& args);

// Parse "kind:a:b" or "csv:path" datum specifications.
InitialDatum make_datum(const std::string& spec);

// Executes the configured pipeline; returns the process exit status
// (0 = all requested checks passed, 1 = a verification failed).
// Numerical failures propagate as exceptions for main() to map to exit 1.
int run(const RunConfig& config);

}  // namespace fracdecay
