#pragma once
// Batch experiment runner behind the zakdd binary: JSON config ingestion,
// seeded deterministic execution, CSV/JSON emission.

#include <string>
#include <vector>

namespace zakdd {

// Full command-line entry point (subcommands run / validate / demo).
int cli_main(int argc, char** argv);

// Canned config for `zakdd demo <experiment>`; throws on unknown name.
std::string demo_config(const std::string& experiment);

// Dry-run validation; returns report lines (warnings and errors), empty when
// the config is fully compliant. Parse failures are reported as lines too.
std::vector<std::string> validate_config_text(const std::string& text);

// Parses and runs one experiment config, writing its output files.
// threads <= 0 means single-threaded.
void run_config_text(const std::string& text, int threads);

}  // namespace zakdd
