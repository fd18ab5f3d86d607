#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "nirdehaze/coloring.hpp"
#include "nirdehaze/haze_model.hpp"
#include "nirdehaze/metrics.hpp"
#include "nirdehaze/solver.hpp"

namespace nirdehaze::cli {

enum class Command { Dehaze, Colorize, Synthesize, Evaluate };

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

struct RunConfig {
    Command command = Command::Dehaze;

    std::filesystem::path visible;
    std::filesystem::path nir;
    std::filesystem::path mask;
    std::filesystem::path depth;
    std::filesystem::path clean;
    std::filesystem::path test;
    std::filesystem::path colored_nir;  // optional replacement for the colorize step
    std::filesystem::path output;
    std::optional<std::filesystem::path> diagnostics_dir;

    ColoringConfig coloring;
    DarkChannelConfig dark;
    SolverConfig solver;

    Airlight airlight{0.9, 0.9, 0.9};
    double eta = 1.0;
    double max_depth = 4.0;  // depth PNG full scale
    int bit_depth = 8;       // of written images

    /// Throws std::invalid_argument when a path or value required by `command` is missing or invalid.
    void validate() const;
};

struct ParseResult {
    std::optional<RunConfig> config;  // empty when the process should exit with `exit_code`
    int exit_code = kExitOk;
};

/**
 * Parses `nirdehaze <command> [options]`. A `--config FILE` of `key = value`
 * lines supplies defaults; flags given on the command line take precedence.
 */
ParseResult parse_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Applies `key = value` lines to `cfg`. Unknown keys or malformed values throw std::invalid_argument.
void apply_config_text(const std::string& text, RunConfig& cfg);

/// Executes one command. Files written before a failure are removed.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// One `key = value` line per field, values with 6 significant digits.
std::string format_report(const MetricReport& report);

RegularizerMode parse_mode(const std::string& text);

int main_entry(int argc, const char* const* argv);

}  // namespace nirdehaze::cli
