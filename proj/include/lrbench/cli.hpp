#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "lrbench/scoring.hpp"

namespace lrbench::cli {

enum class OutputFormat { Json, Csv, Both };

struct CliCommand {
    std::string command;      // rank, illcond, csprior, tailbound, demand, calibrate, oracle-check
    std::string config_path;  // empty = built-in default experiment
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    OutputFormat format = OutputFormat::Both;
    std::optional<std::size_t> cases;
    std::optional<scoring::ScoringRule> rule;
    std::optional<std::size_t> paths;  // oracle paths per term
    bool force = false;               // overwrite existing output files
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;      // a Violated verdict or a failed check
inline constexpr int kExitConfig = 2;      // usage or configuration error
inline constexpr int kExitExists = 3;      // would overwrite existing output
inline constexpr int kExitEvaluation = 4;  // evaluator error

int run(const CliCommand& cmd, std::ostream& out, std::ostream& err);

// "path:line: error: message" for a config error, locating the offending key or
// parse position in the config text when possible.
std::string locate_config_error(const std::string& path, const std::string& text,
                                const std::string& message);

}  // namespace lrbench::cli
