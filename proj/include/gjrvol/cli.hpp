#pragma once

#include "gjrvol/gjr.hpp"
#include "gjrvol/mle.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gjrvol::cli {

enum class Command { Describe, Fit, Check, Simulate, Survival, Region };

/// Bad flags, missing required flags, unknown names. Maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// --help was given; what() holds the help text. Maps to exit code 0.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Command command = Command::Describe;
    std::string input;
    std::string output;      // empty: standard output
    std::string table_path;  // fit only: human-readable table

    // input format
    std::string date_column = "Date";
    std::string close_column = "Close";
    std::string returns_column;  // read returns directly instead of prices
    char delimiter = ',';
    std::vector<std::size_t> lb_lags{5, 10, 20};

    // model
    mle::ModelSpec spec;
    gjr::ConstraintRegime regime;
    gjr::VarianceInit::Kind init = gjr::VarianceInit::Kind::SampleVariance;
    mle::FitOptions fit;

    // check
    std::optional<gjr::GjrParams> params;
    std::string params_path;

    // simulation
    std::string preset;
    std::size_t length = 1000;
    std::size_t burn_in = 0;
    std::size_t paths = 100;
    std::vector<std::size_t> tgrid{100, 500, 1000, 5000, 20000};
    std::uint64_t seed = 42;
    unsigned threads = 1;

    // region
    gjr::RegionGrid grid;
    gjr::RegionConstraints region;
    bool admissible_only = false;
};

/// Parses argv (argv[0] is the program name). Flags override values read
/// from a TOML file given by --config. Throws UsageError or HelpRequested.
RunConfig parse_args(const std::vector<std::string>& argv);

/// Executes a validated configuration, writing artifacts atomically.
/// Returns 0; library errors propagate as gjrvol::Error.
int run(const RunConfig& config, std::ostream& out);

/// parse_args + run with the exit-code mapping 0 / 1 (computation) /
/// 2 (usage); diagnostics go to `err` as a single line.
int main_entry(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

/// Writes `content` to `path` through a temporary file and rename, so a
/// failure never leaves a partial file behind.
void write_atomically(const std::string& path, const std::string& content);

}  // namespace gjrvol::cli
