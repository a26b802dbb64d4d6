#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "chemovir/experiments.hpp"

namespace chemovir {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputOptions {
    std::string directory = "out";
    bool svg = true;        // emit line plots of the monitored norms
    bool snapshots = false; // emit field snapshots at sample times
};

struct SweepOptions {
    std::vector<double> alpha_values;
    std::vector<double> kappa_values;
    std::vector<std::uint64_t> seeds{1};
    bool estimate_critical = false;
    double bracket_lo = 0.5;
    double bracket_hi = 1.5;
    int iterations = 4;
};

/// One parsed configuration file: sectioned key = value text with
/// sections [model], [grid], [stepper], [initial], [diagnostics],
/// [output] and, for sweeps, [sweep]. Unknown sections or keys are
/// rejected by name.
struct RunConfig {
    RunSetup setup;
    OutputOptions output;
    std::optional<SweepOptions> sweep;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(std::istream& in, const std::string& origin);

/// Full round-trippable echo: every section and key written out with
/// shortest-exact number formatting, so re-parsing reproduces the exact
/// configuration.
std::string serialize_run_config(const RunConfig& config);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

std::string to_string(SystemKind k);
std::string to_string(ConversionKind k);
std::string to_string(Geometry g);
std::string to_string(Scheme s);
std::string to_string(InitialFamily f);

}  // namespace chemovir
