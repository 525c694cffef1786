#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nlll/channels.hpp"

namespace nlll::cli {

enum class Format { Csv, Json };

struct OmegaGrid {
    enum class Spacing {
        Linear, // absolute omega from min to max
        Log,    // |domega| log-spaced from min to max, on both sides of threshold
    };
    double min = 0.0;
    double max = 0.0;
    int count = 0;
    Spacing spacing = Spacing::Linear;
};

/// Everything a run needs. Every field has a default, so "{}" is a valid
/// config file.
struct RunConfig {
    LuttingerParams params;
    ChannelSpec channel{ChannelKind::FermionParticle};
    std::vector<double> k_list{0.1};
    std::optional<OmegaGrid> omega_grid;
    std::int64_t qmax = 2000;
    int bins_per_decade = 64;
    int enumeration_cap = 40;
    std::string out_path; // empty: standard output
    Format format = Format::Csv;
    std::uint64_t seed = 0;

    /// Throws ConfigError.
    void validate() const;
};

/// Invalid user input: bad JSON, unknown keys, out-of-range values.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses a JSON config document. Unknown keys are rejected so that typos do
/// not silently fall back to defaults.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::string& path);

/// "FermionParticle", ..., with a trailing '-' selecting omega < 0 for the
/// boson channels ("BosonParticle-").
ChannelSpec parse_channel(std::string_view name);

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kDegenerate = 3,
    kNumericFailure = 4,
};

/// Full command line entry point. Tables go to `out` (or the --out file),
/// diagnostics to `err`. Returns one of ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace nlll::cli
