#pragma once

// Command-line front end. Configuration comes from an optional key-value file
// with [SystemParams], [ModulationSchedule], [DecaySpec] and [RunConfig]
// sections; command-line flags are applied afterwards through the same setter.

#include "peit/model.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace peit::cli
{

struct InitialState
{
    enum class Kind
    {
        Dark,       // dark state of the run's SystemParams
        Mixed,      // diag(0, p_bb, p_cc)
        Amplitudes  // explicit (a, b, c) amplitudes, normalized on use
    };

    Kind kind = Kind::Dark;
    double p_bb = 0.0;
    double p_cc = 0.0;
    std::array<Complex, 3> amps{};

    /// "dark", "mixed:<p_bb>,<p_cc>" or "amps:<re_a>,<im_a>,<re_b>,<im_b>,<re_c>,<im_c>".
    std::string to_string() const;
    static InitialState parse(std::string_view text);

    bool is_pure() const { return kind != Kind::Mixed; }
    PureState pure(SystemParams const& params) const;
    DensityMatrix density(SystemParams const& params) const;

    friend bool operator==(InitialState const&, InitialState const&) = default;
};

enum class OutputFormat
{
    Csv,
    Json
};

struct RunConfig
{
    ModulationSchedule schedule{};
    SystemParams params{};  // includes the DecaySpec
    InitialState init{};
    double t_end = 30.0;
    int samples_per_cycle = 1;
    std::string out;  // empty: standard output
    OutputFormat format = OutputFormat::Csv;
    int jobs = 0;  // 0 = all available threads

    /// Checks the full (params, schedule, decay, initial state) tuple.
    void validate() const;

    friend bool operator==(RunConfig const&, RunConfig const&) = default;
};

/// The single entry point for both config-file keys and flags.
void set_key(RunConfig& cfg, std::string_view section, std::string_view key, std::string_view value);

/// Every field, one key per line; parse_config(to_config(c)) == c.
std::string to_config(RunConfig const& cfg);
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(std::filesystem::path const& path, RunConfig base = {});

struct CheckResult
{
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Fast invariant checks across all modules.
std::vector<CheckResult> run_selftest();

/// Parses argv and runs one subcommand. Errors print one line
/// "error: <kind>: <message>" on err and return a nonzero status.
int dispatch(int argc, char const* const* argv, std::ostream& out, std::ostream& err);

}  // namespace peit::cli
