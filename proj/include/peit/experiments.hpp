#pragma once

// Figure pipelines and parameter sweeps. Every grid point is evaluated
// independently; results are merged in grid order, so output does not depend
// on the number of worker threads.

#include "peit/model.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace peit
{

/// Raised when an output file or directory cannot be written.
class io_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class FigureId
{
    Fig2,
    Fig3,
    Fig4Te,
    Fig4Am,
    Fig5,
    Fig6,
    Fig7,
    Fig8
};

std::string_view to_string(FigureId id);
FigureId parse_figure_id(std::string_view text);
std::vector<FigureId> all_figures();

/// One CSV file: header row plus numeric rows.
struct Table
{
    std::string name;  // file stem
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// 12 significant digits, ',' delimiter, LF line endings.
std::string to_csv(Table const& table);
void write_csv(std::filesystem::path const& path, Table const& table);

struct ExperimentSpec
{
    FigureId figure = FigureId::Fig2;
    /// Keys: tau (replaces the figure's tau list), omega_c, omega_p, delta,
    /// decay, t_end. Values are parsed and type-checked on use.
    std::map<std::string, std::string> overrides;
    std::filesystem::path output_dir = ".";
    int jobs = 0;  // 0 = all available threads
    bool svg = false;

    void validate() const;
};

/// Tables of a figure without touching the filesystem.
std::vector<Table> compute_figure(ExperimentSpec const& spec);

/// Writes compute_figure() as CSV (plus SVG when requested); returns the paths written.
std::vector<std::filesystem::path> reproduce_figure(ExperimentSpec const& spec);

enum class SweepAxis
{
    Tau,
    Delta
};

enum class SweepObservable
{
    Envelope,  // analytic absorption envelope at (tau, delta)
    Plateau,   // absorption plateau of the master equation at the probe time
    OscStats   // stroboscopic fidelity amplitude and centre over [0, probe]
};

std::string_view to_string(SweepAxis axis);
std::string_view to_string(SweepObservable observable);
SweepAxis parse_sweep_axis(std::string_view text);
SweepObservable parse_sweep_observable(std::string_view text);

struct SweepRequest
{
    ModulationSchedule schedule;
    SystemParams params;
    SweepAxis axis = SweepAxis::Delta;
    std::vector<double> grid;
    SweepObservable observable = SweepObservable::Envelope;
    double probe = 80.0;
    /// Initial state for Plateau; defaults to the dark state of params.
    std::optional<DensityMatrix> initial;

    /// Non-empty, finite, strictly monotone grid; positive probe time.
    void validate() const;
};

struct SweepResult
{
    std::string axis_name;
    std::vector<double> axis;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> values;  // one row per grid point
    std::map<std::string, std::string> metadata;

    /// axis column followed by all observable columns.
    Table to_table(std::string name) const;
    /// axis column followed by one observable column renamed to "value".
    Table to_table(std::string name, std::size_t column) const;
};

/// OpenMP evaluation over at most `jobs` threads (0 = all available).
SweepResult sweep(SweepRequest const& request, int jobs = 0);

/// Single-threaded reference; identical results to sweep().
SweepResult sweep_serial(SweepRequest const& request);

/// Evenly spaced points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace peit
