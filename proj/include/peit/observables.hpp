#pragma once

#include "peit/open_system.hpp"
#include "peit/propagate.hpp"

#include <string>
#include <vector>

namespace peit
{

/// Sampled real observable; times strictly increasing.
class TimeSeries
{
public:
    TimeSeries(std::vector<double> times, std::vector<double> values, std::string label = {});

    std::vector<double> const& times() const { return times_; }
    std::vector<double> const& values() const { return values_; }
    std::string const& label() const { return label_; }
    std::size_t size() const { return times_.size(); }

    /// Samples whose time is an integer multiple of period (to 1e-6 relative).
    TimeSeries stroboscopic(double period) const;

private:
    std::vector<double> times_;
    std::vector<double> values_;
    std::string label_;
};

struct TimeWindow
{
    double begin = 0.0;
    double end = 0.0;
};

struct OscillationStats
{
    double amplitude = 0.0;  // (max - min) / 2
    double center = 0.0;     // (max + min) / 2
    TimeWindow window;
};

struct Plateau
{
    double value = 0.0;
    /// Standard deviation over [0.9 t_probe, t_probe]; zero for a flat series.
    double flatness = 0.0;
};

/// Im(rho_ab).
double absorption_of(DensityMatrix const& rho);
/// Im(c_a conj(c_b)), the absorption of |psi><psi|.
double absorption_of(PureState const& psi);

TimeSeries fidelity_series(Trajectory const& traj, PureState const& reference);
TimeSeries absorption_series(Trajectory const& traj);
TimeSeries absorption_series(DensityTrajectory const& traj);
/// <psi|rho|psi>, equal to |<psi|phi>|^2 for rho = |phi><phi|.
TimeSeries fidelity_series(DensityTrajectory const& traj, PureState const& reference);

/// Direct min/max over samples in the window. Rejects windows with fewer than 8 samples.
OscillationStats oscillation_stats(TimeSeries const& series, TimeWindow window);

/// Value at the sample nearest t_probe plus the flatness diagnostic.
Plateau plateau_value(TimeSeries const& series, double t_probe);

/// Pearson correlation on identical time grids.
double series_correlation(TimeSeries const& x, TimeSeries const& y);

struct QdiAmplitudes
{
    Complex amp_half;  // |a> amplitude after the first half-cycle
    Complex amp_full;  // |a> amplitude after the full cycle
};

/// Two-level estimate of the excited-state amplitude at the half and full
/// cycle for double modulation from (|b> - |c>)/sqrt(2):
///   amp_half = (i/sqrt2) sin(pi + tau omega_c / 4)
///   amp_full = (i/sqrt2) [sin(pi + tau omega_c / 4) cos(tau omega_p / 4) + sin(tau omega_p / 4)]
QdiAmplitudes qdi_phase_estimate(SystemParams const& params, double tau);

/// Full width of a dip centred near x = 0 at half its depth. The reference
/// level is the first local maximum found walking outward on each side.
/// Crossings are linearly interpolated. Throws if no crossing exists.
double window_full_width(std::vector<double> const& x, std::vector<double> const& y);

}  // namespace peit
