#include "peit/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace peit
{

TimeSeries::TimeSeries(std::vector<double> times, std::vector<double> values, std::string label)
    : times_(std::move(times)), values_(std::move(values)), label_(std::move(label))
{
    if (times_.size() != values_.size()) {
        throw std::invalid_argument("time series: times and values differ in length");
    }
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1])) {
            throw std::invalid_argument("time series: times must be strictly increasing");
        }
    }
}

TimeSeries TimeSeries::stroboscopic(double period) const
{
    if (!(period > 0.0)) {
        throw std::invalid_argument("stroboscopic: period must be positive");
    }
    std::vector<double> t;
    std::vector<double> v;
    for (std::size_t i = 0; i < times_.size(); ++i) {
        double const cycles = times_[i] / period;
        if (std::abs(cycles - std::round(cycles)) <= 1e-6) {
            t.push_back(times_[i]);
            v.push_back(values_[i]);
        }
    }
    return TimeSeries(std::move(t), std::move(v), label_);
}

double absorption_of(DensityMatrix const& rho)
{
    return rho(level_a, level_b).imag();
}

double absorption_of(PureState const& psi)
{
    return (psi[level_a] * std::conj(psi[level_b])).imag();
}

TimeSeries fidelity_series(Trajectory const& traj, PureState const& reference)
{
    std::vector<double> v;
    v.reserve(traj.states.size());
    for (auto const& s : traj.states) v.push_back(fidelity(reference, s));
    return TimeSeries(traj.times, std::move(v), "fidelity");
}

TimeSeries absorption_series(Trajectory const& traj)
{
    std::vector<double> v;
    v.reserve(traj.states.size());
    for (auto const& s : traj.states) v.push_back(absorption_of(s));
    return TimeSeries(traj.times, std::move(v), "absorption");
}

TimeSeries absorption_series(DensityTrajectory const& traj)
{
    std::vector<double> v;
    v.reserve(traj.states.size());
    for (auto const& s : traj.states) v.push_back(absorption_of(s));
    return TimeSeries(traj.times, std::move(v), "absorption");
}

TimeSeries fidelity_series(DensityTrajectory const& traj, PureState const& reference)
{
    auto const& psi = reference.amplitudes();
    std::vector<double> v;
    v.reserve(traj.states.size());
    for (auto const& s : traj.states) v.push_back(inner(psi, s.matrix() * psi).real());
    return TimeSeries(traj.times, std::move(v), "fidelity");
}

OscillationStats oscillation_stats(TimeSeries const& series, TimeWindow window)
{
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    auto const& t = series.times();
    auto const& v = series.values();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < window.begin || t[i] > window.end) continue;
        lo = count == 0 ? v[i] : std::min(lo, v[i]);
        hi = count == 0 ? v[i] : std::max(hi, v[i]);
        ++count;
    }
    if (count < 8) {
        throw std::invalid_argument("oscillation_stats: fewer than 8 samples in window");
    }
    return {(hi - lo) / 2.0, (hi + lo) / 2.0, window};
}

Plateau plateau_value(TimeSeries const& series, double t_probe)
{
    auto const& t = series.times();
    auto const& v = series.values();
    if (t.empty() || t_probe < t.front() || t_probe > t.back() + 1e-9 * std::abs(t.back())) {
        throw std::invalid_argument("plateau_value: probe time outside the series range");
    }
    auto const it = std::lower_bound(t.begin(), t.end(), t_probe);
    std::size_t idx = static_cast<std::size_t>(it - t.begin());
    if (idx == t.size() || (idx > 0 && t_probe - t[idx - 1] <= t[idx] - t_probe)) {
        --idx;
    }

    double const lo = 0.9 * t_probe;
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < lo - 1e-12 || t[i] > t_probe + 1e-12) continue;
        sum += v[i];
        sum_sq += v[i] * v[i];
        ++n;
    }
    double flatness = 0.0;
    if (n > 1) {
        double const mean = sum / double(n);
        flatness = std::sqrt(std::max(0.0, sum_sq / double(n) - mean * mean));
    }
    return {v[idx], flatness};
}

double series_correlation(TimeSeries const& x, TimeSeries const& y)
{
    if (x.times() != y.times()) {
        throw std::invalid_argument("series_correlation: time grids differ");
    }
    auto const& a = x.values();
    auto const& b = y.values();
    double const n = double(a.size());
    if (a.size() < 2) {
        throw std::invalid_argument("series_correlation: need at least two samples");
    }
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) {
        throw std::invalid_argument("series_correlation: zero variance");
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

QdiAmplitudes qdi_phase_estimate(SystemParams const& params, double tau)
{
    if (!(params.omega_c > 0.0) || !(params.omega_p > 0.0)) {
        throw std::invalid_argument("qdi_phase_estimate needs both Rabi frequencies positive");
    }
    Complex const pref{0.0, 1.0 / std::numbers::sqrt2};
    double const first = std::sin(std::numbers::pi + tau * params.omega_c / 4.0);
    double const second = first * std::cos(tau * params.omega_p / 4.0) + std::sin(tau * params.omega_p / 4.0);
    return {pref * first, pref * second};
}

double window_full_width(std::vector<double> const& x, std::vector<double> const& y)
{
    if (x.size() != y.size() || x.size() < 3) {
        throw std::invalid_argument("window_full_width: need matching grids of at least 3 points");
    }
    std::size_t c = 0;
    for (std::size_t i = 1; i < x.size(); ++i)
        if (std::abs(x[i]) < std::abs(x[c])) c = i;

    auto crossing = [&](int step) {
        auto const n = static_cast<long>(x.size());
        long i = static_cast<long>(c);
        while (i + step >= 0 && i + step < n && y[static_cast<std::size_t>(i + step)] >= y[static_cast<std::size_t>(i)])
            i += step;
        double const shoulder = y[static_cast<std::size_t>(i)];
        double const level = (shoulder + y[c]) / 2.0;
        if (!(shoulder > y[c])) {
            throw std::domain_error("window_full_width: no dip around the centre");
        }
        for (long j = static_cast<long>(c); j != i; j += step) {
            auto const p = static_cast<std::size_t>(j);
            auto const q = static_cast<std::size_t>(j + step);
            if (y[p] < level && y[q] >= level) {
                double const f = (level - y[p]) / (y[q] - y[p]);
                return x[p] + f * (x[q] - x[p]);
            }
        }
        throw std::domain_error("window_full_width: half-depth crossing not found");
    };
    return crossing(+1) - crossing(-1);
}

}  // namespace peit
