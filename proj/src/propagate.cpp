#include "peit/propagate.hpp"

#include <cmath>
#include <stdexcept>

namespace peit
{

Mat3 cycle_unitary(ModulationSchedule const& schedule, SystemParams const& params)
{
    schedule.validate();
    if (!schedule.modulated()) {
        throw std::invalid_argument("cycle_unitary: the standard schedule has no cycle structure");
    }
    auto const [h1, h2] = half_cycle_hamiltonians(schedule, params);
    double const half = schedule.tau / 2.0;
    return expm_hermitian(h2, half) * expm_hermitian(h1, half);
}

std::vector<Mat3> substep_unitaries(ModulationSchedule const& schedule, SystemParams const& params,
                                    int samples_per_cycle)
{
    schedule.validate();
    if (samples_per_cycle < 1) {
        throw std::invalid_argument("samples_per_cycle must be at least 1");
    }
    auto const [h1, h2] = half_cycle_hamiltonians(schedule, params);
    double const period = schedule.period();
    int const k = samples_per_cycle;

    std::vector<Mat3> steps;
    steps.reserve(static_cast<std::size_t>(k));
    auto const e1 = hermitian_eig(h1);
    auto const e2 = hermitian_eig(h2);
    auto propagate = [](Eigensystem<3> const& es, double dt) {
        return apply_spectral(es, [dt](double lambda) { return std::exp(Complex{0.0, -lambda * dt}); });
    };

    for (int j = 0; j < k; ++j) {
        double const a = period * j / k;
        double const b = period * (j + 1) / k;
        double const mid = period / 2.0;
        // Compare in integer units of period/(2k) so the switch point is exact.
        if (2 * (j + 1) <= k) {
            steps.push_back(propagate(e1, b - a));
        } else if (2 * j >= k) {
            steps.push_back(propagate(e2, b - a));
        } else {
            steps.push_back(propagate(e2, b - mid) * propagate(e1, mid - a));
        }
    }
    return steps;
}

Trajectory evolve_pure(PureState const& initial, ModulationSchedule const& schedule,
                       SystemParams const& params, double t_end, int samples_per_cycle)
{
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw std::invalid_argument("evolve_pure: t_end must be positive");
    }
    auto const steps = substep_unitaries(schedule, params, samples_per_cycle);
    double const period = schedule.period();
    auto const cycles = static_cast<std::int64_t>(std::floor(t_end / period + 1e-9));
    int const k = samples_per_cycle;

    Trajectory traj{{}, {}, schedule, params, period * static_cast<double>(cycles)};
    traj.times.reserve(static_cast<std::size_t>(cycles * k + 1));
    traj.states.reserve(static_cast<std::size_t>(cycles * k + 1));

    PureState psi = initial;
    traj.times.push_back(0.0);
    traj.states.push_back(psi);
    for (std::int64_t n = 0; n < cycles; ++n) {
        for (int j = 0; j < k; ++j) {
            psi = apply_unitary(steps[static_cast<std::size_t>(j)], psi);
            traj.times.push_back(period * static_cast<double>(n * k + j + 1) / k);
            traj.states.push_back(psi);
        }
    }
    return traj;
}

Mat3 effective_hamiltonian(Mat3 const& h1, Mat3 const& h2, double tau)
{
    require_hermitian(h1, "effective_hamiltonian");
    require_hermitian(h2, "effective_hamiltonian");
    if (!(tau >= 0.0)) {
        throw std::invalid_argument("effective_hamiltonian: tau must be non-negative");
    }
    Mat3 const c = commutator(h2, h1);
    return Complex{0.5} * (h1 + h2) - Complex{0.0, tau / 8.0} * c
           - Complex{tau * tau / 96.0} * commutator(Mat3(h2 - h1), c);
}

PureState evolve_eff(PureState const& initial, Mat3 const& h_eff, double tau, std::int64_t n)
{
    if (n < 0) {
        throw std::invalid_argument("evolve_eff: cycle count must be non-negative");
    }
    if (n == 0) {
        return initial;
    }
    auto const es = hermitian_eig(h_eff);
    double const t = tau * static_cast<double>(n);
    Mat3 const u =
        apply_spectral(es, [t](double lambda) { return std::exp(Complex{0.0, -lambda * t}); });
    return apply_unitary(u, initial);
}

double fidelity(PureState const& reference, PureState const& state)
{
    return std::norm(inner(reference.amplitudes(), state.amplitudes()));
}

}  // namespace peit
