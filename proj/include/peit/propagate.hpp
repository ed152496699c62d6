#pragma once

#include "peit/model.hpp"

#include <cstdint>
#include <vector>

namespace peit
{

struct Trajectory
{
    std::vector<double> times;
    std::vector<PureState> states;
    ModulationSchedule schedule;
    SystemParams params;
    /// Last complete cycle boundary <= the requested end time.
    double realized_end = 0.0;
};

/// exp(-i tau/2 H2) exp(-i tau/2 H1) for a modulated schedule.
Mat3 cycle_unitary(ModulationSchedule const& schedule, SystemParams const& params);

/// Exact propagators for the k equal sub-steps of one cycle. Sub-steps that
/// straddle the half-cycle switch are split at the switch. For the standard
/// schedule the "cycle" is standard_reference_period.
std::vector<Mat3> substep_unitaries(ModulationSchedule const& schedule, SystemParams const& params,
                                    int samples_per_cycle);

/// Piecewise-exact evolution. samples_per_cycle = 1 samples at cycle
/// boundaries only; t_end is truncated to the last complete cycle.
Trajectory evolve_pure(PureState const& initial, ModulationSchedule const& schedule,
                       SystemParams const& params, double t_end, int samples_per_cycle = 1);

/// Three-term BCH effective Hamiltonian of a two-segment cycle:
/// (H1+H2)/2 - (i tau/8)[H2,H1] - (tau^2/96)[H2-H1,[H2,H1]].
Mat3 effective_hamiltonian(Mat3 const& h1, Mat3 const& h2, double tau);

/// State after n cycles of exp(-i tau H_eff), from one eigendecomposition.
PureState evolve_eff(PureState const& initial, Mat3 const& h_eff, double tau, std::int64_t n);

/// |<reference|state>|^2
double fidelity(PureState const& reference, PureState const& state);

}  // namespace peit
