#pragma once

#include "peit/model.hpp"

#include <vector>

namespace peit
{

/// dvec(rho)/dt = L vec(rho) with column-stacked vec and the convention
/// d rho/dt = i[rho, H] + dissipator. Projector decay adds -1/2 {gamma |a><a|, rho};
/// Lindblad decay adds the a->b and a->c emission dissipators.
Mat9 liouvillian(Mat3 const& h, DecaySpec const& decay);

struct DensityTrajectory
{
    std::vector<double> times;
    /// For projector decay each sample is rho / tr(rho); otherwise the raw state.
    std::vector<DensityMatrix> states;
    /// Raw trace at each sample, before any normalization of that sample.
    std::vector<double> traces;
    /// Traces just before each per-cycle renormalization (projector decay only).
    std::vector<double> renorm_log;
    double realized_end = 0.0;
};

/// One cycle of superoperator propagators, split into equal sub-steps.
/// Built once per (schedule, params) and immutable afterwards.
class MasterPropagator
{
public:
    MasterPropagator(ModulationSchedule const& schedule, SystemParams const& params,
                     int samples_per_cycle);

    double period() const { return period_; }
    int samples_per_cycle() const { return static_cast<int>(steps_.size()); }
    Mat9 const& step(int j) const { return steps_[static_cast<std::size_t>(j)]; }
    /// Product of all sub-steps.
    Mat9 cycle() const;

private:
    double period_;
    std::vector<Mat9> steps_;
};

/// Piecewise-exact master-equation evolution over whole cycles (t_end is
/// truncated to the last complete cycle). With projector decay and
/// renorm_per_cycle, rho is divided by its trace at each cycle boundary.
/// Throws std::domain_error if a pre-normalization trace drops below 1e-12.
DensityTrajectory evolve_master(DensityMatrix const& initial, ModulationSchedule const& schedule,
                                SystemParams const& params, double t_end, bool renorm_per_cycle = true,
                                int samples_per_cycle = 1);

}  // namespace peit
