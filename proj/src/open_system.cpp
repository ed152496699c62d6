#include "peit/open_system.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace peit
{

Mat9 liouvillian(Mat3 const& h, DecaySpec const& decay)
{
    require_hermitian(h, "liouvillian");
    decay.validate();
    Mat3 const id = Mat3::identity();

    // vec(A X B) = (B^T kron A) vec(X)
    Mat9 l = Complex{0.0, 1.0} * (kron(h.transpose(), id) - kron(id, h));

    Mat3 const p_aa = Mat3::unit(level_a, level_a);
    switch (decay.kind) {
    case DecaySpec::Kind::None:
        break;
    case DecaySpec::Kind::Projector: {
        Mat3 const g = Complex{decay.gamma} * p_aa;
        l -= Complex{0.5} * (kron(id, g) + kron(g.transpose(), id));
        break;
    }
    case DecaySpec::Kind::Lindblad: {
        auto add_emission = [&](double rate, std::size_t target) {
            Mat3 const lower = Mat3::unit(target, level_a);  // sigma_{target,a}
            Mat3 const raise = lower.adjoint();
            l += Complex{rate} * kron(raise.transpose(), lower);
            l -= Complex{rate / 2.0} * (kron(id, p_aa) + kron(p_aa.transpose(), id));
        };
        add_emission(decay.gamma_ab, level_b);
        add_emission(decay.gamma_ac, level_c);
        break;
    }
    }
    return l;
}

MasterPropagator::MasterPropagator(ModulationSchedule const& schedule, SystemParams const& params,
                                   int samples_per_cycle)
    : period_(schedule.period())
{
    schedule.validate();
    if (samples_per_cycle < 1) {
        throw std::invalid_argument("samples_per_cycle must be at least 1");
    }
    auto const [h1, h2] = half_cycle_hamiltonians(schedule, params);
    Mat9 const l1 = liouvillian(h1, params.decay);
    Mat9 const l2 = liouvillian(h2, params.decay);
    int const k = samples_per_cycle;
    double const mid = period_ / 2.0;

    steps_.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        double const a = period_ * j / k;
        double const b = period_ * (j + 1) / k;
        if (2 * (j + 1) <= k) {
            steps_.push_back(expm_general(l1 * Complex{b - a}));
        } else if (2 * j >= k) {
            steps_.push_back(expm_general(l2 * Complex{b - a}));
        } else {
            steps_.push_back(expm_general(l2 * Complex{b - mid}) * expm_general(l1 * Complex{mid - a}));
        }
    }
}

Mat9 MasterPropagator::cycle() const
{
    Mat9 p = Mat9::identity();
    for (auto const& s : steps_) p = s * p;
    return p;
}

DensityTrajectory evolve_master(DensityMatrix const& initial, ModulationSchedule const& schedule,
                                SystemParams const& params, double t_end, bool renorm_per_cycle,
                                int samples_per_cycle)
{
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw std::invalid_argument("evolve_master: t_end must be positive");
    }
    MasterPropagator const prop(schedule, params, samples_per_cycle);
    double const period = prop.period();
    int const k = samples_per_cycle;
    auto const cycles = static_cast<std::int64_t>(std::floor(t_end / period + 1e-9));
    bool const lossy = !params.decay.trace_preserving();
    bool const renormalize = lossy && renorm_per_cycle;

    DensityTrajectory out;
    out.realized_end = period * static_cast<double>(cycles);
    auto const total = static_cast<std::size_t>(cycles * k + 1);
    out.times.reserve(total);
    out.states.reserve(total);
    out.traces.reserve(total);

    auto record = [&](double t, Mat3 const& rho) {
        double const tr = rho.trace().real();
        if (!(tr >= 1e-12)) {
            throw std::domain_error("evolve_master: trace fell to " + std::to_string(tr) + " at t="
                                    + std::to_string(t) + " (overdamped)");
        }
        out.times.push_back(t);
        out.traces.push_back(tr);
        out.states.emplace_back(lossy ? rho * Complex{1.0 / tr} : rho);
    };

    Vec9 v = vectorize(initial.matrix());
    record(0.0, initial.matrix());
    for (std::int64_t n = 0; n < cycles; ++n) {
        for (int j = 0; j < k; ++j) {
            v = prop.step(j) * v;
            Mat3 rho = unvectorize<3>(v);
            double const t = period * static_cast<double>(n * k + j + 1) / k;
            if (j + 1 < k) {
                record(t, rho);
                continue;
            }
            rho = Complex{0.5} * (rho + rho.adjoint());
            record(t, rho);
            if (renormalize) {
                double const tr = rho.trace().real();
                out.renorm_log.push_back(tr);
                rho *= Complex{1.0 / tr};
            }
            v = vectorize(rho);
        }
    }
    return out;
}

}  // namespace peit
