#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "peit/analytic.hpp"
#include "peit/propagate.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace peit;

namespace
{

SystemParams const unit_params{1.0, 1.0, 0.0, {}};

double unitarity_defect(Mat3 const& u)
{
    return frobenius_norm(u.adjoint() * u - Mat3::identity());
}

// Classical RK4 on i d psi/dt = H(t) psi with fixed step; independent of the
// eigensolver route. The step divides each half-cycle exactly.
Vec3 rk4_cycle(Mat3 const& h1, Mat3 const& h2, double tau, Vec3 psi, int steps_per_half)
{
    auto rhs = [](Mat3 const& h, Vec3 const& v) { return Complex{0.0, -1.0} * (h * v); };
    double const dt = tau / 2.0 / steps_per_half;
    for (Mat3 const* h : {&h1, &h2}) {
        for (int s = 0; s < steps_per_half; ++s) {
            Vec3 const k1 = rhs(*h, psi);
            Vec3 const k2 = rhs(*h, psi + Complex{dt / 2} * k1);
            Vec3 const k3 = rhs(*h, psi + Complex{dt / 2} * k2);
            Vec3 const k4 = rhs(*h, psi + Complex{dt} * k3);
            psi = psi + Complex{dt / 6} * (k1 + Complex{2.0} * k2 + Complex{2.0} * k3 + k4);
        }
    }
    return psi;
}

}  // namespace

TEST_CASE("cycle_unitary")
{
    ModulationSchedule tiny{Mode::DoubleMod, 1e-8};
    CHECK(frobenius_norm(cycle_unitary(tiny, unit_params) - Mat3::identity()) <= 1e-7);

    SystemParams no_probe{1.0, 0.0, 0.0, {}};
    ModulationSchedule dbl{Mode::DoubleMod, 0.7};
    auto const u = cycle_unitary(dbl, no_probe);
    auto const hc = build_hamiltonians(no_probe).coupling;
    CHECK(frobenius_norm(u - expm_hermitian(hc, 0.35)) < 1e-14);
    auto const b = u * Vec3::basis(level_b);
    CHECK(std::abs(b[level_b] - Complex{1.0}) < 1e-14);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> dist(0.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        SystemParams p{dist(rng) + 0.01, dist(rng), dist(rng) - 1.0, {}};
        ModulationSchedule s{i % 2 ? Mode::SingleMod : Mode::DoubleMod, dist(rng) + 0.01};
        CHECK(unitarity_defect(cycle_unitary(s, p)) <= 1e-12);
    }

    CHECK_THROWS_AS(cycle_unitary({Mode::Standard, 0.1}, unit_params), std::invalid_argument);
}

TEST_CASE("evolve_pure basics")
{
    auto const psi0 = dark_state(unit_params);
    ModulationSchedule s{Mode::DoubleMod, 0.1};

    auto const short_run = evolve_pure(psi0, s, unit_params, 0.05);
    REQUIRE(short_run.states.size() == 1);
    CHECK(fidelity(psi0, short_run.states[0]) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(short_run.realized_end == 0.0);

    // t_end truncated to the last complete cycle
    auto const run = evolve_pure(psi0, s, unit_params, 1.05, 4);
    CHECK(run.realized_end == doctest::Approx(1.0));
    CHECK(run.times.size() == 41);
    CHECK(run.times.back() == doctest::Approx(1.0));
    for (std::size_t i = 1; i < run.times.size(); ++i) CHECK(run.times[i] > run.times[i - 1]);

    CHECK_THROWS_AS(evolve_pure(psi0, s, unit_params, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(evolve_pure(psi0, s, unit_params, 1.0, 0), std::invalid_argument);
}

TEST_CASE("evolve_pure: norm conservation and stroboscopic consistency")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> dist(0.05, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        SystemParams p{dist(rng), dist(rng), dist(rng) - 0.75, {}};
        ModulationSchedule s{trial % 2 ? Mode::SingleMod : Mode::DoubleMod, dist(rng)};
        int const k = 1 + trial % 5;
        auto const psi0 = dark_state(p);
        auto const traj = evolve_pure(psi0, s, p, 30.0, k);
        for (auto const& st : traj.states) CHECK(std::abs(st.amplitudes().norm() - 1.0) <= 1e-9);

        auto const u = cycle_unitary(s, p);
        Vec3 v = psi0.amplitudes();
        for (std::size_t i = 0; i < traj.states.size(); i += static_cast<std::size_t>(k)) {
            CHECK((traj.states[i].amplitudes() - v).norm() <= 1e-11);
            v = u * v;
        }
    }
}

TEST_CASE("evolve_pure: intra-cycle samples match the piecewise Hamiltonian")
{
    // Odd sample count so one sub-step straddles the switch.
    auto const psi0 = dark_state(unit_params);
    ModulationSchedule s{Mode::SingleMod, 0.3};
    auto const traj = evolve_pure(psi0, s, unit_params, 0.6, 3);
    auto const [h1, h2] = half_cycle_hamiltonians(s, unit_params);
    // t = 0.2 is 0.15 under h1 then 0.05 under h2
    Mat3 const u = expm_hermitian(h2, 0.05) * expm_hermitian(h1, 0.15);
    CHECK(traj.times[2] == doctest::Approx(0.2));
    CHECK((traj.states[2].amplitudes() - u * psi0.amplitudes()).norm() < 1e-13);
}

TEST_CASE("evolve_pure against an RK4 oracle and the double-modulation closed form")
{
    double const tau = 0.1;
    ModulationSchedule s{Mode::DoubleMod, tau};
    auto const psi0 = dark_state(unit_params);
    auto const traj = evolve_pure(psi0, s, unit_params, 60.0);
    auto const [h1, h2] = half_cycle_hamiltonians(s, unit_params);

    Vec3 v = psi0.amplitudes();
    double worst_rk4 = 0.0;
    double worst_formula = 0.0;
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
        double const f_rk4 = std::norm(inner(psi0.amplitudes(), v));
        double const f_num = fidelity(psi0, traj.states[n]);
        worst_rk4 = std::max(worst_rk4, std::abs(f_num - f_rk4));
        worst_formula = std::max(worst_formula, std::abs(f_num - analytic::fidelity_double(traj.times[n], tau)));
        v = rk4_cycle(h1, h2, tau, v, 10);
    }
    CHECK(worst_rk4 < 1e-8);
    CHECK(worst_formula <= 1e-4);
}

TEST_CASE("evolve_pure: single-modulation fidelity minimum")
{
    // closed-form minimum (0.9 - 0.1)^2 = 0.64 near t = 4 pi / sqrt(5)
    auto const psi0 = dark_state(unit_params);
    auto const traj = evolve_pure(psi0, {Mode::SingleMod, 0.1}, unit_params, 2 * 4 * std::numbers::pi / std::sqrt(5.0));
    double fmin = 2.0;
    double tmin = 0.0;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        double const f = fidelity(psi0, traj.states[i]);
        if (f < fmin) {
            fmin = f;
            tmin = traj.times[i];
        }
    }
    CHECK(fmin == doctest::Approx(0.64).epsilon(1e-3));
    CHECK(tmin == doctest::Approx(4 * std::numbers::pi / std::sqrt(5.0)).epsilon(0.02));
}

TEST_CASE("evolve_pure: small-tau limits")
{
    auto const psi0 = dark_state(unit_params);
    auto const single = evolve_pure(psi0, {Mode::SingleMod, 0.01}, unit_params, 30.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < single.states.size(); ++i) {
        worst = std::max(worst, std::abs(fidelity(psi0, single.states[i]) - analytic::fidelity_single_limit(single.times[i])));
    }
    CHECK(worst <= 5e-3);

    auto const dbl = evolve_pure(psi0, {Mode::DoubleMod, 0.01}, unit_params, 100.0);
    double fmin = 1.0;
    for (auto const& st : dbl.states) fmin = std::min(fmin, fidelity(psi0, st));
    CHECK(fmin >= 0.9999);
}

TEST_CASE("effective_hamiltonian")
{
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    Mat3 h1;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) h1(i, j) = Complex{g(rng), g(rng)};
    h1 = Complex{0.5} * (h1 + h1.adjoint());
    Mat3 const h2 = Complex{2.0} * h1;
    for (double tau : {0.0, 0.1, 1.0, 5.0}) {
        CHECK(frobenius_norm(effective_hamiltonian(h1, h2, tau) - Complex{1.5} * h1) < 1e-14);
    }

    auto const [a, b] = half_cycle_hamiltonians({Mode::DoubleMod, 0.1}, unit_params);
    CHECK(effective_hamiltonian(a, b, 0.0) == Complex{0.5} * (a + b));
    CHECK(hermiticity_defect(effective_hamiltonian(a, b, 0.7)) <= 1e-12);

    // O(tau^4) residual in the single-modulation cycle: halving tau shrinks it ~16x.
    ModulationSchedule s1{Mode::SingleMod, 0.2};
    ModulationSchedule s2{Mode::SingleMod, 0.1};
    auto const [p1, p2] = half_cycle_hamiltonians(s1, unit_params);
    double const e1 = frobenius_norm(cycle_unitary(s1, unit_params) - expm_hermitian(effective_hamiltonian(p1, p2, 0.2), 0.2));
    double const e2 = frobenius_norm(cycle_unitary(s2, unit_params) - expm_hermitian(effective_hamiltonian(p1, p2, 0.1), 0.1));
    CHECK(e1 / e2 >= 12.0);
    CHECK(e1 / e2 <= 20.0);

    Mat3 bad;
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(effective_hamiltonian(bad, a, 0.1), std::invalid_argument);
}

TEST_CASE("evolve_eff")
{
    auto const psi0 = dark_state(unit_params);
    Mat3 const h = Mat3::diagonal(std::array<double, 3>{0.3, -0.2, 0.7});
    CHECK((evolve_eff(psi0, h, 0.1, 0).amplitudes() - psi0.amplitudes()).norm() == 0.0);
    auto const out = evolve_eff(psi0, h, 0.1, 17);
    std::array<double, 3> d{0.3, -0.2, 0.7};
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::abs(out[k] - psi0[k] * std::exp(Complex{0.0, -17 * 0.1 * d[k]})) < 1e-14);
    }

    std::mt19937_64 rng(31);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 10; ++trial) {
        Mat3 m;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) m(i, j) = Complex{g(rng), g(rng)};
        Mat3 const heff = Complex{0.5} * (m + m.adjoint());
        Mat3 const step = expm_hermitian(heff, 0.1);
        Vec3 v = psi0.amplitudes();
        for (int n = 0; n < 1000; ++n) v = step * v;
        CHECK((evolve_eff(psi0, heff, 0.1, 1000).amplitudes() - v).norm() <= 1e-10);
    }
}

TEST_CASE("fidelity")
{
    auto const b = PureState::basis(level_b);
    auto const c = PureState::basis(level_c);
    auto const d = dark_state(unit_params);
    CHECK(fidelity(d, d) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fidelity(b, c) == 0.0);
    CHECK(fidelity(d, b) == doctest::Approx(0.5));
    CHECK(fidelity(b, d) == fidelity(d, b));
}
