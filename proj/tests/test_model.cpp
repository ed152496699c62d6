#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "peit/model.hpp"

#include <cmath>
#include <random>

using namespace peit;

TEST_CASE("build_hamiltonians")
{
    SUBCASE("unit Rabi frequencies, resonance")
    {
        auto const h = build_hamiltonians({1.0, 1.0, 0.0, {}});
        CHECK(h.both(level_a, level_b) == Complex{-0.5});
        CHECK(h.both(level_a, level_c) == Complex{-0.5});
        CHECK(h.both(level_b, level_c) == Complex{0.0});
        for (std::size_t i = 0; i < 3; ++i) CHECK(h.both(i, i) == Complex{0.0});
    }
    SUBCASE("fields off leaves the free part")
    {
        SystemParams p{0.0, 0.0, 0.2, {}};
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
        auto const h = build_hamiltonians(p);
        Mat3 const expected = Mat3::diagonal(std::array<double, 3>{0.1, -0.1, 0.1});
        CHECK(frobenius_norm(h.free - expected) == 0.0);
        CHECK(frobenius_norm(h.coupling - expected) == 0.0);
        CHECK(frobenius_norm(h.probe - expected) == 0.0);
        CHECK(frobenius_norm(h.both - expected) == 0.0);
    }
    SUBCASE("mixed-state parameter set")
    {
        auto const h = build_hamiltonians({std::sqrt(99.0), 1.0, 1.0, {}});
        CHECK(h.both(level_a, level_b).real() == doctest::Approx(-0.5));
        CHECK(h.both(level_a, level_c).real() == doctest::Approx(-std::sqrt(99.0) / 2.0));
        CHECK(h.both(level_a, level_a).real() == doctest::Approx(0.5));
        CHECK(h.both(level_b, level_b).real() == doctest::Approx(-0.5));
        CHECK(h.both(level_c, level_c).real() == doctest::Approx(0.5));
    }
    SUBCASE("all Hermitian")
    {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(0.0, 3.0);
        for (int i = 0; i < 100; ++i) {
            auto const h = build_hamiltonians({u(rng) + 0.01, u(rng), u(rng) - 1.5, {}});
            for (auto const* m : {&h.free, &h.coupling, &h.probe, &h.both}) {
                CHECK(hermiticity_defect(*m) <= 1e-14);
            }
        }
    }
}

TEST_CASE("hamiltonian_at segmentation")
{
    SystemParams const p{1.0, 1.0, 0.0, {}};
    auto const h = build_hamiltonians(p);
    ModulationSchedule single{Mode::SingleMod, 1.0};
    ModulationSchedule dbl{Mode::DoubleMod, 1.0};
    ModulationSchedule standard{Mode::Standard, 0.0};

    CHECK(hamiltonian_at(single, p, 0.25) == h.coupling);
    CHECK(hamiltonian_at(single, p, 0.75) == h.both);
    CHECK(hamiltonian_at(dbl, p, 0.25) == h.coupling);
    CHECK(hamiltonian_at(dbl, p, 0.75) == h.probe);
    CHECK(hamiltonian_at(standard, p, 0.75) == h.both);

    // half-open: the switch happens exactly at (n + 1/2) tau
    CHECK(hamiltonian_at(dbl, p, 0.0) == h.coupling);
    CHECK(hamiltonian_at(dbl, p, 0.5) == h.probe);
    CHECK(hamiltonian_at(dbl, p, 1.0) == h.coupling);

    // periodicity
    ModulationSchedule s{Mode::DoubleMod, 0.37};
    for (double t : {0.01, 0.1, 0.2, 0.3, 0.36}) {
        CHECK(hamiltonian_at(s, p, t) == hamiltonian_at(s, p, t + s.tau));
        CHECK(hamiltonian_at(s, p, t) == hamiltonian_at(s, p, t + 7 * s.tau));
    }

    CHECK_THROWS_AS(hamiltonian_at(ModulationSchedule{Mode::SingleMod, 0.0}, p, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(hamiltonian_at(single, p, -0.1), std::invalid_argument);
}

TEST_CASE("dark_state")
{
    auto const d = dark_state({1.0, 1.0, 0.0, {}});
    CHECK(std::abs(d[level_a]) == 0.0);
    CHECK(d[level_b].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(d[level_c].real() == doctest::Approx(-1.0 / std::sqrt(2.0)));

    auto const b = dark_state({1.0, 0.0, 0.0, {}});
    CHECK(b[level_b] == Complex{1.0});
    CHECK(b[level_c] == Complex{0.0});

    auto const m = dark_state({std::sqrt(99.0), 1.0, 1.0, {}});
    CHECK(m[level_b].real() == doctest::Approx(std::sqrt(99.0) / 10.0));
    CHECK(m[level_c].real() == doctest::Approx(-0.1));

    CHECK_THROWS_AS(dark_state({0.0, 0.0, 0.0, {}}), std::invalid_argument);

    // annihilated by the EIT Hamiltonian at resonance
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        SystemParams p{u(rng) + 1e-3, u(rng), 0.0, {}};
        auto const psi = dark_state(p);
        CHECK((build_hamiltonians(p).both * psi.amplitudes()).norm() <= 1e-12);
    }
}

TEST_CASE("mixed_initial")
{
    auto const rho = mixed_initial(0.99, 0.01);
    CHECK(rho(level_b, level_b).real() == doctest::Approx(0.99));
    CHECK(rho(level_c, level_c).real() == doctest::Approx(0.01));
    CHECK(rho(level_a, level_a) == Complex{0.0});

    auto const pure = mixed_initial(1.0, 0.0);
    CHECK(frobenius_norm(pure.matrix() - Mat3::unit(level_b, level_b)) == 0.0);

    auto const half = mixed_initial(0.5, 0.5);
    auto const es = hermitian_eig(half.matrix());
    CHECK(es.values[0] == doctest::Approx(0.0));
    CHECK(es.values[1] == doctest::Approx(0.5));
    CHECK(es.values[2] == doctest::Approx(0.5));

    CHECK_THROWS_AS(mixed_initial(0.7, 0.7), std::invalid_argument);
    CHECK_THROWS_AS(mixed_initial(1.2, -0.2), std::invalid_argument);
}

TEST_CASE("state validation")
{
    CHECK_THROWS_AS(PureState(Complex{1.0}, Complex{1.0}, Complex{0.0}), std::invalid_argument);
    CHECK_NOTHROW(PureState::normalized(Vec3({1.0, 1.0, 0.0})));
    CHECK_THROWS_AS(PureState::normalized(Vec3{}), std::invalid_argument);

    Mat3 not_hermitian = Mat3::unit(level_b, level_b);
    not_hermitian(level_a, level_b) = 0.1;
    CHECK_THROWS_AS(DensityMatrix{not_hermitian}, std::invalid_argument);
    CHECK_THROWS_AS(DensityMatrix{Mat3::identity()}, std::invalid_argument);  // trace 3
    Mat3 negative = Mat3::diagonal(std::array<double, 3>{-0.1, 0.6, 0.5});
    CHECK_THROWS_AS(DensityMatrix{negative}, std::invalid_argument);
}

TEST_CASE("decay spec text form")
{
    CHECK(DecaySpec::parse("none") == DecaySpec::none());
    CHECK(DecaySpec::parse("projector:1") == DecaySpec::projector(1.0));
    CHECK(DecaySpec::parse("lindblad:0.5,2.5") == DecaySpec::lindblad(0.5, 2.5));
    for (auto const& d : {DecaySpec::none(), DecaySpec::projector(0.1), DecaySpec::lindblad(0.3, 1e-7)}) {
        CHECK(DecaySpec::parse(d.to_string()) == d);
    }
    CHECK_THROWS_AS(DecaySpec::parse("projector:-1"), std::invalid_argument);
    CHECK_THROWS_AS(DecaySpec::parse("lindblad:1"), std::invalid_argument);
    CHECK_THROWS_AS(DecaySpec::parse("dephasing:1"), std::invalid_argument);
    CHECK(parse_mode("double") == Mode::DoubleMod);
    CHECK_THROWS_AS(parse_mode("triple"), std::invalid_argument);
}
