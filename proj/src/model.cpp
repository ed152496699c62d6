#include "peit/model.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace peit
{

namespace
{

double parse_double(std::string_view text, std::string_view what)
{
    double value = 0.0;
    auto const* first = text.data();
    auto const* last = text.data() + text.size();
    while (first != last && *first == ' ') ++first;
    while (last != first && last[-1] == ' ') --last;
    if (first != last && *first == '+') ++first;
    auto const [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw std::invalid_argument("cannot parse " + std::string(what) + " from '"
                                    + std::string(text) + "'");
    }
    return value;
}

std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void DecaySpec::validate() const
{
    auto check = [](double rate, char const* name) {
        if (!std::isfinite(rate) || rate < 0.0) {
            throw std::invalid_argument(std::string("decay rate ") + name
                                        + " must be finite and non-negative");
        }
    };
    check(gamma, "gamma");
    check(gamma_ab, "gamma_ab");
    check(gamma_ac, "gamma_ac");
}

std::string DecaySpec::to_string() const
{
    switch (kind) {
    case Kind::None:
        return "none";
    case Kind::Projector:
        return "projector:" + format_number(gamma);
    case Kind::Lindblad:
        return "lindblad:" + format_number(gamma_ab) + "," + format_number(gamma_ac);
    }
    return "none";
}

DecaySpec DecaySpec::parse(std::string_view text)
{
    DecaySpec spec;
    if (text == "none") {
        return spec;
    }
    auto const colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw std::invalid_argument("decay must be none, projector:<gamma> or "
                                    "lindblad:<gamma_ab>,<gamma_ac>");
    }
    auto const head = text.substr(0, colon);
    auto const rest = text.substr(colon + 1);
    if (head == "projector") {
        spec = projector(parse_double(rest, "projector gamma"));
    } else if (head == "lindblad") {
        auto const comma = rest.find(',');
        if (comma == std::string_view::npos) {
            throw std::invalid_argument("lindblad decay needs two rates: lindblad:<gamma_ab>,<gamma_ac>");
        }
        spec = lindblad(parse_double(rest.substr(0, comma), "gamma_ab"),
                        parse_double(rest.substr(comma + 1), "gamma_ac"));
    } else {
        throw std::invalid_argument("unknown decay kind '" + std::string(head) + "'");
    }
    spec.validate();
    return spec;
}

void SystemParams::validate_fields() const
{
    if (!std::isfinite(omega_c) || !std::isfinite(omega_p) || omega_c < 0.0 || omega_p < 0.0) {
        throw std::invalid_argument("Rabi frequencies must be finite and non-negative");
    }
    if (!std::isfinite(delta)) {
        throw std::invalid_argument("detuning must be finite");
    }
    decay.validate();
}

void SystemParams::validate() const
{
    validate_fields();
    if (omega_c == 0.0 && omega_p == 0.0) {
        throw std::invalid_argument("at least one Rabi frequency must be positive");
    }
}

std::string_view to_string(Mode mode)
{
    switch (mode) {
    case Mode::Standard:
        return "standard";
    case Mode::SingleMod:
        return "single";
    case Mode::DoubleMod:
        return "double";
    }
    return "standard";
}

Mode parse_mode(std::string_view text)
{
    if (text == "standard") return Mode::Standard;
    if (text == "single") return Mode::SingleMod;
    if (text == "double") return Mode::DoubleMod;
    throw std::invalid_argument("mode must be one of standard, single, double; got '"
                                + std::string(text) + "'");
}

void ModulationSchedule::validate() const
{
    if (modulated() && !(std::isfinite(tau) && tau > 0.0)) {
        throw std::invalid_argument("modulation period tau must be positive");
    }
}

PureState::PureState(Vec3 const& amplitudes) : amps_(amplitudes)
{
    double const n = amps_.norm();
    if (!std::isfinite(n) || std::abs(n * n - 1.0) > 1e-10) {
        throw std::invalid_argument("pure state is not normalized (|psi|^2 = "
                                    + std::to_string(n * n) + ")");
    }
}

PureState PureState::normalized(Vec3 const& amplitudes)
{
    double const n = amplitudes.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw std::invalid_argument("cannot normalize a zero or non-finite state vector");
    }
    return PureState(Complex{1.0 / n} * amplitudes);
}

PureState apply_unitary(Mat3 const& u, PureState const& psi)
{
    Vec3 const out = u * psi.amplitudes();
    double const n = out.norm();
    if (std::abs(n - 1.0) > 1e-9) {
        throw std::domain_error("propagated state lost normalization (|psi| = " + std::to_string(n)
                                + ")");
    }
    return PureState(out, PureState::Unchecked{});
}

DensityMatrix::DensityMatrix(Mat3 const& rho) : rho_(rho)
{
    if (!rho_.is_finite()) {
        throw std::invalid_argument("density matrix has non-finite entries");
    }
    if (hermiticity_defect(rho_) > 1e-10) {
        throw std::invalid_argument("density matrix is not Hermitian");
    }
    Complex const tr = rho_.trace();
    if (std::abs(tr - 1.0) > 1e-8) {
        throw std::invalid_argument("density matrix trace differs from 1 (tr = "
                                    + std::to_string(tr.real()) + ")");
    }
    if (min_eigenvalue() < -1e-9) {
        throw std::invalid_argument("density matrix has a negative eigenvalue");
    }
}

DensityMatrix DensityMatrix::from_pure(PureState const& psi)
{
    return DensityMatrix(Mat3::outer(psi.amplitudes(), psi.amplitudes()));
}

double DensityMatrix::min_eigenvalue() const
{
    // Hermitian part only; the constructor already bounds the defect.
    Mat3 const h = Complex{0.5} * (rho_ + rho_.adjoint());
    return hermitian_eig(h).values[0];
}

Hamiltonians build_hamiltonians(SystemParams const& params)
{
    params.validate_fields();
    double const d = params.delta / 2.0;
    Mat3 h0 = Mat3::diagonal(std::array<double, 3>{d, -d, d});

    Mat3 coupling_term;
    coupling_term(level_a, level_c) = -params.omega_c / 2.0;
    coupling_term(level_c, level_a) = -params.omega_c / 2.0;
    Mat3 probe_term;
    probe_term(level_a, level_b) = -params.omega_p / 2.0;
    probe_term(level_b, level_a) = -params.omega_p / 2.0;

    return Hamiltonians{h0, h0 + coupling_term, h0 + probe_term, h0 + coupling_term + probe_term};
}

std::pair<Mat3, Mat3> half_cycle_hamiltonians(ModulationSchedule const& schedule,
                                              SystemParams const& params)
{
    params.validate();
    auto const h = build_hamiltonians(params);
    switch (schedule.mode) {
    case Mode::SingleMod:
        return {h.coupling, h.both};
    case Mode::DoubleMod:
        return {h.coupling, h.probe};
    case Mode::Standard:
        break;
    }
    return {h.both, h.both};
}

Mat3 hamiltonian_at(ModulationSchedule const& schedule, SystemParams const& params, double t)
{
    schedule.validate();
    if (t < 0.0) {
        throw std::invalid_argument("hamiltonian_at: time must be non-negative");
    }
    auto const [first, second] = half_cycle_hamiltonians(schedule, params);
    if (!schedule.modulated()) {
        return first;
    }
    double const phase = t / schedule.tau - std::floor(t / schedule.tau);
    return phase < 0.5 ? first : second;
}

PureState dark_state(SystemParams const& params)
{
    params.validate();
    double const norm = std::hypot(params.omega_p, params.omega_c);
    return PureState(Complex{0.0}, Complex{params.omega_c / norm}, Complex{-params.omega_p / norm});
}

DensityMatrix mixed_initial(double rho_bb, double rho_cc)
{
    auto in_unit = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
    if (!in_unit(rho_bb) || !in_unit(rho_cc) || std::abs(rho_bb + rho_cc - 1.0) > 1e-12) {
        throw std::invalid_argument("mixed initial state needs rho_bb, rho_cc in [0,1] summing to 1");
    }
    return DensityMatrix(Mat3::diagonal(std::array<double, 3>{0.0, rho_bb, rho_cc}));
}

}  // namespace peit
