#pragma once

// Lambda-type three-level atom: excited |a>, ground states |b> and |c>.
// Basis order is (|a>, |b>, |c>) everywhere; hbar = 1.

#include "peit/linalg.hpp"

#include <string>
#include <string_view>
#include <utility>

namespace peit
{

inline constexpr std::size_t level_a = 0;
inline constexpr std::size_t level_b = 1;
inline constexpr std::size_t level_c = 2;

/// Renormalization/sampling interval used for the unmodulated schedule, which
/// has no intrinsic cycle.
inline constexpr double standard_reference_period = 0.1;

struct DecaySpec
{
    enum class Kind
    {
        None,
        Projector,  // -1/2 {gamma |a><a|, rho}, trace decreasing
        Lindblad    // spontaneous emission a->b, a->c
    };

    Kind kind = Kind::None;
    double gamma = 0.0;
    double gamma_ab = 0.0;
    double gamma_ac = 0.0;

    static DecaySpec none() { return {}; }
    static DecaySpec projector(double gamma) { return {Kind::Projector, gamma, 0.0, 0.0}; }
    static DecaySpec lindblad(double gamma_ab, double gamma_ac)
    {
        return {Kind::Lindblad, 0.0, gamma_ab, gamma_ac};
    }

    void validate() const;
    bool trace_preserving() const { return kind != Kind::Projector; }

    /// "none", "projector:<gamma>" or "lindblad:<gamma_ab>,<gamma_ac>".
    std::string to_string() const;
    static DecaySpec parse(std::string_view text);

    friend bool operator==(DecaySpec const&, DecaySpec const&) = default;
};

struct SystemParams
{
    double omega_c = 1.0;  // coupling Rabi frequency, |a> <-> |c>
    double omega_p = 1.0;  // probe Rabi frequency, |a> <-> |b>
    double delta = 0.0;    // probe detuning
    DecaySpec decay{};

    /// Finite, non-negative Rabi frequencies and a valid decay spec.
    void validate_fields() const;
    /// validate_fields() plus at least one field switched on.
    void validate() const;

    friend bool operator==(SystemParams const&, SystemParams const&) = default;
};

enum class Mode
{
    Standard,   // both fields always on
    SingleMod,  // probe switched off during the first half-cycle
    DoubleMod   // coupling and probe switched complementarily
};

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

struct ModulationSchedule
{
    Mode mode = Mode::DoubleMod;
    double tau = 0.1;  // ignored for Mode::Standard

    void validate() const;
    bool modulated() const { return mode != Mode::Standard; }
    /// Cycle length used for stroboscopic sampling and renormalization.
    double period() const { return modulated() ? tau : standard_reference_period; }

    friend bool operator==(ModulationSchedule const&, ModulationSchedule const&) = default;
};

class PureState
{
public:
    /// Rejects amplitudes whose norm differs from 1 by more than 1e-10.
    explicit PureState(Vec3 const& amplitudes);
    PureState(Complex ca, Complex cb, Complex cc) : PureState(Vec3({ca, cb, cc})) {}

    static PureState basis(std::size_t level) { return PureState(Vec3::basis(level)); }
    /// Normalizes first; rejects the zero vector.
    static PureState normalized(Vec3 const& amplitudes);

    Vec3 const& amplitudes() const { return amps_; }
    Complex operator[](std::size_t level) const { return amps_[level]; }

private:
    struct Unchecked {};
    PureState(Vec3 const& amplitudes, Unchecked) : amps_(amplitudes) {}
    friend PureState apply_unitary(Mat3 const&, PureState const&);

    Vec3 amps_;
};

/// U|psi>; U must be unitary. The result is checked against a looser 1e-9 norm bound.
PureState apply_unitary(Mat3 const& u, PureState const& psi);

class DensityMatrix
{
public:
    /// Validates Hermiticity (1e-10), unit trace (1e-8) and eigenvalues >= -1e-9.
    explicit DensityMatrix(Mat3 const& rho);

    static DensityMatrix from_pure(PureState const& psi);

    Mat3 const& matrix() const { return rho_; }
    Complex operator()(std::size_t i, std::size_t j) const { return rho_(i, j); }

    double min_eigenvalue() const;

private:
    Mat3 rho_;
};

struct Hamiltonians
{
    Mat3 free;      // H0 = (delta/2)(|a><a| - |b><b| + |c><c|)
    Mat3 coupling;  // H0 - (omega_c/2)(|a><c| + h.c.)
    Mat3 probe;     // H0 - (omega_p/2)(|a><b| + h.c.)
    Mat3 both;      // H0 with both couplings: the standard EIT Hamiltonian
};

Hamiltonians build_hamiltonians(SystemParams const& params);

/// (first half-cycle, second half-cycle) Hamiltonians of a modulated schedule.
std::pair<Mat3, Mat3> half_cycle_hamiltonians(ModulationSchedule const& schedule,
                                              SystemParams const& params);

/// Piecewise Hamiltonian; the first half-cycle is [n tau, (n + 1/2) tau).
Mat3 hamiltonian_at(ModulationSchedule const& schedule, SystemParams const& params, double t);

/// (omega_c |b> - omega_p |c>) / sqrt(omega_p^2 + omega_c^2)
PureState dark_state(SystemParams const& params);

/// diag(0, rho_bb, rho_cc)
DensityMatrix mixed_initial(double rho_bb, double rho_cc);

}  // namespace peit
