#pragma once

// Closed-form fidelity and absorption of the modulated Lambda system.
// fidelity_single / fidelity_single_limit / fidelity_double hold for
// omega_c = omega_p = 1 and zero detuning; the detuned formulas for
// omega_c = omega_p = 1 and small (tau, delta). All are transcribed as-is.

#include <string>
#include <vector>

namespace peit::analytic
{

/// Detuned expansion coefficients, truncated at O(tau^2) and O(delta^3).
struct CoeffSet
{
    double tau = 0.0;
    double delta = 0.0;
    double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
    double b1 = 0.0, b2 = 0.0, b3 = 0.0, b4 = 0.0, b5 = 0.0, b6 = 0.0, b7 = 0.0;
    double f1 = 0.0, f2 = 0.0, f3 = 0.0;
    /// False outside |delta| <= 0.2, tau <= 1 where the expansion is known to drift.
    bool within_validity = true;

    static std::vector<std::string> csv_header();
    std::vector<double> csv_row() const;
};

/// sgn with sgn(0) = 0.
double sign(double x);

/// Single modulation, finite tau. Rejects tau^2 >= 576.
double fidelity_single(double t, double tau);

/// Single modulation, tau -> 0: [9/10 + cos(sqrt(5) t / 4) / 10]^2.
double fidelity_single_limit(double t);

/// Double modulation, finite tau. Rejects tau^2 >= 192.
double fidelity_double(double t, double tau);

CoeffSet detuned_coeffs(double tau, double delta);

/// a1 cos(f1 t) + a2 cos(f2 t) + a3 cos(f3 t) + a4
double fidelity_detuned(double t, double tau, double delta);
double fidelity_detuned(double t, CoeffSet const& c);

/// Im(rho_ab) =
///   b1 cos(f1 t) + b2 cos(f2 t) + b3 cos(f3 t) + b4 sin(f1 t) - b5 sin(f2 t) - b6 sin(f3 t) + b7
double absorption_detuned(double t, double tau, double delta);
double absorption_detuned(double t, CoeffSet const& c);

/// b7 + sqrt(b1^2 + b4^2), the dominant absorption level.
double absorption_envelope(double tau, double delta);

struct Extrema
{
    double min = 0.0;
    double max = 0.0;
    double amplitude() const { return (max - min) / 2.0; }
    double center() const { return (max + min) / 2.0; }
};

/// Extrema of fidelity_single / fidelity_double over t (cosine at +-1).
Extrema fidelity_single_extrema(double tau);
Extrema fidelity_double_extrema(double tau);

}  // namespace peit::analytic
