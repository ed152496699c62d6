#include "peit/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace peit::analytic
{

namespace
{

constexpr double sqrt2 = std::numbers::sqrt2;

double single_a(double tau)
{
    double const t2 = tau * tau;
    return 184320.0 - 192.0 * t2 + t2 * t2;
}

double double_b(double tau)
{
    double const t2 = tau * tau;
    return 18432.0 - 48.0 * t2 + t2 * t2 / 2.0;
}

void check_single(double tau)
{
    if (!(tau >= 0.0) || tau * tau >= 576.0) {
        throw std::domain_error("fidelity_single requires 0 <= tau and tau^2 < 576");
    }
}

void check_double(double tau)
{
    if (!(tau >= 0.0) || tau * tau >= 192.0) {
        throw std::domain_error("fidelity_double requires 0 <= tau and tau^2 < 192");
    }
}

// Range of x^2 for x in [lo, hi].
Extrema squared_range(double lo, double hi)
{
    double const top = std::max(lo * lo, hi * hi);
    if (lo <= 0.0 && hi >= 0.0) return {0.0, top};
    return {std::min(lo * lo, hi * hi), top};
}

}  // namespace

double sign(double x)
{
    return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
}

double fidelity_single(double t, double tau)
{
    check_single(tau);
    double const t2 = tau * tau;
    double const a = single_a(tau);
    double const p = (576.0 - t2) * (576.0 - t2);
    double const q = 36864.0 + 768.0 * t2 + t2 * t2;
    double const inner = p + q * std::cos(std::sqrt(a) * t / 768.0);
    return inner * inner / (4.0 * a * a);
}

double fidelity_single_limit(double t)
{
    double const x = 0.9 + 0.1 * std::cos(std::sqrt(5.0) * t / 4.0);
    return x * x;
}

double fidelity_double(double t, double tau)
{
    check_double(tau);
    double const t2 = tau * tau;
    double const b = double_b(tau);
    double const p = (192.0 - t2) * (192.0 - t2);
    double const inner = p + 288.0 * t2 * std::cos(std::sqrt(b) * t / 384.0);
    return inner * inner / (4.0 * b * b);
}

CoeffSet detuned_coeffs(double tau, double delta)
{
    double const d = delta;
    double const d2 = d * d;
    double const d3 = d2 * d;
    double const t2 = tau * tau;
    double const s = sign(d);

    CoeffSet c;
    c.tau = tau;
    c.delta = delta;

    double const a_sym = 2.0 * d2 + t2 / 128.0 * (1.0 - 8.0 * d2);
    double const a_odd = s * (3.0 * sqrt2 * d3 - sqrt2 * d * t2 / 3072.0 * (12.0 + 197.0 * d2));
    c.a1 = a_sym - a_odd;
    c.a2 = a_sym + a_odd;
    c.a3 = d2 * t2 / 64.0;
    c.a4 = 1.0 - 4.0 * d2 - t2 / 64.0 * (1.0 - 7.0 * d2);

    double const f_sym = sqrt2 / 4.0 + 5.0 * sqrt2 * d2 / 16.0 - sqrt2 * t2 / 12288.0 * (4.0 + 7.0 * d2);
    double const f_odd = s * (d / 4.0 - 3.0 * d3 / 2.0 - d * t2 / 512.0 * (1.0 - 4.0 * d2));
    c.f1 = f_sym + f_odd;
    c.f2 = f_sym - f_odd;
    c.f3 = sqrt2 / 2.0 + 5.0 * sqrt2 * d2 / 8.0 - sqrt2 * t2 / 6144.0 * (4.0 + 7.0 * d2);

    double const b_sym = -tau / 32.0 * (1.0 - 12.0 * d2);
    double const b_odd = s * sqrt2 * d * tau / 256.0 * (4.0 + 35.0 * d2);
    c.b1 = b_sym - b_odd;
    c.b2 = b_sym + b_odd;
    c.b3 = -3.0 * d2 * tau / 16.0;

    double const b45_sym = d / 2.0 * (1.0 - 2.0 * d2) - d3 * t2 / 384.0;
    double const b45_odd = s * (3.0 * sqrt2 * d2 / 4.0 + sqrt2 * t2 / 6144.0 * (12.0 - 109.0 * d2));
    c.b4 = b45_sym - b45_odd;
    c.b5 = b45_sym + b45_odd;
    c.b6 = sqrt2 * d2 / 2.0 + sqrt2 * t2 / 2048.0 * (4.0 - 33.0 * d2);
    c.b7 = tau / 16.0 * (1.0 - 9.0 * d2);

    c.within_validity = std::abs(delta) <= 0.2 && tau <= 1.0;
    return c;
}

double fidelity_detuned(double t, CoeffSet const& c)
{
    return c.a1 * std::cos(c.f1 * t) + c.a2 * std::cos(c.f2 * t) + c.a3 * std::cos(c.f3 * t) + c.a4;
}

double fidelity_detuned(double t, double tau, double delta)
{
    return fidelity_detuned(t, detuned_coeffs(tau, delta));
}

double absorption_detuned(double t, CoeffSet const& c)
{
    return c.b1 * std::cos(c.f1 * t) + c.b2 * std::cos(c.f2 * t) + c.b3 * std::cos(c.f3 * t)
           + c.b4 * std::sin(c.f1 * t) - c.b5 * std::sin(c.f2 * t) - c.b6 * std::sin(c.f3 * t) + c.b7;
}

double absorption_detuned(double t, double tau, double delta)
{
    return absorption_detuned(t, detuned_coeffs(tau, delta));
}

double absorption_envelope(double tau, double delta)
{
    auto const c = detuned_coeffs(tau, delta);
    return c.b7 + std::sqrt(c.b1 * c.b1 + c.b4 * c.b4);
}

Extrema fidelity_single_extrema(double tau)
{
    check_single(tau);
    double const t2 = tau * tau;
    double const a = single_a(tau);
    double const p = (576.0 - t2) * (576.0 - t2);
    double const q = 36864.0 + 768.0 * t2 + t2 * t2;
    double const lo = (p - q) / (2.0 * a);
    double const hi = (p + q) / (2.0 * a);
    return squared_range(lo, hi);
}

Extrema fidelity_double_extrema(double tau)
{
    check_double(tau);
    double const t2 = tau * tau;
    double const b = double_b(tau);
    double const p = (192.0 - t2) * (192.0 - t2);
    double const lo = (p - 288.0 * t2) / (2.0 * b);
    double const hi = (p + 288.0 * t2) / (2.0 * b);
    return squared_range(lo, hi);
}

std::vector<std::string> CoeffSet::csv_header()
{
    return {"tau", "delta", "a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4",
            "b5",  "b6",    "b7", "f1", "f2", "f3"};
}

std::vector<double> CoeffSet::csv_row() const
{
    return {tau, delta, a1, a2, a3, a4, b1, b2, b3, b4, b5, b6, b7, f1, f2, f3};
}

}  // namespace peit::analytic
