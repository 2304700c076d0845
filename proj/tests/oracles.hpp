#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's quadrature or rate code.

#include <cmath>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

inline constexpr double e = 1.602176634e-19;
inline constexpr double h = 6.62607015e-34;
inline constexpr double k_B = 1.380649e-23;
inline constexpr double pi = 3.14159265358979323846;

/// Dynes DOS in 50-digit arithmetic with a hand-rolled complex square root.
inline double dynes_high_precision(double u_in, double gamma_in) {
    using big = boost::multiprecision::cpp_bin_float_50;
    const big u = u_in, g = gamma_in;
    // w = (u + i g)^2 - 1
    const big wr = u * u - g * g - 1;
    const big wi = 2 * u * g;
    // principal sqrt(w) = a + i b
    const big mod = sqrt(wr * wr + wi * wi);
    big a = sqrt((mod + wr) / 2);
    big b = sqrt((mod - wr) / 2);
    if (wi < 0) b = -b;
    // (u + i g) / (a + i b), real part
    const big re = (u * a + g * b) / (a * a + b * b);
    return static_cast<double>(abs(re));
}

inline double fermi(double x) { return 1.0 / (std::exp(x) + 1.0); }

/// Forward rate by the composite trapezoid rule on `points` equally spaced
/// nodes over the same window the library uses; returns s^-1.
inline double forward_rate_trapezoid(double E, double delta, double gamma, double T, int points) {
    const double t = k_B * T / delta;
    const double eps = E / delta;
    const double half = std::abs(eps) + 40.0 * t + 10.0;
    const double step = 2.0 * half / (points - 1);
    double sum = 0.0;
    for (int i = 0; i < points; ++i) {
        const double u = -half + i * step;
        const double w = (i == 0 || i == points - 1) ? 0.5 : 1.0;
        const double n = dynes_high_precision(u, gamma);
        sum += w * n * fermi(-u / t) * fermi((u - eps) / t);
    }
    return sum * step * delta / h;
}

/// Thermal occupation n = 1/(exp(hf/kT) - 1), straight from the definition.
inline double bose(double T, double f_hz) { return 1.0 / (std::exp(h * f_hz / (k_B * T)) - 1.0); }

/// Closed form of the coherent-drive balance: n = 4 P g_dr / (hbar w (g_dr + g_qcr + g_0)^2).
inline double coherent_closed_form(double P, double f_R, double g_dr, double g_qcr, double g_0) {
    const double hbar_omega = h * f_R;
    const double total = g_dr + g_qcr + g_0;
    return 4.0 * P * g_dr / (hbar_omega * total * total);
}

}  // namespace oracle
