#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "quadrature.hpp"

namespace qcrlab {

/// NIS junction parameters, SI units. Both electrodes share `T_qp`.
struct JunctionParams {
    double delta = 203.0 * constants::micro_eV;  // gap, J
    double gamma_D = 1.96e-3;                    // Dynes broadening
    double R_T = 29.4e3;                         // tunneling resistance, Ohm
    double T_qp = 0.248;                         // quasiparticle temperature, K

    // gamma_D >= 1 is allowed: a very large value flattens the density of
    // states and emulates a normal-metal counter-electrode.
    void validate() const {
        require(std::isfinite(delta) && delta > 0.0, "delta must be positive");
        require(std::isfinite(gamma_D) && gamma_D > 0.0, "gamma_D must be positive");
        require(std::isfinite(R_T) && R_T > 0.0, "R_T must be positive");
        require(std::isfinite(T_qp) && T_qp >= 0.0, "T_qp must be nonnegative");
    }

    bool operator==(const JunctionParams&) const = default;
};

namespace detail {

// Logistic 1/(exp(x)+1) without overflow.
inline double fermi_reduced(double x) {
    if (x > 0.0) {
        const double emx = std::exp(-x);
        return emx / (1.0 + emx);
    }
    return 1.0 / (1.0 + std::exp(x));
}

// Dynes DOS with energy in units of the gap.
inline double dynes_reduced(double u, double gamma) {
    const std::complex<double> z(u, gamma);
    const std::complex<double> root = std::sqrt((z - 1.0) * (z + 1.0));
    return std::abs((z / root).real());
}

}  // namespace detail

/// Normalized Dynes density of states n_S(eps) = |Re[(u + i g)/sqrt((u + i g)^2 - 1)]|, u = eps/delta.
inline double dynes_dos(double eps, const JunctionParams& junction) {
    return detail::dynes_reduced(eps / junction.delta, junction.gamma_D);
}

/// Fermi-Dirac occupation at energy E (J) and temperature T (K). T = 0 gives
/// the step function with f(0) = 1/2.
inline double fermi_occupation(double E, double T) {
    require(T >= 0.0, "temperature must be nonnegative");
    if (T == 0.0) {
        if (E < 0.0) return 1.0;
        if (E > 0.0) return 0.0;
        return 0.5;
    }
    return detail::fermi_reduced(E / (constants::k_B * T));
}

/// Forward quasiparticle tunneling rate
///   F(E) = (1/h) \int d eps n_S(eps) [1 - f(eps)] f(eps - E)
/// evaluated in gap-normalized units. The returned value and error are in s^-1.
inline QuadratureResult forward_rate_detailed(double E, const JunctionParams& junction,
                                              const QuadratureConfig& quad) {
    junction.validate();
    quad.validate();
    const double scale = junction.delta / constants::h;  // s^-1 per unit normalized integral
    const double e = E / junction.delta;
    const double t = constants::k_B * junction.T_qp / junction.delta;
    const double g = junction.gamma_D;
    const double abs_tol = quad.abs_tol / scale;

    std::vector<double> points;
    points.reserve(24);
    double lo = 0.0;
    double hi = 0.0;
    double tail = 0.0;
    if (t == 0.0) {
        // Step Fermi functions: the integrand lives on [0, e].
        if (!(e > 0.0)) return {};
        lo = 0.0;
        hi = e;
    } else {
        const double thermal = quad.window_kT * t;
        const double half_width = std::abs(e) + thermal + 10.0;
        lo = -half_width;
        hi = half_width;
        for (double p : {-thermal, 0.0, thermal, e - thermal, e, e + thermal}) points.push_back(p);
        // Bound on the integrand mass beyond the window (n_S -> 1 there).
        tail = t * (std::exp(-(hi - e) / t) + std::exp(lo / t));
    }
    points.push_back(lo);
    points.push_back(hi);
    // Resolve the coherence peaks, whose width is ~gamma_D.
    for (double edge : {-1.0, 1.0}) {
        points.push_back(edge);
        for (double w : {1.0, 10.0, 100.0}) {
            points.push_back(edge - w * g);
            points.push_back(edge + w * g);
        }
    }
    std::erase_if(points, [&](double p) { return !(p >= lo && p <= hi); });
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    auto integrand = [&](double u) {
        const double n = detail::dynes_reduced(u, g);
        if (t == 0.0) return n;
        return n * detail::fermi_reduced(-u / t) * detail::fermi_reduced((u - e) / t);
    };
    QuadratureResult r =
        integrate_adaptive(integrand, points, abs_tol, quad.rel_tol, quad.max_subdivisions);
    r.value *= scale;
    r.error = (r.error + tail) * scale;
    return r;
}

inline double forward_rate(double E, const JunctionParams& junction, const QuadratureConfig& quad) {
    return forward_rate_detailed(E, junction, quad).value;
}

/// Elastic NIS current under pure dc bias, I = -e (R_K/R_T) [F(-eV) - F(eV)].
inline double elastic_dc_current(double V_dc, const JunctionParams& junction,
                                 const QuadratureConfig& quad) {
    if (V_dc == 0.0) return 0.0;
    const double eV = constants::e * V_dc;
    const double prefactor = constants::R_K / junction.R_T;
    return -constants::e * prefactor *
           (forward_rate(-eV, junction, quad) - forward_rate(eV, junction, quad));
}

}  // namespace qcrlab
