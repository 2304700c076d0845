#pragma once

#include <cmath>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "junction.hpp"
#include "resonator_params.hpp"

namespace qcrlab {

/// V(t) = V_dc + V_ac cos(omega_ac t).
struct DriveCondition {
    double V_dc = 0.0;
    double V_ac = 0.0;
    double omega_ac = constants::two_pi * 3.6e9;

    void validate() const {
        require(std::isfinite(V_dc), "V_dc must be finite");
        require(std::isfinite(V_ac) && V_ac >= 0.0, "V_ac must be nonnegative");
        require(V_ac == 0.0 || omega_ac > 0.0, "omega_ac must be positive when V_ac > 0");
    }

    /// eV_ac / (hbar omega_ac)
    double bessel_argument() const {
        return V_ac == 0.0 ? 0.0 : constants::e * V_ac / (constants::hbar * omega_ac);
    }

    DriveCondition with_dc(double v) const {
        DriveCondition out = *this;
        out.V_dc = v;
        return out;
    }
};

inline constexpr double kDefaultBesselTail = 1e-9;

/// Amplitude reaching the junction for incident power P_N on a line of
/// impedance Z_0; the factor 2 is the voltage transmission coefficient at a
/// strongly mismatched interface.
inline double vac_from_power(double P_N, double Z_0) {
    require(P_N >= 0.0, "power must be nonnegative");
    require(Z_0 > 0.0, "impedance must be positive");
    return 2.0 * std::sqrt(2.0 * P_N * Z_0);
}

inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

inline double watt_to_dbm(double watt) {
    require(watt > 0.0, "power must be positive to express in dBm");
    return 10.0 * std::log10(watt / 1e-3);
}

/// Photon-assisted sideband weights J_k(x)^2 for |k| <= K.
struct PatWeights {
    struct Term {
        int k;
        double weight;
    };
    double x = 0.0;
    int K = 0;
    std::vector<Term> terms;  // ordered k = -K..K

    double total() const {
        double s = 0.0;
        for (const auto& t : terms) s += t.weight;
        return s;
    }
};

/// Smallest symmetric truncation K with 1 - sum_{|k|<=K} J_k(x)^2 < tail_tol.
inline PatWeights pat_weights(double x, double tail_tol = kDefaultBesselTail) {
    require(std::isfinite(x) && x >= 0.0, "Bessel argument must be nonnegative");
    require(tail_tol > 0.0 && tail_tol <= 1e-6, "tail_tol must lie in (0, 1e-6]");
    PatWeights out;
    out.x = x;
    std::vector<double> half;  // J_k(x)^2 for k = 0..K
    if (x == 0.0) {
        half.push_back(1.0);
    } else {
        const int k_limit = static_cast<int>(x) + 200;
        double sum = 0.0;
        for (int k = 0; k <= k_limit; ++k) {
            const double j = std::cyl_bessel_j(static_cast<double>(k), x);
            half.push_back(j * j);
            sum += (k == 0 ? 1.0 : 2.0) * j * j;
            if (1.0 - sum < tail_tol) break;
        }
    }
    out.K = static_cast<int>(half.size()) - 1;
    out.terms.reserve(2 * half.size() - 1);
    for (int k = -out.K; k <= out.K; ++k) out.terms.push_back({k, half[static_cast<std::size_t>(std::abs(k))]});
    return out;
}

enum class Direction { Forward, Backward };

namespace detail {

// sum_k J_k^2 F(sign * (-eV_dc + k hbar omega_ac) + photon_energy)
inline double sideband_sum(double sign, const DriveCondition& drive, double photon_energy,
                           const PatWeights& weights, const JunctionParams& junction,
                           const QuadratureConfig& quad) {
    const double eV = constants::e * drive.V_dc;
    const double quantum = constants::hbar * drive.omega_ac;
    double sum = 0.0;
    for (const auto& term : weights.terms) {
        const double E = sign * (-eV + term.k * quantum) + photon_energy;
        sum += term.weight * forward_rate(E, junction, quad);
    }
    return sum;
}

}  // namespace detail

/// Resonator transition rate m -> m' (s^-1) from photon-assisted tunneling.
/// The backward rate is the forward rate at reversed bias, both dc and ac.
inline double transition_rate(int m, int m_prime, Direction direction, const DriveCondition& drive,
                              const JunctionParams& junction, const ResonatorParams& resonator,
                              const QuadratureConfig& quad, double tail_tol = kDefaultBesselTail) {
    drive.validate();
    const double m2 = matrix_element_sq(m, m_prime, resonator.rho);
    if (m2 == 0.0) return 0.0;
    const auto weights = pat_weights(drive.bessel_argument(), tail_tol);
    const double photon = constants::hbar * resonator.omega_R * (m - m_prime);
    const double sign = direction == Direction::Forward ? 1.0 : -1.0;
    return m2 * (constants::R_K / junction.R_T) *
           detail::sideband_sum(sign, drive, photon, weights, junction, quad);
}

/// Quasiparticle current neglecting inelastic processes,
/// I = -e [Gamma_00(V) - Gamma_00(-V)].
inline double tunneling_current(const DriveCondition& drive, const JunctionParams& junction,
                                const QuadratureConfig& quad, double tail_tol = kDefaultBesselTail) {
    drive.validate();
    if (drive.V_dc == 0.0) return 0.0;
    const auto weights = pat_weights(drive.bessel_argument(), tail_tol);
    const double forward = detail::sideband_sum(1.0, drive, 0.0, weights, junction, quad);
    const double backward = detail::sideband_sum(-1.0, drive, 0.0, weights, junction, quad);
    return -constants::e * (constants::R_K / junction.R_T) * (forward - backward);
}

}  // namespace qcrlab
