#pragma once

#include <cmath>
#include <cstdlib>

#include "constants.hpp"
#include "errors.hpp"

namespace qcrlab {

/// Resonator mode coupled to the refrigerator. Rates are angular (rad/s).
struct ResonatorParams {
    double omega_R = constants::two_pi * 4.671e9;
    double gamma_dr = constants::two_pi * 1.1e6;  // driveline coupling
    double gamma_0 = constants::two_pi * 1.3e6;   // excess losses
    double rho = 1e-3;                            // environment interaction parameter
    double n_c = 0.0;                             // population of the QCR-independent bath
    int n_max = 9;                                // Fock truncation

    double gamma_c() const { return gamma_dr + gamma_0; }

    void validate() const {
        require(std::isfinite(omega_R) && omega_R > 0.0, "omega_R must be positive");
        require(gamma_dr >= 0.0 && gamma_0 >= 0.0, "coupling rates must be nonnegative");
        require(rho > 0.0 && rho < 1.0, "rho must lie in (0, 1)");
        require(n_c >= 0.0, "n_c must be nonnegative");
        require(n_max >= 5, "n_max must be at least 5");
    }

    bool operator==(const ResonatorParams&) const = default;
};

/// Squared matrix element of the resonator-junction coupling in the
/// single-photon, low-impedance model: 1 on the diagonal, m*rho for
/// m -> m-1 and (m+1)*rho for m -> m+1, zero otherwise.
inline double matrix_element_sq(int m, int m_prime, double rho) {
    require(m >= 0 && m_prime >= 0, "Fock indices must be nonnegative");
    if (m == m_prime) return 1.0;
    if (m_prime == m - 1) return m * rho;
    if (m_prime == m + 1) return (m + 1) * rho;
    return 0.0;
}

}  // namespace qcrlab
