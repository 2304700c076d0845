#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "constants.hpp"
#include "errors.hpp"
#include "junction.hpp"
#include "photon_assisted.hpp"
#include "resonator_params.hpp"

namespace qcrlab {

/// Photon absorption and emission rates summed over both bias polarities:
/// absorb = sum_tau Gamma_10(tau V), emit = sum_tau Gamma_01(tau V).
struct QcrRates {
    double absorb = 0.0;
    double emit = 0.0;

    /// QCR-induced decay rate.
    double gamma() const { return absorb - emit; }
};

inline QcrRates qcr_rates(const DriveCondition& drive, const JunctionParams& junction,
                          const ResonatorParams& resonator, const QuadratureConfig& quad,
                          double tail_tol = kDefaultBesselTail) {
    resonator.validate();
    QcrRates out;
    for (double tau : {1.0, -1.0}) {
        const auto d = drive.with_dc(tau * drive.V_dc);
        out.absorb += transition_rate(1, 0, Direction::Forward, d, junction, resonator, quad, tail_tol);
        out.emit += transition_rate(0, 1, Direction::Forward, d, junction, resonator, quad, tail_tol);
    }
    return out;
}

/// QCR-induced decay rate. A negative value (gain) is reported, not thrown.
struct DampingRate {
    double gamma = 0.0;  // rad/s
    bool negative_damping = false;

    double hz() const { return gamma / constants::two_pi; }
};

inline DampingRate gamma_qcr(const DriveCondition& drive, const JunctionParams& junction,
                             const ResonatorParams& resonator, const QuadratureConfig& quad,
                             double tail_tol = kDefaultBesselTail) {
    const double g = qcr_rates(drive, junction, resonator, quad, tail_tol).gamma();
    return {g, g < 0.0};
}

enum class TemperatureTag : std::uint8_t {
    Finite,
    Infinite,  // balanced absorption and emission
    Negative,  // emission exceeds absorption
    Undefined, // no tunneling channels at all
};

struct EffectiveTemperature {
    double kelvin = 0.0;
    TemperatureTag tag = TemperatureTag::Finite;
};

/// Effective bath temperature hbar omega_R / (k_B ln(absorb/emit)).
inline EffectiveTemperature temperature_from_rates(const QcrRates& rates, double omega_R) {
    const double quantum = constants::hbar * omega_R / constants::k_B;
    if (rates.absorb == 0.0 && rates.emit == 0.0) {
        return {std::numeric_limits<double>::quiet_NaN(), TemperatureTag::Undefined};
    }
    if (rates.emit == 0.0) return {0.0, TemperatureTag::Finite};
    if (rates.absorb == rates.emit) {
        return {std::numeric_limits<double>::infinity(), TemperatureTag::Infinite};
    }
    const double log_ratio = std::log(rates.absorb / rates.emit);
    if (log_ratio == 0.0) return {std::numeric_limits<double>::infinity(), TemperatureTag::Infinite};
    return {quantum / log_ratio, log_ratio > 0.0 ? TemperatureTag::Finite : TemperatureTag::Negative};
}

inline EffectiveTemperature t_qcr(const DriveCondition& drive, const JunctionParams& junction,
                                  const ResonatorParams& resonator, const QuadratureConfig& quad,
                                  double tail_tol = kDefaultBesselTail) {
    return temperature_from_rates(qcr_rates(drive, junction, resonator, quad, tail_tol),
                                  resonator.omega_R);
}

inline double bose_occupation(double T, double omega) {
    require(T > 0.0, "temperature must be positive");
    require(omega > 0.0, "frequency must be positive");
    return 1.0 / std::expm1(constants::hbar * omega / (constants::k_B * T));
}

inline double temp_from_occupation(double n_bar, double omega) {
    require(n_bar > 0.0, "occupation must be positive");
    require(omega > 0.0, "frequency must be positive");
    return constants::hbar * omega / (constants::k_B * std::log1p(1.0 / n_bar));
}

/// Rate-weighted average of two bath populations.
inline double weighted_population(double n_qcr, double gamma_qcr, double n_c, double gamma_c) {
    const double total = gamma_qcr + gamma_c;
    if (!(total > 0.0)) throw Error(ErrorCode::DivisionDegenerate, "gamma_QCR + gamma_c must be positive");
    return (n_qcr * gamma_qcr + n_c * gamma_c) / total;
}

struct SteadyState {
    double n_bar = 0.0;
    double gamma_qcr = 0.0;  // rad/s
    double n_qcr = 0.0;
    EffectiveTemperature t_qcr;
};

/// Steady-state thermal population of the resonator coupled to the QCR bath
/// and to the QCR-independent bath (population n_c, rate gamma_dr + gamma_0).
inline SteadyState steady_state_population(const DriveCondition& drive, const JunctionParams& junction,
                                           const ResonatorParams& resonator, const QuadratureConfig& quad,
                                           double tail_tol = kDefaultBesselTail) {
    const auto rates = qcr_rates(drive, junction, resonator, quad, tail_tol);
    SteadyState out;
    out.gamma_qcr = rates.gamma();
    out.t_qcr = temperature_from_rates(rates, resonator.omega_R);
    const double total = out.gamma_qcr + resonator.gamma_c();
    if (!(total > 0.0)) throw Error(ErrorCode::DivisionDegenerate, "gamma_QCR + gamma_c must be positive");
    // Bose population of the QCR bath is emit / (absorb - emit); its product
    // with gamma_QCR is simply the emission rate, which stays finite when the
    // bath temperature diverges.
    out.n_qcr = out.gamma_qcr != 0.0 ? rates.emit / out.gamma_qcr
                                     : std::numeric_limits<double>::infinity();
    out.n_bar = (rates.emit + resonator.n_c * resonator.gamma_c()) / total;
    return out;
}

/// Mean photon number of a resonantly, coherently driven resonator from the
/// power balance P_in (1 - |r|^2) = hbar omega_R n (gamma_QCR + gamma_0), with
/// reflection r = (gamma_dr - gamma_QCR - gamma_0)/(gamma_dr + gamma_QCR + gamma_0).
inline double coherent_population(double P_in, double gamma_qcr, const ResonatorParams& resonator) {
    require(P_in >= 0.0, "input power must be nonnegative");
    const double loss = gamma_qcr + resonator.gamma_0;
    if (loss == 0.0) throw Error(ErrorCode::DivisionDegenerate, "gamma_QCR + gamma_0 is zero");
    const double reflection = (resonator.gamma_dr - loss) / (resonator.gamma_dr + loss);
    return P_in * (1.0 - reflection * reflection) / (constants::hbar * resonator.omega_R * loss);
}

inline double coherent_population(double P_in, const DriveCondition& drive, const JunctionParams& junction,
                                  const ResonatorParams& resonator, const QuadratureConfig& quad,
                                  double tail_tol = kDefaultBesselTail) {
    return coherent_population(P_in, gamma_qcr(drive, junction, resonator, quad, tail_tol).gamma, resonator);
}

struct InferredDecay {
    double gamma_qcr = 0.0;    // rad/s
    double gamma_total = 0.0;  // gamma_QCR + gamma_dr + gamma_0, rad/s
};

/// Inverts coherent_population for gamma_QCR >= 0 by bracketed root finding.
inline InferredDecay infer_gamma_from_population(double n_obs, double P_in, const ResonatorParams& resonator) {
    require(n_obs > 0.0, "observed population must be positive");
    require(P_in > 0.0, "input power must be positive");
    auto residual = [&](double g) { return coherent_population(P_in, g, resonator) - n_obs; };

    const double scale = std::max(resonator.gamma_c(), 1.0);
    double lo = 0.0;
    if (resonator.gamma_0 == 0.0) lo = 1e-12 * scale;
    const double f_lo = residual(lo);
    if (f_lo < 0.0) {
        throw Error(ErrorCode::NoRootInBracket,
                    "observed population exceeds the zero-damping maximum " +
                        std::to_string(f_lo + n_obs));
    }
    if (f_lo == 0.0) return {lo, lo + resonator.gamma_c()};
    double hi = scale;
    while (residual(hi) > 0.0) {
        hi *= 4.0;
        if (!std::isfinite(hi) || hi > 1e30 * scale) {
            throw Error(ErrorCode::NoRootInBracket, "population too small to bracket");
        }
    }
    std::uintmax_t max_iter = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        residual, lo, hi, f_lo, residual(hi), boost::math::tools::eps_tolerance<double>(52), max_iter);
    const double g = 0.5 * (a + b);
    return {g, g + resonator.gamma_c()};
}

}  // namespace qcrlab
