#pragma once

#include <numbers>

namespace qcrlab::constants {

// CODATA 2018 exact SI values.
inline constexpr double e = 1.602176634e-19;     // C
inline constexpr double h = 6.62607015e-34;      // J s
inline constexpr double hbar = h / (2.0 * std::numbers::pi);
inline constexpr double k_B = 1.380649e-23;      // J/K
inline constexpr double R_K = h / (e * e);       // von Klitzing constant, Ohm
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double eV = e;                  // J per eV
inline constexpr double micro_eV = 1e-6 * e;

}  // namespace qcrlab::constants
