// units.hpp — unit conventions and physical constants.
//
// Internal convention: hbar = 1, time in nanoseconds, every energy or
// coupling stored as an angular frequency in rad/ns.  Device inputs are
// quoted as nu = omega/(2*pi) in MHz or GHz, so conversion helpers live
// here and nowhere else.

#pragma once

#include <cmath>

namespace bhsim {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// CODATA 2018 exact values.
inline constexpr double planck_J_s = 6.62607015e-34;
inline constexpr double boltzmann_J_per_K = 1.380649e-23;

// nu in MHz  ->  omega in rad/ns  (1 MHz = 1e-3 cycles/ns)
inline constexpr double mhz_to_rad_ns(double nu_mhz) {
  return two_pi * nu_mhz * 1e-3;
}

// omega in rad/ns  ->  nu in MHz
inline constexpr double rad_ns_to_mhz(double omega) {
  return omega / two_pi * 1e3;
}

// nu in GHz  ->  omega in rad/ns
inline constexpr double ghz_to_rad_ns(double nu_ghz) {
  return two_pi * nu_ghz;
}

inline constexpr double rad_ns_to_ghz(double omega) { return omega / two_pi; }

}  // namespace bhsim
