#pragma once

// CODATA 2018 exact / recommended values, SI units.
namespace qmep::constants {

inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double k_B = 1.380649e-23;            // J / K
inline constexpr double q_e = 1.602176634e-19;         // C
inline constexpr double m_e = 9.1093837015e-31;        // kg
inline constexpr double eV = q_e;                      // J
inline constexpr double pi = 3.14159265358979323846;

}  // namespace qmep::constants
