#ifndef TOROIDSIM_UNITS_HPP
#define TOROIDSIM_UNITS_HPP

#include <string>

// Unit conventions used throughout:
//   * internal: strict SI, with every rate an angular frequency in rad/s
//   * human I/O: MHz for rate/2pi, nm, us, uK, pW, mK
// Keeping the 2pi inside the stored numbers means no module boundary ever
// has to guess whether a rate is angular or not.

namespace tsim {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double k_boltzmann = 1.380649e-23;   // J/K
inline constexpr double speed_of_light = 299792458.0; // m/s
inline constexpr double g_earth = 9.80665;            // m/s^2

inline constexpr double cesium_mass = 2.20694650e-25; // kg
inline constexpr double cs_d2_wavelength = 852.347e-9; // m

// rad/s for a rate quoted as nu = rate/2pi in MHz
inline constexpr double mhz(double nu_mhz) { return two_pi * 1e6 * nu_mhz; }

// Tagged linear conversions between human and SI units.
// to_human(to_si(x, tag), tag) == x holds exactly (single multiplication each way).
double to_si(double value, const std::string& unit_tag);
double to_human(double value, const std::string& unit_tag);

} // namespace tsim

#endif
