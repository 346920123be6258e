#pragma once

// CODATA 2018 constants, SI units throughout.
namespace ionchain::constants {

inline constexpr double hbar = 1.054571817e-34;                // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double vacuum_permittivity = 8.8541878128e-12;// F / m
inline constexpr double elementary_charge = 1.602176634e-19;   // C

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double two_pi = 2.0 * pi;

struct PhysicalConstants {
  double hbar;
  double atomic_mass_unit;
  double vacuum_permittivity;
  double elementary_charge;
};

constexpr PhysicalConstants physical_constants() {
  return {hbar, atomic_mass_unit, vacuum_permittivity, elementary_charge};
}

}  // namespace ionchain::constants
