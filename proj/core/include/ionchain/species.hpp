#pragma once

#include <string>
#include <vector>

#include "ionchain/constants.hpp"

namespace ionchain::species {

// One ion species usable in a chain.  Qubits are optical S-D quadrupole qubits;
// |1> is the bright (fluorescing) S level, |0> the shelved D level.
struct IonSpecies {
  std::string label;                    // registry key, e.g. "40Ca+"
  int mass_number = 0;                  // A
  double mass = 0;                      // kg; defaults to A * atomic mass unit
  double qubit_wavelength = 0;          // m, qubit transition driven by the gate laser
  double quad_matrix_element_rel = 1.0; // quadrupole matrix element relative to Sr+
  double heating_rate_ref = 0;          // quanta/s measured datum (0 if not available)
  double heating_rate_ref_frequency = 0;// rad/s trap frequency of that datum

  // Magnitude of the qubit-laser wavevector, rad/m.
  double wavevector() const { return constants::two_pi / qubit_wavelength; }

  // Copy with a precise isotopic mass (in atomic mass units) replacing the
  // integer-mass-number default.
  IonSpecies with_mass_amu(double amu) const {
    IonSpecies s = *this;
    s.mass = amu * constants::atomic_mass_unit;
    return s;
  }
};

// Registry lookup; throws UnknownSpeciesError for labels not in the registry.
const IonSpecies& lookup(const std::string& label);

std::vector<std::string> registered_labels();

// m_heavy / m_light.
double mass_ratio(const IonSpecies& heavy, const IonSpecies& light);

}  // namespace ionchain::species
