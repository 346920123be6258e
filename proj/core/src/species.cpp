#include "ionchain/species.hpp"

#include "ionchain/errors.hpp"

namespace ionchain::species {

namespace {

IonSpecies make(const std::string& label, int a, double lambda, double quad,
                double heat = 0, double heat_freq = 0) {
  IonSpecies s;
  s.label = label;
  s.mass_number = a;
  s.mass = a * constants::atomic_mass_unit;
  s.qubit_wavelength = lambda;
  s.quad_matrix_element_rel = quad;
  s.heating_rate_ref = heat;
  s.heating_rate_ref_frequency = heat_freq;
  return s;
}

// Ca+ qubits on the 729 nm S1/2 - D5/2 line, Sr+ on the 674 nm line.  The Ca+
// quadrupole matrix element is about 0.7x the Sr+ one, so equal sideband Rabi
// rates need about twice the intensity on Ca+.  Heating datum: 8.6 quanta/s for
// a single 40Ca+ at an axial frequency of 2pi x 1.94 MHz.
const std::vector<IonSpecies>& registry() {
  static const std::vector<IonSpecies> table = {
      make("40Ca+", 40, 729e-9, 0.70, 8.6, constants::two_pi * 1.94e6),
      make("43Ca+", 43, 729e-9, 0.70),
      make("86Sr+", 86, 674e-9, 1.00),
      make("88Sr+", 88, 674e-9, 1.00),
  };
  return table;
}

}  // namespace

const IonSpecies& lookup(const std::string& label) {
  for (const auto& s : registry())
    if (s.label == label) return s;
  throw UnknownSpeciesError(label);
}

std::vector<std::string> registered_labels() {
  std::vector<std::string> labels;
  for (const auto& s : registry()) labels.push_back(s.label);
  return labels;
}

double mass_ratio(const IonSpecies& heavy, const IonSpecies& light) {
  return heavy.mass / light.mass;
}

}  // namespace ionchain::species
