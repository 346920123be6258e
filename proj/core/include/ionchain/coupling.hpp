#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ionchain/crystal.hpp"

namespace ionchain::coupling {

// One gate beam, addressing every ion of one species.
struct LaserField {
  std::string target_species;               // registry label
  double wavevector_projection = 0;         // rad/m, signed projection onto the axis
  double intensity_rel = 1.0;               // relative intensity
  std::optional<double> carrier_rabi;       // rad/s; overrides the intensity scaling
};

struct CouplingEntry {
  int ion = 0;
  std::string species;
  std::string mode;
  double mode_frequency = 0;      // rad/s
  double amplitude = 0;           // signed mass-weighted eigenvector component
  double ground_state_extent = 0; // sqrt(hbar / (2 m_j w_mode)), m
  double eta = 0;                 // |k_proj| * extent * |amplitude|
  double eta_signed = 0;          // eta with sign(k_proj * amplitude)
  double carrier_rabi = 0;        // rad/s
  double sideband_rabi = 0;       // eta * carrier_rabi, rad/s
};

struct CouplingTable {
  std::vector<species::IonSpecies> ions;   // chain order
  std::vector<std::string> mode_labels;    // ascending mode frequency
  std::vector<CouplingEntry> entries;      // ion-major, mode-minor
  std::vector<std::string> warnings;

  const CouplingEntry& at(int ion, const std::string& mode) const;
  std::vector<const CouplingEntry*> mode_entries(const std::string& mode) const;
};

// Lamb-Dicke parameters and sideband Rabi rates for every (ion, mode) pair.
// Every chain species needs a laser entry.  carrier_rabi_reference is the
// carrier Rabi rate (rad/s) at unit relative intensity and unit relative
// matrix element; a field's explicit carrier_rabi overrides it.
CouplingTable lamb_dicke(const crystal::ModeTable& modes,
                         const std::vector<LaserField>& lasers,
                         double carrier_rabi_reference = 0.0);

// Relative intensities per species that make eta_j * Omega_j equal to
// target_product (rad/s) for every ion on the given mode.  Species whose ions
// cannot reach a common product (or that are decoupled from the mode) raise
// ConfigError.
std::map<std::string, double> equalize_sideband_rabi(const CouplingTable& table,
                                                     const std::string& mode,
                                                     double target_product,
                                                     double carrier_rabi_reference);

}  // namespace ionchain::coupling
