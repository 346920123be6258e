#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ionchain/species.hpp"

namespace ionchain::crystal {

// Linear chain in a harmonic axial well.  The well is specified through the
// axial frequency a single ion of reference_species would have in it, so the
// curvature m_ref * w_ref^2 is fixed and every other species sees it scaled by
// its own mass.  The reference species need not be part of the chain.
struct CrystalConfig {
  std::vector<species::IonSpecies> ions;  // ordered along the axis, left to right
  species::IonSpecies reference_species;
  double reference_frequency = 0;         // rad/s
};

struct Mode {
  std::string label;      // "IP", "OOP", "Stretch", "Alt", or "modeN"
  double frequency = 0;   // rad/s
  Eigen::VectorXd b;      // mass-weighted amplitudes, unit norm
};

struct ModeTable {
  std::vector<species::IonSpecies> ions;  // chain order, matches b components
  std::vector<Mode> modes;                // ascending frequency
  std::vector<double> positions;          // equilibrium positions, m

  const Mode& at(const std::string& label) const;  // ConfigError if absent
  int index_of(const std::string& label) const;    // -1 if absent
};

// Length unit l with l^3 = e^2 / (4 pi eps0 m_ref w_ref^2).
double length_scale(const CrystalConfig&);

// Equilibrium of the dimensionless chain potential sum(u_i^2)/2 + sum 1/|u_i-u_j|.
// Mass independent; strictly increasing; gradient below 1e-12 at the returned point.
std::vector<double> equilibrium_dimensionless(int n_ions);

std::vector<double> equilibrium_positions(const CrystalConfig&);  // meters

// Axial normal modes from the mass-weighted Hessian at equilibrium.
// Eigenvectors are orthonormal and stored with their first non-zero component
// positive; the lowest mode is labelled IP.
ModeTable normal_modes(const CrystalConfig&);

// Independent closed forms for the two chain shapes with known analytic spectra.
// reference_frequency is the single-ion axial frequency of `heavy` / `outer`.
// Components are ordered (heavy, light) and (outer, center, outer).
ModeTable closed_form_two_ion(const species::IonSpecies& heavy,
                              const species::IonSpecies& light,
                              double reference_frequency);
ModeTable closed_form_three_ion_symmetric(const species::IonSpecies& outer,
                                          const species::IonSpecies& center,
                                          double reference_frequency);

// w_OOP / w_IP for a two-ion chain as a function of the mass ratio mu = m_h/m_l.
double two_ion_frequency_ratio(double mu);

}  // namespace ionchain::crystal
