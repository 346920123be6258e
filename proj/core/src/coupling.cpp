#include "ionchain/coupling.hpp"

#include <cmath>

#include "ionchain/constants.hpp"
#include "ionchain/errors.hpp"

namespace ionchain::coupling {

namespace {

const LaserField& field_for(const std::vector<LaserField>& lasers, const std::string& species) {
  for (const auto& f : lasers)
    if (f.target_species == species) return f;
  throw ConfigError("no laser field configured for species \"" + species + "\"");
}

double carrier_rabi_of(const LaserField& f, const species::IonSpecies& ion, double omega_ref) {
  if (f.carrier_rabi) return *f.carrier_rabi;
  if (f.intensity_rel < 0) throw ConfigError("relative intensity must be non-negative");
  // Omega scales with the field amplitude and the species' matrix element.
  return omega_ref * std::sqrt(f.intensity_rel) * ion.quad_matrix_element_rel;
}

}  // namespace

const CouplingEntry& CouplingTable::at(int ion, const std::string& mode) const {
  for (const auto& e : entries)
    if (e.ion == ion && e.mode == mode) return e;
  throw ConfigError("no coupling entry for ion " + std::to_string(ion) + ", mode \"" + mode + "\"");
}

std::vector<const CouplingEntry*> CouplingTable::mode_entries(const std::string& mode) const {
  std::vector<const CouplingEntry*> out;
  for (const auto& e : entries)
    if (e.mode == mode) out.push_back(&e);
  if (out.empty()) throw ConfigError("no mode labelled \"" + mode + "\" in this table");
  return out;
}

CouplingTable lamb_dicke(const crystal::ModeTable& modes, const std::vector<LaserField>& lasers,
                         double carrier_rabi_reference) {
  CouplingTable table;
  table.ions = modes.ions;
  for (const auto& m : modes.modes) table.mode_labels.push_back(m.label);

  for (int i = 0; i < static_cast<int>(modes.ions.size()); ++i) {
    const auto& ion = modes.ions[i];
    const auto& field = field_for(lasers, ion.label);
    const double k_max = ion.wavevector();
    if (std::abs(field.wavevector_projection) > k_max * (1.0 + 1e-12))
      throw ConfigError("wavevector projection exceeds 2 pi / lambda for \"" + ion.label + "\"");
    const double rabi = carrier_rabi_of(field, ion, carrier_rabi_reference);

    for (const auto& mode : modes.modes) {
      CouplingEntry e;
      e.ion = i;
      e.species = ion.label;
      e.mode = mode.label;
      e.mode_frequency = mode.frequency;
      e.amplitude = mode.b[i];
      e.ground_state_extent = std::sqrt(constants::hbar / (2.0 * ion.mass * mode.frequency));
      e.eta = std::abs(field.wavevector_projection) * e.ground_state_extent * std::abs(e.amplitude);
      const double sign = (field.wavevector_projection * e.amplitude < 0) ? -1.0 : 1.0;
      e.eta_signed = sign * e.eta;
      e.carrier_rabi = rabi;
      e.sideband_rabi = e.eta * rabi;
      if (e.eta > 0.3)
        table.warnings.push_back("eta = " + std::to_string(e.eta) + " for ion " +
                                 std::to_string(i) + " on mode " + mode.label +
                                 " is outside the Lamb-Dicke regime");
      table.entries.push_back(e);
    }
  }
  return table;
}

std::map<std::string, double> equalize_sideband_rabi(const CouplingTable& table,
                                                     const std::string& mode,
                                                     double target_product,
                                                     double carrier_rabi_reference) {
  if (!(target_product > 0)) throw ConfigError("target sideband product must be positive");
  if (!(carrier_rabi_reference > 0)) throw ConfigError("carrier Rabi reference must be positive");

  std::map<std::string, double> intensity;
  for (const auto* e : table.mode_entries(mode)) {
    const auto& ion = table.ions[e->ion];
    if (e->eta < 1e-12)
      throw ConfigError("ion " + std::to_string(e->ion) + " (" + ion.label +
                        ") is decoupled from mode \"" + mode + "\"");
    const double omega_needed = target_product / e->eta;
    const double amplitude = omega_needed / (carrier_rabi_reference * ion.quad_matrix_element_rel);
    const double i_rel = amplitude * amplitude;
    auto [it, inserted] = intensity.emplace(ion.label, i_rel);
    if (!inserted && std::abs(it->second - i_rel) > 1e-9 * std::max(it->second, i_rel))
      throw ConfigError("ions of species " + ion.label +
                        " need different intensities on mode \"" + mode +
                        "\"; per-species beams cannot equalize it");
  }
  return intensity;
}

}  // namespace ionchain::coupling
