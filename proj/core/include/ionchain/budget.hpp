#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ionchain/coupling.hpp"

namespace ionchain::budget {

// One motional sideband of the two-photon drive, at a signed offset from the
// carrier.  combo holds (mode label, signed quantum count), e.g. {(IP, +2)}
// for the second-order line at 2 w_IP or {(OOP, +1), (IP, -1)} for the
// difference line.  strength is a dimensionless eta-product proxy, not a rate.
struct SpectralLine {
  std::vector<std::pair<std::string, int>> combo;
  double offset = 0;   // rad/s
  int order = 1;       // total quanta exchanged
  double strength = 0;

  std::string describe() const;
};

struct SidebandSpectrum {
  std::vector<SpectralLine> lines;  // ascending offset
};

struct DegeneratePair {
  SpectralLine a, b;     // a.offset <= b.offset
  double gap = 0;        // rad/s
  bool gate_relevant = false;  // at least one first-order line involved
};

// Spin-flip error from a spectator collision line: a residual coherent
// displacement alpha on the collision mode gives epsilon = |alpha|^2 (nbar + 1/2).
struct ErrorBudget {
  std::string gate_mode;
  std::string collision_line;
  double detuning = 0;          // drive offset from the collision resonance, rad/s
  double gap = 0;               // 2 w_IP - w_OOP, rad/s
  double displacement_sq = 0;   // |alpha|^2
  double nbar = 0;
  int loops = 1;
  double epsilon = 0;
};

// All first- and second-order sidebands (+-w, +-2w, +-(w +- w')) with
// eta-product strengths.
SidebandSpectrum sideband_spectrum(const crystal::ModeTable&, const coupling::CouplingTable&,
                                   int max_order = 2);

// Pairs of positive-offset lines closer than window, sorted by gap.
std::vector<DegeneratePair> find_near_degeneracies(const SidebandSpectrum&, double window);

// Residual displacement on collision_mode when the two-photon drive sits at
// drive_frequency for a square pulse of length gate_time:
// alpha = (1/2) sum_j eta_j^2 Omega_j * int_0^tg exp(-i (drive - 2 w_col) t) dt.
std::complex<double> displacement_alpha(const coupling::CouplingTable&,
                                        const std::string& collision_mode,
                                        const std::array<double, 2>& carrier_rabi,
                                        double drive_frequency, double gate_time);

// Worst case for the two-ion dual-species chain: a gate driven on OOP whose
// two-photon drive lands exactly on the second-order 2 x IP line, with the
// calibrated Rabi rates.  epsilon = (pi^2 K / 16)(nbar + 1/2)
// (sum_j eta_jIP^2 / eta_jOOP)^2, evaluated at the requested IP frequency.
ErrorBudget error_2xIP(const crystal::CrystalConfig&, double omega_ip, double nbar,
                       int loops = 1);

struct ScanRow {
  std::string configuration;   // e.g. "40Ca-88Sr-40Ca"
  std::string mode;            // display label
  double frequency = 0;        // rad/s
  double freq_ratio_ref = 0;   // w / w_ref
  double freq_ratio_ip = 0;    // w / w_IP
  std::vector<double> b;       // per species column
  std::vector<double> eta;     // per species column, magnitudes
  double min_gap = 0;          // rad/s, smallest gate-relevant spectral gap of the config
};

struct ScanTable {
  std::vector<std::string> species_columns;  // element symbols, reference element first
  std::vector<ScanRow> rows;
};

// Mode structure of every two-ion and symmetric three-ion chain buildable
// from the isotope pool.  The heavier element provides the reference isotope
// per configuration, held at reference_frequency.
ScanTable isotope_scan(const std::vector<species::IonSpecies>& pool, double reference_frequency,
                       bool two_ion = true, bool three_ion_symmetric = true);

// Configuration names ordered by decreasing minimal spectral gap.
std::vector<std::string> rank_configurations_by_gap(const ScanTable&);

struct ModeRecommendation {
  std::string mode;
  double frequency = 0;      // rad/s
  double margin = 0;         // rad/s to the nearest other spectral line
  std::string nearest;       // description of that line
  double min_eta = 0;        // smallest |eta| over the chain
  bool decoupled = false;    // some chain ion has eta = 0 on this mode
  std::optional<double> epsilon;  // 2xIP collision estimate where applicable
  bool pass = false;         // margin clears window plus the largest detuning
};

// Ranks candidate gate modes for gate times in [gate_time_min, gate_time_max]:
// margin first (ties by larger min eta), decoupled modes rejected, and the
// pass flag requires margin >= window + 2 pi / gate_time_min.
std::vector<ModeRecommendation> mode_advisor(const crystal::CrystalConfig&, double gate_time_min,
                                             double gate_time_max, double window);

}  // namespace ionchain::budget
