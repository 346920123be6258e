#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ionchain/budget.hpp"
#include "ionchain/coupling.hpp"
#include "ionchain/crystal.hpp"
#include "ionchain/msgate.hpp"

namespace ionchain::cli {

// Per-species gate beam.  axis_projection is the cosine of the angle between
// the wavevector and the chain axis (+-1 for axial beams, 0 decouples the
// species from axial motion).
struct LaserConfig {
  std::string species;
  double axis_projection = 1.0;
  double intensity_rel = 1.0;
  std::optional<double> carrier_rabi_hz;
  std::optional<double> wavelength_nm;
};

struct GateConfig {
  std::string mode = "IP";
  std::optional<double> gate_time_us;
  std::optional<double> detuning_hz;  // exactly one of the two must be set
  int loops = 1;
  double ramp_fraction = 0;           // sine^2 edge length as a fraction of the gate time
  double nbar_default = 0;
  std::map<std::string, double> nbar_per_mode;
  std::optional<double> bell_phase;   // target phase of (|00> + e^{i phi}|11>)/sqrt(2)

  double nbar_for(const std::string& mode_label) const;
};

struct OracleConfig {
  bool enabled = false;
  int n_max = 24;
  std::string hamiltonian = "lamb_dicke";  // "full" or "lamb_dicke"
};

struct ScanConfig {
  std::vector<std::string> pool = {"40Ca+", "43Ca+", "88Sr+", "86Sr+"};
  double window_khz = 50.0;  // non-angular kHz
};

struct OutputConfig {
  std::string format = "table";  // table | csv | json
  std::string path = "ionchain_run";
};

// All *_hz / *_khz / *_us fields are non-angular / SI-prefixed; angular
// frequencies appear only inside the library (2 pi conversion at this layer).
struct RunConfig {
  std::vector<std::string> ions = {"40Ca+", "88Sr+"};
  std::string reference_species = "88Sr+";
  double reference_frequency_hz = 660e3;
  std::vector<LaserConfig> lasers;  // empty: one axial beam per chain species

  bool gate_given = false;
  GateConfig gate;
  OracleConfig oracle;
  ScanConfig scan;
  OutputConfig output;

  nlohmann::json effective;  // the merged document, echoed into summaries
};

nlohmann::json default_config_json();

// defaults <- file (if any) <- --set overrides, in that order.
nlohmann::json load_config(const std::optional<std::string>& path,
                           const std::vector<std::string>& overrides);

// Validates field names and types; throws ConfigError naming the offending
// field (with line/column for syntax errors in load_config).
RunConfig parse_config(const nlohmann::json& merged);

crystal::CrystalConfig make_crystal(const RunConfig&);
std::vector<coupling::LaserField> make_lasers(const RunConfig&);
std::vector<species::IonSpecies> make_pool(const RunConfig&);

// "40Ca-88Sr" style chain name (labels joined without the charge suffix).
std::string chain_name(const std::vector<species::IonSpecies>&);

// Mode label <-> display name ("IP" <-> "In-phase", ...).  resolve accepts
// either form (case-insensitive) and returns the stored label.
std::string display_mode(const std::string& label);
std::string resolve_mode(const std::string& name);

// Fixed-format numbers: ratios/amplitudes at 3 decimals with exact integers
// collapsed ("1", "0"), frequencies as non-angular kHz at 3 decimals, and
// full-precision %.12g for CSV time series.
std::string fmt_ratio(double v);
std::string fmt_khz(double omega);  // omega in rad/s
std::string fmt_sig(double v);
std::string fmt_freq_label(double omega);  // "2pi x 660.000 kHz"

struct TextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string render(bool color) const;
};

bool use_color();

// Subcommand entry points; each returns a process exit code (0 on success,
// errors are thrown and mapped in main).
int cmd_modes(const RunConfig&);
int cmd_table(const RunConfig&, bool rank_gaps);
int cmd_gate(const RunConfig&, const std::optional<std::string>& output_override);
int cmd_budget(const RunConfig&, std::optional<double> ip_khz, std::optional<double> nbar,
               std::optional<int> loops);
int cmd_scan(const RunConfig&, std::optional<double> t_min_us, std::optional<double> t_max_us);
int cmd_degeneracies(const RunConfig&, std::optional<double> window_khz, int max_order,
                     bool list_lines);

}  // namespace ionchain::cli
