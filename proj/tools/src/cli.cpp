#include "cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ionchain/constants.hpp"
#include "ionchain/errors.hpp"

namespace ionchain::cli {

using nlohmann::json;
using constants::two_pi;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void bad_field(const std::string& path, const std::string& why) {
  throw ConfigError("config field \"" + path + "\" " + why);
}

void check_keys(const json& j, const std::string& path,
                const std::vector<std::string>& allowed) {
  if (!j.is_object()) bad_field(path, "must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown config field \"" + (path.empty() ? key : path + "." + key) +
                        "\"");
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) bad_field(path, "must be a number");
  return j.get<double>();
}

int get_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad_field(path, "must be an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) bad_field(path, "must be a string");
  return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) bad_field(path, "must be a boolean");
  return j.get<bool>();
}

std::vector<std::string> get_string_list(const json& j, const std::string& path) {
  if (!j.is_array()) bad_field(path, "must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) bad_field(path, "must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

// Dotted-path assignment used by --set; intermediate non-objects are replaced.
void set_path(json& root, const std::string& dotted, json value) {
  json* node = &root;
  size_t start = 0;
  while (true) {
    const size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot - start);
    if (key.empty()) throw ConfigError("--set path \"" + dotted + "\" has an empty segment");
    if (dot == std::string::npos) {
      if (!node->is_object()) *node = json::object();
      (*node)[key] = std::move(value);
      return;
    }
    if (!node->is_object()) *node = json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

std::pair<int, int> line_column(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

double GateConfig::nbar_for(const std::string& mode_label) const {
  auto it = nbar_per_mode.find(mode_label);
  return it == nbar_per_mode.end() ? nbar_default : it->second;
}

json default_config_json() {
  json j;
  j["crystal"] = {{"ions", {"40Ca+", "88Sr+"}},
                  {"reference_species", "88Sr+"},
                  {"reference_frequency_hz", 660e3}};
  j["lasers"] = json::array();
  j["oracle"] = {{"enabled", false}, {"n_max", 24}, {"hamiltonian", "lamb_dicke"}};
  j["scan"] = {{"pool", {"40Ca+", "43Ca+", "88Sr+", "86Sr+"}}, {"window_khz", 50.0}};
  j["output"] = {{"format", "table"}, {"path", "ionchain_run"}};
  return j;
}

json load_config(const std::optional<std::string>& path,
                 const std::vector<std::string>& overrides) {
  json merged = default_config_json();

  if (path) {
    std::ifstream in(*path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file \"" + *path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    json file;
    try {
      file = json::parse(text);
    } catch (const json::parse_error& e) {
      auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
      throw ConfigError("config file \"" + *path + "\": JSON syntax error at line " +
                        std::to_string(line) + ", column " + std::to_string(col));
    }
    if (!file.is_object()) throw ConfigError("config file must contain a JSON object");
    merged.merge_patch(file);
  }

  for (const auto& kv : overrides) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--set expects key=value, got \"" + kv + "\"");
    const std::string key = kv.substr(0, eq);
    const std::string raw = kv.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;  // bare strings need no quotes
    }
    set_path(merged, key, std::move(value));
  }
  return merged;
}

RunConfig parse_config(const json& merged) {
  RunConfig cfg;
  cfg.effective = merged;
  check_keys(merged, "", {"crystal", "lasers", "gate", "oracle", "scan", "output"});

  const json& crystal = merged.at("crystal");
  check_keys(crystal, "crystal", {"ions", "reference_species", "reference_frequency_hz"});
  if (crystal.contains("ions")) cfg.ions = get_string_list(crystal["ions"], "crystal.ions");
  if (cfg.ions.empty()) bad_field("crystal.ions", "must name at least one ion");
  if (crystal.contains("reference_species"))
    cfg.reference_species = get_string(crystal["reference_species"], "crystal.reference_species");
  if (crystal.contains("reference_frequency_hz"))
    cfg.reference_frequency_hz =
        get_number(crystal["reference_frequency_hz"], "crystal.reference_frequency_hz");
  if (!(cfg.reference_frequency_hz > 0))
    bad_field("crystal.reference_frequency_hz", "must be positive");

  if (merged.contains("lasers")) {
    const json& lasers = merged.at("lasers");
    if (!lasers.is_array()) bad_field("lasers", "must be an array");
    for (size_t i = 0; i < lasers.size(); ++i) {
      const std::string path = "lasers[" + std::to_string(i) + "]";
      const json& l = lasers[i];
      check_keys(l, path,
                 {"species", "wavevector_axis_projection", "intensity_rel", "carrier_rabi_hz",
                  "wavelength_nm"});
      LaserConfig lc;
      if (!l.contains("species")) bad_field(path + ".species", "is required");
      lc.species = get_string(l["species"], path + ".species");
      if (l.contains("wavevector_axis_projection"))
        lc.axis_projection =
            get_number(l["wavevector_axis_projection"], path + ".wavevector_axis_projection");
      if (std::abs(lc.axis_projection) > 1.0)
        bad_field(path + ".wavevector_axis_projection", "must lie in [-1, 1]");
      if (l.contains("intensity_rel"))
        lc.intensity_rel = get_number(l["intensity_rel"], path + ".intensity_rel");
      if (lc.intensity_rel < 0) bad_field(path + ".intensity_rel", "must be non-negative");
      if (l.contains("carrier_rabi_hz"))
        lc.carrier_rabi_hz = get_number(l["carrier_rabi_hz"], path + ".carrier_rabi_hz");
      if (l.contains("wavelength_nm")) {
        lc.wavelength_nm = get_number(l["wavelength_nm"], path + ".wavelength_nm");
        if (!(*lc.wavelength_nm > 0)) bad_field(path + ".wavelength_nm", "must be positive");
      }
      cfg.lasers.push_back(std::move(lc));
    }
  }

  if (merged.contains("gate")) {
    cfg.gate_given = true;
    const json& gate = merged.at("gate");
    check_keys(gate, "gate",
               {"mode", "gate_time_us", "detuning_hz", "loops", "ramp_fraction", "nbar",
                "bell_phase"});
    if (gate.contains("mode")) cfg.gate.mode = get_string(gate["mode"], "gate.mode");
    if (gate.contains("gate_time_us"))
      cfg.gate.gate_time_us = get_number(gate["gate_time_us"], "gate.gate_time_us");
    if (gate.contains("detuning_hz"))
      cfg.gate.detuning_hz = get_number(gate["detuning_hz"], "gate.detuning_hz");
    if (cfg.gate.gate_time_us.has_value() == cfg.gate.detuning_hz.has_value())
      throw ConfigError("exactly one of gate.gate_time_us and gate.detuning_hz must be set");
    if (gate.contains("loops")) cfg.gate.loops = get_integer(gate["loops"], "gate.loops");
    if (cfg.gate.loops < 1) bad_field("gate.loops", "must be at least 1");
    if (gate.contains("ramp_fraction"))
      cfg.gate.ramp_fraction = get_number(gate["ramp_fraction"], "gate.ramp_fraction");
    if (cfg.gate.ramp_fraction < 0 || cfg.gate.ramp_fraction > 0.5)
      bad_field("gate.ramp_fraction", "must lie in [0, 0.5]");
    if (gate.contains("nbar")) {
      const json& nbar = gate["nbar"];
      if (nbar.is_number()) {
        cfg.gate.nbar_default = nbar.get<double>();
      } else if (nbar.is_object()) {
        for (const auto& [mode, value] : nbar.items())
          cfg.gate.nbar_per_mode[mode] = get_number(value, "gate.nbar." + mode);
      } else {
        bad_field("gate.nbar", "must be a number or an object keyed by mode");
      }
      if (cfg.gate.nbar_default < 0) bad_field("gate.nbar", "must be non-negative");
      for (const auto& [mode, value] : cfg.gate.nbar_per_mode)
        if (value < 0) bad_field("gate.nbar." + mode, "must be non-negative");
    }
    if (gate.contains("bell_phase"))
      cfg.gate.bell_phase = get_number(gate["bell_phase"], "gate.bell_phase");
  }

  if (merged.contains("oracle")) {
    const json& oracle = merged.at("oracle");
    check_keys(oracle, "oracle", {"enabled", "n_max", "hamiltonian"});
    if (oracle.contains("enabled"))
      cfg.oracle.enabled = get_bool(oracle["enabled"], "oracle.enabled");
    if (oracle.contains("n_max")) cfg.oracle.n_max = get_integer(oracle["n_max"], "oracle.n_max");
    if (oracle.contains("hamiltonian")) {
      cfg.oracle.hamiltonian = lower(get_string(oracle["hamiltonian"], "oracle.hamiltonian"));
      if (cfg.oracle.hamiltonian == "ld") cfg.oracle.hamiltonian = "lamb_dicke";
      if (cfg.oracle.hamiltonian != "full" && cfg.oracle.hamiltonian != "lamb_dicke")
        bad_field("oracle.hamiltonian", "must be \"full\" or \"lamb_dicke\"");
    }
  }

  if (merged.contains("scan")) {
    const json& scan = merged.at("scan");
    check_keys(scan, "scan", {"pool", "window_khz"});
    if (scan.contains("pool")) cfg.scan.pool = get_string_list(scan["pool"], "scan.pool");
    if (scan.contains("window_khz"))
      cfg.scan.window_khz = get_number(scan["window_khz"], "scan.window_khz");
    if (cfg.scan.window_khz < 0) bad_field("scan.window_khz", "must be non-negative");
  }

  if (merged.contains("output")) {
    const json& output = merged.at("output");
    check_keys(output, "output", {"format", "path"});
    if (output.contains("format")) {
      cfg.output.format = lower(get_string(output["format"], "output.format"));
      if (cfg.output.format != "table" && cfg.output.format != "csv" &&
          cfg.output.format != "json")
        bad_field("output.format", "must be \"table\", \"csv\" or \"json\"");
    }
    if (output.contains("path")) cfg.output.path = get_string(output["path"], "output.path");
  }

  // Resolve labels eagerly so typos surface as config errors.
  for (const auto& label : cfg.ions) species::lookup(label);
  species::lookup(cfg.reference_species);
  for (const auto& l : cfg.lasers) species::lookup(l.species);
  return cfg;
}

crystal::CrystalConfig make_crystal(const RunConfig& cfg) {
  crystal::CrystalConfig c;
  for (const auto& label : cfg.ions) c.ions.push_back(species::lookup(label));
  c.reference_species = species::lookup(cfg.reference_species);
  c.reference_frequency = two_pi * cfg.reference_frequency_hz;
  return c;
}

std::vector<coupling::LaserField> make_lasers(const RunConfig& cfg) {
  std::vector<coupling::LaserField> fields;
  auto add_default = [&](const std::string& label) {
    for (const auto& f : fields)
      if (f.target_species == label) return;
    fields.push_back({label, species::lookup(label).wavevector(), 1.0, std::nullopt});
  };
  if (cfg.lasers.empty()) {
    for (const auto& label : cfg.ions) add_default(label);
    return fields;
  }
  for (const auto& lc : cfg.lasers) {
    const auto& sp = species::lookup(lc.species);
    const double wavelength =
        lc.wavelength_nm ? *lc.wavelength_nm * 1e-9 : sp.qubit_wavelength;
    coupling::LaserField f;
    f.target_species = lc.species;
    f.wavevector_projection = lc.axis_projection * two_pi / wavelength;
    f.intensity_rel = lc.intensity_rel;
    if (lc.carrier_rabi_hz) f.carrier_rabi = two_pi * *lc.carrier_rabi_hz;
    fields.push_back(std::move(f));
  }
  for (const auto& label : cfg.ions) add_default(label);
  return fields;
}

std::vector<species::IonSpecies> make_pool(const RunConfig& cfg) {
  std::vector<species::IonSpecies> pool;
  for (const auto& label : cfg.scan.pool) pool.push_back(species::lookup(label));
  return pool;
}

std::string chain_name(const std::vector<species::IonSpecies>& ions) {
  std::string name;
  for (size_t i = 0; i < ions.size(); ++i) {
    if (i) name += "-";
    std::string label = ions[i].label;
    if (!label.empty() && label.back() == '+') label.pop_back();
    name += label;
  }
  return name;
}

std::string display_mode(const std::string& label) {
  if (label == "IP") return "In-phase";
  if (label == "OOP") return "Out-of-phase";
  if (label == "Stretch") return "Stretch";
  if (label == "Alt") return "Alternating";
  return label;
}

std::string resolve_mode(const std::string& name) {
  const std::string n = lower(name);
  if (n == "ip" || n == "in-phase" || n == "inphase") return "IP";
  if (n == "oop" || n == "out-of-phase" || n == "outofphase") return "OOP";
  if (n == "stretch") return "Stretch";
  if (n == "alt" || n == "alternating") return "Alt";
  return name;
}

std::string fmt_ratio(double v) {
  const double r = std::round(v);
  if (std::abs(v - r) < 1e-12) {
    const long long i = static_cast<long long>(r);
    return std::to_string(i == 0 ? 0 : i);  // avoid "-0"
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string fmt_khz(double omega) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", omega / (two_pi * 1e3));
  return buf;
}

std::string fmt_sig(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt_freq_label(double omega) {
  return "2pi x " + fmt_khz(omega) + " kHz";
}

bool use_color() {
  return isatty(fileno(stdout)) != 0 && std::getenv("NO_COLOR") == nullptr;
}

std::string TextTable::render(bool color) const {
  std::vector<size_t> width(header.size(), 0);
  auto grow = [&](const std::vector<std::string>& row) {
    for (size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  };
  grow(header);
  for (const auto& row : rows) grow(row);

  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (size_t c = 0; c < row.size(); ++c) {
      out << row[c];
      if (c + 1 < row.size()) out << std::string(width[c] - row[c].size() + 2, ' ');
    }
    out << '\n';
  };
  if (color) out << "\x1b[1m";
  emit(header);
  if (color) out << "\x1b[0m";
  for (const auto& row : rows) emit(row);
  return out.str();
}

}  // namespace ionchain::cli
