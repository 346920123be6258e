#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cli.hpp"
#include "ionchain/constants.hpp"
#include "ionchain/errors.hpp"

namespace ionchain::cli {

using nlohmann::json;
using constants::pi;
using constants::two_pi;

namespace {

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

// Appendix-style column order: ions of the reference species first, then the
// rest, both in chain order.
std::vector<int> display_order(const crystal::ModeTable& modes, const std::string& ref_label) {
  std::vector<int> order;
  const int n = static_cast<int>(modes.ions.size());
  for (int i = 0; i < n; ++i)
    if (modes.ions[i].label == ref_label) order.push_back(i);
  for (int i = 0; i < n; ++i)
    if (modes.ions[i].label != ref_label) order.push_back(i);
  return order;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file \"" + path + "\"");
  out << body;
  if (!out) throw ConfigError("failed writing output file \"" + path + "\"");
}

std::string csv_join(const std::vector<std::string>& cells) {
  std::string line;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ",";
    line += cells[i];
  }
  line += "\n";
  return line;
}

json scan_row_json(const budget::ScanRow& row, const std::vector<std::string>& cols) {
  json j;
  j["configuration"] = row.configuration;
  j["mode"] = row.mode;
  j["mode_display"] = display_mode(row.mode);
  j["frequency_hz"] = row.frequency / two_pi;
  j["freq_ratio_ref"] = row.freq_ratio_ref;
  j["freq_ratio_ip"] = row.freq_ratio_ip;
  for (size_t c = 0; c < cols.size(); ++c) {
    j["b"][cols[c]] = row.b[c];
    j["eta"][cols[c]] = row.eta[c];
  }
  j["min_gap_hz"] = row.min_gap / two_pi;
  return j;
}

}  // namespace

int cmd_modes(const RunConfig& cfg) {
  const auto cc = make_crystal(cfg);
  const auto modes = crystal::normal_modes(cc);
  const auto table = coupling::lamb_dicke(modes, make_lasers(cfg), 0.0);
  print_warnings(table.warnings);

  const auto order = display_order(modes, cfg.reference_species);
  const bool magnitudes = modes.ions.size() == 2;
  const double w_ip = modes.modes.front().frequency;

  if (cfg.output.format == "csv") {
    std::vector<std::string> header = {"mode", "frequency_hz", "freq_ratio_ref",
                                       "freq_ratio_ip"};
    const int n = static_cast<int>(modes.ions.size());
    for (int i = 0; i < n; ++i) header.push_back("b" + std::to_string(i));
    for (int i = 0; i < n; ++i) header.push_back("eta" + std::to_string(i));
    std::string body = csv_join(header);
    for (const auto& mode : modes.modes) {
      std::vector<std::string> cells = {mode.label, fmt_sig(mode.frequency / two_pi),
                                        fmt_sig(mode.frequency / cc.reference_frequency),
                                        fmt_sig(mode.frequency / w_ip)};
      for (int i = 0; i < n; ++i) cells.push_back(fmt_sig(mode.b[i]));
      for (int i = 0; i < n; ++i)
        cells.push_back(fmt_sig(table.at(i, mode.label).eta));
      body += csv_join(cells);
    }
    std::cout << body;
    return 0;
  }

  if (cfg.output.format == "json") {
    json j;
    j["configuration"] = chain_name(modes.ions);
    j["reference_species"] = cfg.reference_species;
    j["reference_frequency_hz"] = cfg.reference_frequency_hz;
    for (const auto& z : modes.positions) j["positions_um"].push_back(z * 1e6);
    for (const auto& mode : modes.modes) {
      json m;
      m["label"] = mode.label;
      m["display"] = display_mode(mode.label);
      m["frequency_hz"] = mode.frequency / two_pi;
      m["freq_ratio_ref"] = mode.frequency / cc.reference_frequency;
      m["freq_ratio_ip"] = mode.frequency / w_ip;
      for (int i = 0; i < mode.b.size(); ++i) {
        m["b"].push_back(mode.b[i]);
        m["eta"].push_back(table.at(i, mode.label).eta);
        m["eta_signed"].push_back(table.at(i, mode.label).eta_signed);
      }
      j["modes"].push_back(std::move(m));
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  std::cout << "Chain " << chain_name(modes.ions) << "  (reference " << cfg.reference_species
            << " at " << fmt_freq_label(cc.reference_frequency) << ")\n";
  std::ostringstream pos;
  for (size_t i = 0; i < modes.positions.size(); ++i) {
    if (i) pos << "  ";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", modes.positions[i] * 1e6);
    pos << buf;
  }
  std::cout << "Equilibrium positions (um): " << pos.str() << "\n\n";

  TextTable t;
  t.header = {"Mode", "w/w_ref", "w/w_IP"};
  for (int i : order) t.header.push_back("b(" + modes.ions[i].label + ")");
  for (int i : order) t.header.push_back("eta(" + modes.ions[i].label + ")");
  for (const auto& mode : modes.modes) {
    std::vector<std::string> row = {display_mode(mode.label),
                                    fmt_ratio(mode.frequency / cc.reference_frequency),
                                    fmt_ratio(mode.frequency / w_ip)};
    for (int i : order)
      row.push_back(fmt_ratio(magnitudes ? std::abs(mode.b[i]) : mode.b[i]));
    for (int i : order) row.push_back(fmt_ratio(table.at(i, mode.label).eta));
    t.add(std::move(row));
  }
  std::cout << t.render(use_color());
  return 0;
}

int cmd_table(const RunConfig& cfg, bool rank_gaps) {
  const auto pool = make_pool(cfg);
  const auto scan = budget::isotope_scan(pool, two_pi * cfg.reference_frequency_hz);
  const auto& cols = scan.species_columns;

  if (cfg.output.format == "csv") {
    std::vector<std::string> header = {"configuration", "mode", "freq_ratio_ref",
                                       "freq_ratio_ip"};
    for (const auto& c : cols) header.push_back("b_" + c);
    for (const auto& c : cols) header.push_back("eta_" + c);
    if (rank_gaps) header.push_back("min_gap_khz");
    std::string body = csv_join(header);
    for (const auto& row : scan.rows) {
      std::vector<std::string> cells = {row.configuration, display_mode(row.mode),
                                        fmt_ratio(row.freq_ratio_ref),
                                        fmt_ratio(row.freq_ratio_ip)};
      for (double b : row.b) cells.push_back(fmt_ratio(b));
      for (double e : row.eta) cells.push_back(fmt_ratio(e));
      if (rank_gaps) cells.push_back(fmt_khz(row.min_gap));
      body += csv_join(cells);
    }
    std::cout << body;
    return 0;
  }

  if (cfg.output.format == "json") {
    json j;
    j["reference_frequency_hz"] = cfg.reference_frequency_hz;
    j["species_columns"] = cols;
    for (const auto& row : scan.rows) j["rows"].push_back(scan_row_json(row, cols));
    if (rank_gaps) j["ranking_by_gap"] = budget::rank_configurations_by_gap(scan);
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  std::cout << "Mode survey of the isotope pool, heavier-element reference isotope held at "
            << fmt_freq_label(two_pi * cfg.reference_frequency_hz) << "\n\n";
  TextTable t;
  t.header = {"Configuration", "Mode", "w/w_ref", "w/w_IP"};
  for (const auto& c : cols) t.header.push_back("b(" + c + ")");
  for (const auto& c : cols) t.header.push_back("eta(" + c + ")");
  if (rank_gaps) t.header.push_back("gap(2pi kHz)");
  for (const auto& row : scan.rows) {
    std::vector<std::string> cells = {row.configuration, display_mode(row.mode),
                                      fmt_ratio(row.freq_ratio_ref),
                                      fmt_ratio(row.freq_ratio_ip)};
    for (double b : row.b) cells.push_back(fmt_ratio(b));
    for (double e : row.eta) cells.push_back(fmt_ratio(e));
    if (rank_gaps) cells.push_back(fmt_khz(row.min_gap));
    t.add(std::move(cells));
  }
  std::cout << t.render(use_color());

  if (rank_gaps) {
    std::cout << "\nConfigurations by smallest first-order-relevant sideband gap, widest "
                 "first:\n";
    const auto ranking = budget::rank_configurations_by_gap(scan);
    for (size_t i = 0; i < ranking.size(); ++i) {
      double gap = 0;
      for (const auto& row : scan.rows)
        if (row.configuration == ranking[i]) {
          gap = row.min_gap;
          break;
        }
      std::cout << "  " << i + 1 << ". " << ranking[i] << "  (gap " << fmt_freq_label(gap)
                << ")\n";
    }
  }
  return 0;
}

int cmd_gate(const RunConfig& cfg, const std::optional<std::string>& output_override) {
  if (!cfg.gate_given)
    throw ConfigError("the gate command needs a \"gate\" config block (or --set gate.* overrides)");

  const auto cc = make_crystal(cfg);
  const auto modes = crystal::normal_modes(cc);
  const auto table = coupling::lamb_dicke(modes, make_lasers(cfg), 0.0);
  print_warnings(table.warnings);

  const std::string mode = resolve_mode(cfg.gate.mode);
  double gate_time = 0;
  if (cfg.gate.gate_time_us) {
    gate_time = *cfg.gate.gate_time_us * 1e-6;
  } else {
    if (!(*cfg.gate.detuning_hz > 0)) throw ConfigError("gate.detuning_hz must be positive");
    gate_time = cfg.gate.loops / *cfg.gate.detuning_hz;
  }
  if (!(gate_time > 0)) throw ConfigError("gate.gate_time_us must be positive");

  auto p = msgate::calibrate_gate(table, mode, gate_time, cfg.gate.loops);
  if (cfg.gate.ramp_fraction > 0)
    p.ramp = {msgate::RampShape::sine_squared, cfg.gate.ramp_fraction * gate_time};
  p.nbar = cfg.gate.nbar_for(mode);
  if (cfg.gate.bell_phase) {
    const auto g = p.sideband_product();
    const double s = (g[0] * g[1] < 0) ? -1.0 : 1.0;
    const double common = 0.5 * (s * pi / 2 - *cfg.gate.bell_phase);
    p.drive_phase = {common, common};
  }

  std::vector<double> grid(201);
  for (size_t i = 0; i < grid.size(); ++i)
    grid[i] = gate_time * static_cast<double>(i) / (grid.size() - 1);

  msgate::Propagator prop = msgate::Propagator::analytic;
  msgate::MotionalSpec motion = p.nbar > 0 ? msgate::MotionalSpec::thermal(p.nbar)
                                           : msgate::MotionalSpec::ground_state();
  std::string prop_name = "analytic";
  if (cfg.oracle.enabled) {
    prop = cfg.oracle.hamiltonian == "full" ? msgate::Propagator::oracle_full
                                            : msgate::Propagator::oracle_lamb_dicke;
    prop_name = cfg.oracle.hamiltonian == "full" ? "oracle_full" : "oracle_lamb_dicke";
    motion = p.nbar > 0 ? msgate::MotionalSpec::thermal(p.nbar, cfg.oracle.n_max)
                        : msgate::MotionalSpec::ground_state(cfg.oracle.n_max);
  }

  const auto res = msgate::run_gate(p, motion, grid, prop, 65);

  const std::string prefix = output_override.value_or(cfg.output.path);
  std::string pop_csv = "times_us,P00,P1bright,P11\n";
  for (size_t i = 0; i < res.times.size(); ++i)
    pop_csv += csv_join({fmt_sig(res.times[i] * 1e6), fmt_sig(res.populations[i][0]),
                         fmt_sig(res.populations[i][1]), fmt_sig(res.populations[i][2])});
  std::string par_csv = "chi_rad,parity\n";
  for (const auto& pt : res.parity_fringe)
    par_csv += csv_join({fmt_sig(pt.chi), fmt_sig(pt.parity)});

  const int n_ions = static_cast<int>(modes.ions.size());
  json summary;
  summary["config"] = cfg.effective;
  summary["propagator"] = prop_name;
  json cal;
  cal["mode"] = mode;
  cal["mode_display"] = display_mode(mode);
  cal["mode_frequency_hz"] = p.mode_frequency / two_pi;
  cal["detuning_hz"] = p.detuning / two_pi;
  cal["gate_time_us"] = gate_time * 1e6;
  cal["loops"] = p.loops;
  cal["driven_ions"] = {0, n_ions - 1};
  cal["eta_signed"] = {p.eta[0], p.eta[1]};
  cal["carrier_rabi_hz"] = {p.carrier_rabi[0] / two_pi, p.carrier_rabi[1] / two_pi};
  cal["sideband_rabi_hz"] = {p.eta[0] * p.carrier_rabi[0] / two_pi,
                             p.eta[1] * p.carrier_rabi[1] / two_pi};
  cal["drive_phase_rad"] = {p.drive_phase[0], p.drive_phase[1]};
  cal["bell_phase_rad"] = p.bell_phase();
  cal["nbar"] = p.nbar;
  cal["ramp_us"] = p.ramp.shape == msgate::RampShape::none ? 0.0 : p.ramp.duration * 1e6;
  summary["calibration"] = std::move(cal);
  if (cfg.oracle.enabled) {
    summary["oracle"] = {{"hamiltonian", cfg.oracle.hamiltonian}, {"n_max", cfg.oracle.n_max}};
  }
  json results;
  results["contrast"] = res.contrast;
  results["fidelity"] = res.fidelity;
  results["fit_phase_rad"] = res.fit_phase;
  results["fit_offset"] = res.fit_offset;
  results["p00_at_tg"] = res.populations.back()[0];
  results["p1bright_at_tg"] = res.populations.back()[1];
  results["p11_at_tg"] = res.populations.back()[2];
  results["p1bright_zeros_us"] = json::array();
  for (double z : res.p1bright_zeros) results["p1bright_zeros_us"].push_back(z * 1e6);
  summary["results"] = std::move(results);

  write_text_file(prefix + "_populations.csv", pop_csv);
  write_text_file(prefix + "_parity.csv", par_csv);
  write_text_file(prefix + "_summary.json", summary.dump(2) + "\n");

  std::cout << "Gate on " << display_mode(mode) << " of " << chain_name(modes.ions) << " at "
            << fmt_freq_label(p.mode_frequency) << "\n";
  std::cout << "  detuning " << fmt_freq_label(p.detuning) << ", gate time "
            << fmt_sig(gate_time * 1e6) << " us, loops " << p.loops << ", nbar "
            << fmt_sig(p.nbar) << ", propagator " << prop_name << "\n";
  std::cout << "  carrier Rabi (2pi x kHz): " << fmt_khz(p.carrier_rabi[0]) << " ("
            << modes.ions.front().label << "), " << fmt_khz(p.carrier_rabi[1]) << " ("
            << modes.ions.back().label << ")\n";
  char line[160];
  std::snprintf(line, sizeof line,
                "  fidelity %.6f  contrast %.6f  P1bright(tg) %.3e  P00 %.6f  P11 %.6f\n",
                res.fidelity, res.contrast, res.populations.back()[1],
                res.populations.back()[0], res.populations.back()[2]);
  std::cout << line;
  std::cout << "Wrote " << prefix << "_populations.csv, " << prefix << "_parity.csv, " << prefix
            << "_summary.json\n";
  return 0;
}

int cmd_budget(const RunConfig& cfg, std::optional<double> ip_khz, std::optional<double> nbar,
               std::optional<int> loops) {
  const auto cc = make_crystal(cfg);
  double omega_ip = 0;
  if (ip_khz) {
    omega_ip = two_pi * 1e3 * *ip_khz;
  } else {
    omega_ip = crystal::normal_modes(cc).at("IP").frequency;
  }
  const double n = nbar.value_or(cfg.gate_given ? cfg.gate.nbar_for("IP") : 0.0);
  const int k = loops.value_or(cfg.gate_given ? cfg.gate.loops : 1);

  const auto b = budget::error_2xIP(cc, omega_ip, n, k);

  json j;
  j["configuration"] = chain_name(cc.ions);
  j["reference_species"] = cfg.reference_species;
  j["reference_frequency_hz"] = cfg.reference_frequency_hz;
  j["ip_frequency_hz"] = omega_ip / two_pi;
  j["gate_mode"] = b.gate_mode;
  j["collision_line"] = b.collision_line;
  j["drive_offset_from_collision_hz"] = b.detuning / two_pi;
  j["gap_hz"] = b.gap / two_pi;
  j["displacement_sq"] = b.displacement_sq;
  j["nbar"] = b.nbar;
  j["loops"] = b.loops;
  j["epsilon"] = b.epsilon;

  if (cfg.output.format == "table") {
    std::cout << "Worst-case spin-flip error for a gate on " << display_mode(b.gate_mode)
              << " colliding with the " << b.collision_line << " line\n";
    TextTable t;
    t.header = {"quantity", "value"};
    t.add({"configuration", j["configuration"].get<std::string>()});
    t.add({"IP frequency", fmt_freq_label(omega_ip)});
    t.add({"2*IP - OOP gap", fmt_freq_label(b.gap)});
    t.add({"|alpha|^2", fmt_sig(b.displacement_sq)});
    t.add({"nbar", fmt_sig(b.nbar)});
    t.add({"loops", std::to_string(b.loops)});
    t.add({"epsilon", fmt_sig(b.epsilon)});
    std::cout << t.render(use_color());
  } else if (cfg.output.format == "json") {
    std::cout << j.dump(2) << "\n";
  } else {
    throw ConfigError("the budget command supports output.format \"table\" or \"json\"");
  }
  return 0;
}

int cmd_scan(const RunConfig& cfg, std::optional<double> t_min_us,
             std::optional<double> t_max_us) {
  const auto cc = make_crystal(cfg);
  double t_min = 50e-6, t_max = 250e-6;
  if (cfg.gate_given && cfg.gate.gate_time_us) t_min = t_max = *cfg.gate.gate_time_us * 1e-6;
  if (t_min_us) t_min = *t_min_us * 1e-6;
  if (t_max_us) t_max = *t_max_us * 1e-6;
  if (t_min_us && !t_max_us && t_max < t_min) t_max = t_min;
  if (!(t_min > 0) || t_max < t_min)
    throw ConfigError("gate-time range must satisfy 0 < t_min <= t_max");
  const double window = two_pi * 1e3 * cfg.scan.window_khz;

  const auto recs = budget::mode_advisor(cc, t_min, t_max, window);

  if (cfg.output.format == "json") {
    json j;
    j["configuration"] = chain_name(cc.ions);
    j["window_khz"] = cfg.scan.window_khz;
    j["gate_time_min_us"] = t_min * 1e6;
    j["gate_time_max_us"] = t_max * 1e6;
    j["recommended"] = recs.empty() ? "" : recs.front().mode;
    for (const auto& r : recs) {
      json m;
      m["mode"] = r.mode;
      m["mode_display"] = display_mode(r.mode);
      m["frequency_hz"] = r.frequency / two_pi;
      m["margin_hz"] = r.margin / two_pi;
      m["nearest_line"] = r.nearest;
      m["min_eta"] = r.min_eta;
      m["decoupled"] = r.decoupled;
      if (r.epsilon) m["epsilon_2xIP"] = *r.epsilon;
      m["pass"] = r.pass;
      j["modes"].push_back(std::move(m));
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (cfg.output.format == "csv") {
    std::string body = csv_join(
        {"mode", "frequency_khz", "margin_khz", "nearest_line", "min_eta", "epsilon_2xIP",
         "status"});
    for (const auto& r : recs) {
      const std::string status = r.decoupled ? "decoupled" : (r.pass ? "pass" : "flagged");
      body += csv_join({r.mode, fmt_khz(r.frequency), fmt_khz(r.margin), r.nearest,
                        fmt_sig(r.min_eta), r.epsilon ? fmt_sig(*r.epsilon) : "",
                        status});
    }
    std::cout << body;
    return 0;
  }

  std::cout << "Gate-mode ranking for " << chain_name(cc.ions) << " (window "
            << fmt_freq_label(window) << ", gate times " << fmt_sig(t_min * 1e6) << ".."
            << fmt_sig(t_max * 1e6) << " us)\n\n";
  TextTable t;
  t.header = {"Mode", "f(2pi kHz)", "margin(2pi kHz)", "nearest line", "min eta", "eps(2xIP)",
              "status"};
  for (const auto& r : recs) {
    const std::string status = r.decoupled ? "DECOUPLED" : (r.pass ? "PASS" : "FLAGGED");
    char eps[32] = "-";
    if (r.epsilon) std::snprintf(eps, sizeof eps, "%.4g", *r.epsilon);
    t.add({display_mode(r.mode), fmt_khz(r.frequency), fmt_khz(r.margin), r.nearest,
           fmt_ratio(r.min_eta), eps, status});
  }
  std::cout << t.render(use_color());
  if (!recs.empty())
    std::cout << "\nRecommended gate mode: " << display_mode(recs.front().mode)
              << (recs.front().pass ? "" : "  (flagged: margin below the requested window)")
              << "\n";
  return 0;
}

int cmd_degeneracies(const RunConfig& cfg, std::optional<double> window_khz, int max_order,
                     bool list_lines) {
  if (max_order < 1 || max_order > 2)
    throw ConfigError("--max-order must be 1 or 2");
  const auto cc = make_crystal(cfg);
  const auto modes = crystal::normal_modes(cc);
  const auto table = coupling::lamb_dicke(modes, make_lasers(cfg), 0.0);
  print_warnings(table.warnings);

  const double window = two_pi * 1e3 * window_khz.value_or(cfg.scan.window_khz);
  const auto spectrum = budget::sideband_spectrum(modes, table, max_order);
  const auto pairs = budget::find_near_degeneracies(spectrum, window);

  if (cfg.output.format == "json") {
    json j;
    j["configuration"] = chain_name(cc.ions);
    j["window_khz"] = window / (two_pi * 1e3);
    j["lines"] = json::array();
    for (const auto& l : spectrum.lines) {
      if (l.offset <= 0) continue;
      j["lines"].push_back({{"line", l.describe()},
                            {"offset_hz", l.offset / two_pi},
                            {"order", l.order},
                            {"strength", l.strength}});
    }
    j["pairs"] = json::array();
    for (const auto& p : pairs)
      j["pairs"].push_back({{"line_a", p.a.describe()},
                            {"line_b", p.b.describe()},
                            {"offset_a_hz", p.a.offset / two_pi},
                            {"offset_b_hz", p.b.offset / two_pi},
                            {"gap_hz", p.gap / two_pi},
                            {"gate_relevant", p.gate_relevant}});
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (cfg.output.format == "csv") {
    std::string body =
        csv_join({"line_a", "line_b", "offset_a_khz", "offset_b_khz", "gap_khz",
                  "gate_relevant"});
    for (const auto& p : pairs)
      body += csv_join({p.a.describe(), p.b.describe(), fmt_khz(p.a.offset),
                        fmt_khz(p.b.offset), fmt_khz(p.gap),
                        p.gate_relevant ? "true" : "false"});
    std::cout << body;
    return 0;
  }

  if (list_lines) {
    std::cout << "Sideband lines of " << chain_name(cc.ions) << " (positive offsets, order <= "
              << max_order << ")\n\n";
    TextTable lt;
    lt.header = {"Line", "offset(2pi kHz)", "order", "strength"};
    for (const auto& l : spectrum.lines) {
      if (l.offset <= 0) continue;
      lt.add({l.describe(), fmt_khz(l.offset), std::to_string(l.order), fmt_ratio(l.strength)});
    }
    std::cout << lt.render(use_color()) << "\n";
  }

  if (pairs.empty()) {
    std::cout << "No sideband pairs closer than " << fmt_freq_label(window) << " for "
              << chain_name(cc.ions) << ".\n";
    return 0;
  }
  std::cout << "Sideband pairs of " << chain_name(cc.ions) << " closer than "
            << fmt_freq_label(window) << "\n\n";
  TextTable t;
  t.header = {"Line A", "Line B", "offset A(2pi kHz)", "offset B(2pi kHz)", "gap(2pi kHz)",
              "gate-relevant"};
  for (const auto& p : pairs)
    t.add({p.a.describe(), p.b.describe(), fmt_khz(p.a.offset), fmt_khz(p.b.offset),
           fmt_khz(p.gap), p.gate_relevant ? "yes" : "no"});
  std::cout << t.render(use_color());
  return 0;
}

}  // namespace ionchain::cli
