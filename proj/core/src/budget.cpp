#include "ionchain/budget.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "ionchain/constants.hpp"
#include "ionchain/errors.hpp"

namespace ionchain::budget {

namespace {

using constants::pi;
using constants::two_pi;

std::string element_of(const std::string& label) {
  std::string e;
  for (char c : label)
    if (std::isalpha(static_cast<unsigned char>(c))) e += c;
  return e;
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

std::vector<coupling::LaserField> axial_lasers(const std::vector<species::IonSpecies>& ions) {
  std::vector<coupling::LaserField> lasers;
  for (const auto& ion : ions) {
    bool seen = false;
    for (const auto& l : lasers) seen = seen || l.target_species == ion.label;
    if (!seen) lasers.push_back({ion.label, ion.wavevector(), 1.0, std::nullopt});
  }
  return lasers;
}

std::string combo_term(const std::string& label, int count) {
  if (count == 1) return label;
  return std::to_string(count) + "*" + label;
}

double min_gate_relevant_gap(const SidebandSpectrum& spec) {
  double best = std::numeric_limits<double>::infinity();
  const auto& lines = spec.lines;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].offset <= 0) continue;
    for (size_t j = i + 1; j < lines.size(); ++j) {
      if (lines[j].offset <= 0) continue;
      if (lines[i].order != 1 && lines[j].order != 1) continue;
      best = std::min(best, std::abs(lines[i].offset - lines[j].offset));
    }
  }
  return best;
}

}  // namespace

std::string SpectralLine::describe() const {
  std::string pos, neg;
  for (const auto& [label, count] : combo) {
    if (count > 0) {
      if (!pos.empty()) pos += "+";
      pos += combo_term(label, count);
    } else if (count < 0) {
      neg += "-" + combo_term(label, -count);
    }
  }
  return pos + neg;
}

SidebandSpectrum sideband_spectrum(const crystal::ModeTable& modes,
                                   const coupling::CouplingTable& table, int max_order) {
  if (max_order < 1 || max_order > 2)
    throw ConfigError("sideband spectrum supports orders 1 and 2");
  const int n_modes = static_cast<int>(modes.modes.size());
  const int n_ions = static_cast<int>(modes.ions.size());

  auto eta = [&](int ion, int m) { return table.at(ion, modes.modes[m].label).eta; };

  SidebandSpectrum spec;
  auto add = [&](std::vector<std::pair<std::string, int>> combo, double offset, int order,
                 double strength) {
    spec.lines.push_back({std::move(combo), offset, order, strength});
  };

  for (int m = 0; m < n_modes; ++m) {
    const auto& mode = modes.modes[m];
    double s1 = 0, s2 = 0;
    for (int i = 0; i < n_ions; ++i) {
      s1 += eta(i, m);
      s2 += eta(i, m) * eta(i, m);
    }
    add({{mode.label, 1}}, mode.frequency, 1, s1);
    add({{mode.label, -1}}, -mode.frequency, 1, s1);
    if (max_order >= 2) {
      add({{mode.label, 2}}, 2.0 * mode.frequency, 2, s2);
      add({{mode.label, -2}}, -2.0 * mode.frequency, 2, s2);
    }
  }
  if (max_order >= 2) {
    for (int m = 0; m < n_modes; ++m)
      for (int k = m + 1; k < n_modes; ++k) {
        const auto& a = modes.modes[m];
        const auto& b = modes.modes[k];
        double s = 0;
        for (int i = 0; i < n_ions; ++i) s += eta(i, m) * eta(i, k);
        add({{a.label, 1}, {b.label, 1}}, a.frequency + b.frequency, 2, s);
        add({{a.label, -1}, {b.label, -1}}, -(a.frequency + b.frequency), 2, s);
        add({{b.label, 1}, {a.label, -1}}, b.frequency - a.frequency, 2, s);
        add({{a.label, 1}, {b.label, -1}}, a.frequency - b.frequency, 2, s);
      }
  }

  std::sort(spec.lines.begin(), spec.lines.end(),
            [](const SpectralLine& a, const SpectralLine& b) { return a.offset < b.offset; });
  return spec;
}

std::vector<DegeneratePair> find_near_degeneracies(const SidebandSpectrum& spec, double window) {
  if (window < 0) throw ConfigError("degeneracy window must be non-negative");
  std::vector<DegeneratePair> pairs;
  const auto& lines = spec.lines;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].offset <= 0) continue;
    for (size_t j = i + 1; j < lines.size(); ++j) {
      if (lines[j].offset <= 0) continue;
      const double gap = std::abs(lines[i].offset - lines[j].offset);
      if (gap >= window) continue;
      DegeneratePair p;
      const bool i_first = lines[i].offset <= lines[j].offset;
      p.a = i_first ? lines[i] : lines[j];
      p.b = i_first ? lines[j] : lines[i];
      p.gap = gap;
      p.gate_relevant = (lines[i].order == 1) || (lines[j].order == 1);
      pairs.push_back(std::move(p));
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const DegeneratePair& a, const DegeneratePair& b) { return a.gap < b.gap; });
  return pairs;
}

std::complex<double> displacement_alpha(const coupling::CouplingTable& table,
                                        const std::string& collision_mode,
                                        const std::array<double, 2>& carrier_rabi,
                                        double drive_frequency, double gate_time) {
  if (!(gate_time > 0)) throw ConfigError("gate time must be positive");
  const int n = static_cast<int>(table.ions.size());
  if (n < 2) throw ConfigError("displacement estimate needs at least two ions");
  const std::array<int, 2> driven = {0, n - 1};

  double sum = 0;
  double omega_col = 0;
  for (int j = 0; j < 2; ++j) {
    const auto& e = table.at(driven[j], collision_mode);
    omega_col = e.mode_frequency;
    sum += e.eta * e.eta * carrier_rabi[j];
  }

  const double delta = drive_frequency - 2.0 * omega_col;
  std::complex<double> integral;
  if (delta == 0.0) {
    integral = gate_time;
  } else {
    const std::complex<double> i1(0.0, 1.0);
    integral = (1.0 - std::exp(-i1 * delta * gate_time)) / (i1 * delta);
  }
  return 0.5 * sum * integral;
}

ErrorBudget error_2xIP(const crystal::CrystalConfig& cfg, double omega_ip, double nbar,
                       int loops) {
  if (cfg.ions.size() != 2)
    throw ConfigError("the 2xIP collision estimate applies to two-ion chains");
  if (cfg.ions[0].label == cfg.ions[1].label)
    throw ConfigError("the 2xIP collision estimate applies to dual-species chains");
  if (!(omega_ip > 0)) throw ConfigError("IP frequency must be positive");
  if (nbar < 0) throw ConfigError("nbar must be non-negative");
  if (loops < 1) throw ConfigError("loop count must be at least 1");

  // Rescale the trap so the IP mode lands exactly at the requested frequency.
  crystal::CrystalConfig scaled = cfg;
  const auto probe = crystal::normal_modes(cfg);
  scaled.reference_frequency *= omega_ip / probe.at("IP").frequency;
  const auto modes = crystal::normal_modes(scaled);
  const auto table = coupling::lamb_dicke(modes, axial_lasers(scaled.ions), 0.0);

  double sum = 0;
  for (int j = 0; j < 2; ++j) {
    const auto& ip = table.at(j, "IP");
    const auto& oop = table.at(j, "OOP");
    if (oop.eta < 1e-15) throw ConfigError("ion decoupled from the gate mode");
    sum += ip.eta * ip.eta / oop.eta;
  }
  // Calibrated drive, on resonance with 2 x IP for the whole gate:
  // |alpha| = (pi sqrt(K) / 4) sum.
  const double alpha = pi * std::sqrt(double(loops)) / 4.0 * sum;

  ErrorBudget b;
  b.gate_mode = "OOP";
  b.collision_line = "2*IP";
  b.detuning = 0;
  b.gap = 2.0 * modes.at("IP").frequency - modes.at("OOP").frequency;
  b.displacement_sq = alpha * alpha;
  b.nbar = nbar;
  b.loops = loops;
  b.epsilon = b.displacement_sq * (nbar + 0.5);
  return b;
}

ScanTable isotope_scan(const std::vector<species::IonSpecies>& pool, double reference_frequency,
                       bool two_ion, bool three_ion_symmetric) {
  if (!(reference_frequency > 0)) throw ConfigError("reference frequency must be positive");
  if (pool.empty()) throw ConfigError("isotope pool is empty");

  // Partition the pool by element, preserving order and dropping duplicates.
  std::vector<std::string> elements;
  std::map<std::string, std::vector<species::IonSpecies>> by_element;
  for (const auto& ion : pool) {
    const auto e = element_of(ion.label);
    if (!by_element.count(e)) elements.push_back(e);
    auto& isotopes = by_element[e];
    bool seen = false;
    for (const auto& x : isotopes) seen = seen || x.label == ion.label;
    if (!seen) isotopes.push_back(ion);
  }
  if (elements.size() > 2) throw ConfigError("isotope scan supports at most two elements");

  // The heavier element provides the reference isotope for each configuration.
  std::string ref_element = elements.front();
  if (elements.size() == 2) {
    auto mean_mass = [&](const std::string& e) {
      double m = 0;
      for (const auto& x : by_element[e]) m += x.mass;
      return m / by_element[e].size();
    };
    if (mean_mass(elements[1]) > mean_mass(elements[0])) ref_element = elements[1];
  }

  ScanTable table;
  table.species_columns.push_back(ref_element);
  for (const auto& e : elements)
    if (e != ref_element) table.species_columns.push_back(e);

  // Column value for an element: the (signed) amplitude of its representative
  // ion; outer ion for the symmetric chains, magnitude for two-ion rows.
  auto emit = [&](const std::vector<species::IonSpecies>& chain,
                  const species::IonSpecies& ref) {
    crystal::CrystalConfig cfg{chain, ref, reference_frequency};
    const auto modes = crystal::normal_modes(cfg);
    const auto coupling_table = coupling::lamb_dicke(modes, axial_lasers(chain), 0.0);
    const auto spec = sideband_spectrum(modes, coupling_table);
    const double gap = min_gate_relevant_gap(spec);
    const double w_ip = modes.modes.front().frequency;
    const bool magnitudes = chain.size() == 2;

    for (const auto& mode : modes.modes) {
      ScanRow row;
      row.configuration = chain_name(chain);
      row.mode = mode.label;
      row.frequency = mode.frequency;
      row.freq_ratio_ref = mode.frequency / reference_frequency;
      row.freq_ratio_ip = mode.frequency / w_ip;
      row.min_gap = gap;
      for (const auto& col : table.species_columns) {
        int pick = -1;
        for (int i = 0; i < static_cast<int>(chain.size()); ++i) {
          if (element_of(chain[i].label) == col) {
            pick = i;
            break;  // outer ion (first occurrence) represents its element
          }
        }
        if (pick < 0) {
          row.b.push_back(0);
          row.eta.push_back(0);
          continue;
        }
        const double b = mode.b[pick];
        row.b.push_back(magnitudes ? std::abs(b) : b);
        row.eta.push_back(coupling_table.at(pick, mode.label).eta);
      }
      table.rows.push_back(std::move(row));
    }
  };

  if (elements.size() == 2) {
    const auto& others = by_element[elements.front() == ref_element ? elements[1] : elements[0]];
    for (const auto& ref : by_element[ref_element]) {
      for (const auto& other : others) {
        if (two_ion) emit({other, ref}, ref);
        if (three_ion_symmetric) {
          emit({other, ref, other}, ref);
          emit({ref, other, ref}, ref);
        }
      }
    }
  } else {
    for (const auto& iso : by_element[ref_element]) {
      if (two_ion) emit({iso, iso}, iso);
      if (three_ion_symmetric) emit({iso, iso, iso}, iso);
    }
  }
  return table;
}

std::vector<std::string> rank_configurations_by_gap(const ScanTable& table) {
  std::vector<std::pair<std::string, double>> configs;
  for (const auto& row : table.rows) {
    bool seen = false;
    for (const auto& c : configs) seen = seen || c.first == row.configuration;
    if (!seen) configs.push_back({row.configuration, row.min_gap});
  }
  std::stable_sort(configs.begin(), configs.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> names;
  for (const auto& c : configs) names.push_back(c.first);
  return names;
}

std::vector<ModeRecommendation> mode_advisor(const crystal::CrystalConfig& cfg,
                                             double gate_time_min, double gate_time_max,
                                             double window) {
  if (!(gate_time_min > 0) || gate_time_max < gate_time_min)
    throw ConfigError("invalid gate-time range");
  if (window < 0) throw ConfigError("degeneracy window must be non-negative");

  const auto modes = crystal::normal_modes(cfg);
  const auto table = coupling::lamb_dicke(modes, axial_lasers(cfg.ions), 0.0);
  const auto spec = sideband_spectrum(modes, table);
  const double delta_max = two_pi / gate_time_min;

  std::vector<ModeRecommendation> recs;
  for (const auto& mode : modes.modes) {
    ModeRecommendation r;
    r.mode = mode.label;
    r.frequency = mode.frequency;

    r.margin = std::numeric_limits<double>::infinity();
    for (const auto& line : spec.lines) {
      if (line.offset <= 0) continue;
      if (line.order == 1 && line.combo.size() == 1 && line.combo[0].first == mode.label)
        continue;  // the gate's own sideband
      const double d = std::abs(line.offset - mode.frequency);
      if (d < r.margin) {
        r.margin = d;
        r.nearest = line.describe();
      }
    }

    r.min_eta = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(cfg.ions.size()); ++i)
      r.min_eta = std::min(r.min_eta, table.at(i, mode.label).eta);
    r.decoupled = r.min_eta < 1e-12;

    if (cfg.ions.size() == 2 && cfg.ions[0].label != cfg.ions[1].label && mode.label == "OOP")
      r.epsilon = error_2xIP(cfg, modes.at("IP").frequency, 0.0, 1).epsilon;

    r.pass = !r.decoupled && r.margin >= window + delta_max;
    recs.push_back(std::move(r));
  }

  std::stable_sort(recs.begin(), recs.end(), [](const ModeRecommendation& a,
                                                const ModeRecommendation& b) {
    if (a.decoupled != b.decoupled) return !a.decoupled;
    const double scale = std::max({std::abs(a.margin), std::abs(b.margin), 1.0});
    if (std::abs(a.margin - b.margin) > 1e-9 * scale) return a.margin > b.margin;
    return a.min_eta > b.min_eta;
  });
  return recs;
}

}  // namespace ionchain::budget
