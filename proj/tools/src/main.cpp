#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli.hpp"
#include "ionchain/errors.hpp"

namespace cli = ionchain::cli;

int main(int argc, char** argv) {
  CLI::App app{
      "Mixed-species trapped-ion chain toolkit: axial normal modes, Lamb-Dicke couplings, "
      "Molmer-Sorensen gate dynamics and Bell-state fidelity, and sideband-degeneracy error "
      "budgets."};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "JSON configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--set", overrides,
                 "Override one config field by dotted path, e.g. --set gate.loops=2 "
                 "(value parsed as JSON, else taken as a string)");

  auto load = [&]() { return cli::parse_config(cli::load_config(config_path, overrides)); };

  auto* modes = app.add_subcommand(
      "modes", "Normal modes and Lamb-Dicke parameters of the configured chain");
  modes->callback([&]() { cli::cmd_modes(load()); });

  auto* table = app.add_subcommand(
      "table", "Mode survey of every two-ion and symmetric three-ion chain from the "
               "isotope pool");
  bool rank_gaps = false;
  table->add_flag("--rank-gaps", rank_gaps,
                  "Append the smallest sideband gap per configuration and rank by it");
  table->callback([&]() { cli::cmd_table(load(), rank_gaps); });

  auto* gate = app.add_subcommand(
      "gate", "Calibrate and simulate the Molmer-Sorensen gate; writes populations CSV, "
              "parity CSV and a summary JSON");
  std::optional<std::string> gate_output;
  gate->add_option("-o,--output", gate_output, "Output path prefix (default: output.path)");
  gate->callback([&]() { cli::cmd_gate(load(), gate_output); });

  auto* bud = app.add_subcommand(
      "budget", "Worst-case spin-flip error when the out-of-phase gate drive lands on the "
                "second-order in-phase line (two-ion dual-species chains)");
  std::optional<double> ip_khz, bud_nbar;
  std::optional<int> bud_loops;
  bud->add_option("--ip-khz", ip_khz,
                  "Evaluate with the in-phase mode at this frequency (non-angular kHz); "
                  "default: the configured chain's own IP frequency");
  bud->add_option("--nbar", bud_nbar, "In-phase mode occupation (default: gate.nbar)");
  bud->add_option("--loops", bud_loops, "Phase-space loop count (default: gate.loops)");
  bud->callback([&]() { cli::cmd_budget(load(), ip_khz, bud_nbar, bud_loops); });

  auto* scan = app.add_subcommand(
      "scan", "Rank the chain's modes as gate candidates by spectral margin within the "
              "configured window and gate-time range");
  std::optional<double> t_min_us, t_max_us;
  scan->add_option("--t-min-us", t_min_us, "Shortest gate time considered (us)");
  scan->add_option("--t-max-us", t_max_us, "Longest gate time considered (us)");
  scan->callback([&]() { cli::cmd_scan(load(), t_min_us, t_max_us); });

  auto* deg = app.add_subcommand(
      "degeneracies", "List near-degenerate sideband pairs of the configured chain");
  std::optional<double> window_khz;
  int max_order = 2;
  bool list_lines = false;
  deg->add_option("--window-khz", window_khz,
                  "Degeneracy window (non-angular kHz; default: scan.window_khz)");
  deg->add_option("--max-order", max_order, "Highest sideband order to include (1 or 2)");
  deg->add_flag("--list-lines", list_lines, "Also print the full line list");
  deg->callback(
      [&]() { cli::cmd_degeneracies(load(), window_khz, max_order, list_lines); });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const ionchain::LeakageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ionchain::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ionchain::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
