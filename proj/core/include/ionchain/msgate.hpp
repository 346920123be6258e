#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ionchain/coupling.hpp"

namespace ionchain::msgate {

enum class RampShape { none, sine_squared };

struct RampSpec {
  RampShape shape = RampShape::none;
  double duration = 0;  // s, per edge
};

// Bichromatic spin-dependent-force drive on two ions of a chain.  The beat
// note sits at mode_frequency + detuning; after K = loops phase-space loops
// (gate_time = 2 pi K / detuning) the motion disentangles and the spins are
// left in a Bell state.  eta carries the signed per-ion Lamb-Dicke parameter
// on the driven mode, so eta[j] * carrier_rabi[j] is the signed coupling g_j.
struct GateParams {
  std::string mode = "IP";
  double mode_frequency = 0;          // rad/s
  double detuning = 0;                // rad/s, > 0
  int loops = 1;                      // K
  double gate_time = 0;               // s
  std::array<double, 2> eta{};        // signed
  std::array<double, 2> carrier_rabi{};  // rad/s
  std::array<double, 2> drive_phase{};   // equatorial drive-axis angle per ion
  RampSpec ramp{};
  double nbar = 0;                    // gate-mode thermal occupation

  std::array<double, 2> sideband_product() const {
    return {eta[0] * carrier_rabi[0], eta[1] * carrier_rabi[1]};
  }
  // Phase of the Bell state (|00> + e^{i phi} |11>)/sqrt(2) this drive creates.
  double bell_phase() const;
};

// Reduced state of the two driven qubits in the basis |00>,|01>,|10>,|11>;
// |1> is the bright state and the gate starts from |11>.
struct TwoQubitState {
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();

  double p00() const { return rho(0, 0).real(); }
  double p11() const { return rho(3, 3).real(); }
  double p1bright() const { return rho(1, 1).real() + rho(2, 2).real(); }
  std::complex<double> coherence() const { return rho(0, 3); }  // <00|rho|11>
};

enum class MotionalInit { ground, thermal, fock };

// Fock-space truncation and initial motional state for the numerical
// propagator.  n_max = 0 means untruncated (allowed only where closed-form
// kernels exist, i.e. the analytic propagator).
struct MotionalSpec {
  int n_max = 0;
  MotionalInit initial = MotionalInit::ground;
  double nbar = 0;
  int fock_n = 0;

  void validate_for_oracle() const;
  static MotionalSpec ground_state(int n_max = 0) { return {n_max, MotionalInit::ground, 0.0, 0}; }
  static MotionalSpec thermal(double nbar, int n_max = 0) {
    return {n_max, MotionalInit::thermal, nbar, 0};
  }
  static MotionalSpec fock(int n, int n_max = 0) { return {n_max, MotionalInit::fock, 0.0, n}; }
};

enum class Hamiltonian { full, lamb_dicke };

struct ParityPoint {
  double chi = 0;
  double parity = 0;
};

struct ParityFit {
  double contrast = 0;  // |A| of A sin(2 chi + phase) + offset
  double phase = 0;
  double offset = 0;
  std::vector<std::string> warnings;
};

struct GateResult {
  std::vector<double> times;
  std::vector<std::array<double, 3>> populations;  // P00, P1bright, P11
  std::vector<ParityPoint> parity_fringe;
  double contrast = 0;
  double fidelity = 0;
  double fit_phase = 0;
  double fit_offset = 0;
  std::vector<double> p1bright_zeros;  // times where P1bright returns to ~0
};

// Truncated geometric distribution used for thermal averaging.  With a finite
// n_max the member list is capped at n <= n_max/4 - 1 so every member keeps
// the truncation headroom the propagator needs; both propagation routes use
// this same rule so thermal comparisons average identical ensembles.
std::vector<double> thermal_weights(double nbar, int n_max = 0);

// Exact propagator of the resonantly-closed spin-dependent-force model
// (Lamb-Dicke interaction picture).  Geometric phase and residual
// displacement come from closed-form or exact piecewise envelope integrals.
TwoQubitState propagate_analytic(const GateParams&, double t);
TwoQubitState propagate_analytic(const GateParams&, double t, const MotionalSpec&);

// Residual coherent displacement per unit spin eigenvalue and accumulated
// geometric phase per unit spin eigenvalue squared, at time t.
std::pair<std::complex<double>, double> loop_integrals(const GateParams&, double t);

// Spectator mode carried by the numerical propagator in addition to (or
// instead of) the driven mode; channels[0] is always the driven mode.
struct ModeChannel {
  double frequency = 0;  // rad/s
  std::array<double, 2> eta{};
  MotionalSpec motion{};
};

struct OracleOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  double leak_threshold = 1e-6;  // max tolerated population in the top two Fock levels
};

// Numerical integration of the Schrodinger equation, either for the full
// bichromatic Hamiltonian with the untruncated displacement operator
// (Hamiltonian::full) or for its Lamb-Dicke / rotating-wave limit
// (Hamiltonian::lamb_dicke).  Thermal initial states are averaged over the
// matched truncated ensemble.  Throws LeakageError if population reaches the
// top two Fock levels of any mode.
TwoQubitState propagate_oracle(const GateParams&, const MotionalSpec&, Hamiltonian, double t);
std::vector<TwoQubitState> propagate_oracle_times(const GateParams&,
                                                  const std::vector<ModeChannel>&, Hamiltonian,
                                                  const std::vector<double>& times,
                                                  const OracleOptions& = {});

enum class Propagator { analytic, oracle_full, oracle_lamb_dicke };

// Populations over a time grid plus the refined times where P1bright returns
// to zero (local minima below 1e-6).
GateResult population_flopping(const GateParams&, const MotionalSpec&,
                               const std::vector<double>& t_grid,
                               Propagator = Propagator::analytic);

// Parity observable <Z x Z> after a uniform pi/2 analysis rotation about the
// equatorial axis at angle chi on both qubits.
std::vector<ParityPoint> parity_scan(const TwoQubitState&, const std::vector<double>& chi_grid);

// Least-squares fit of A sin(2 chi + phase) + offset with the period held
// fixed; needs >= 8 points spanning at least one period (pi).
ParityFit fit_parity_contrast(const std::vector<ParityPoint>&);

// (P00 + P11 + contrast) / 2 with a physicality check on the inputs; the
// result is clamped to [0, 1] (a note is appended to *warning if clamping or
// any input check at the tolerance edge fires).
double bell_fidelity(double p00, double p11, double contrast, std::string* warning = nullptr);

// <Phi | rho | Phi> for |Phi> = (|00> + e^{i phi} |11>)/sqrt(2).
double state_fidelity(const TwoQubitState&, double bell_phase);

// Populations plus fitted parity contrast evaluated on a uniform chi grid
// spanning [0, pi]; the measurement-only Bell fidelity estimate.
double protocol_fidelity(const TwoQubitState&, int chi_points = 65);

// Drive calibration: detuning = 2 pi K / gate_time and per-ion carrier Rabi
// rates with eta_j Omega_j = detuning / (4 sqrt(K)), so the K-loop trajectory
// closes and the accumulated geometric phase is pi/2.  The driven pair
// defaults to the two end ions of the chain.
GateParams calibrate_gate(const coupling::CouplingTable&, const std::string& mode,
                          double gate_time, int loops = 1,
                          std::optional<std::pair<int, int>> driven = std::nullopt);

// Full scan: populations over the grid, zero census, parity fringe of the
// final state and the protocol fidelity.
GateResult run_gate(const GateParams&, const MotionalSpec&, const std::vector<double>& t_grid,
                    Propagator = Propagator::analytic, int chi_points = 65);

}  // namespace ionchain::msgate
