#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "ionchain/constants.hpp"
#include "ionchain/coupling.hpp"
#include "ionchain/crystal.hpp"
#include "ionchain/detail/exppoly.hpp"
#include "ionchain/errors.hpp"
#include "ionchain/msgate.hpp"
#include "ionchain/species.hpp"

using namespace ionchain;
using doctest::Approx;
using constants::pi;
using constants::two_pi;
using std::complex;

namespace {

constexpr complex<double> kI{0.0, 1.0};

// Square pulse with sine^2 edges of length tau at both ends.
double envelope(double t, double total, double tau) {
  if (tau <= 0) return 1.0;
  if (t < tau) {
    const double s = std::sin(pi * t / (2.0 * tau));
    return s * s;
  }
  if (t > total - tau) {
    const double s = std::sin(pi * (total - t) / (2.0 * tau));
    return s * s;
  }
  return 1.0;
}

// Independent trajectory integrals by cumulative trapezoid quadrature:
//   beta(t)  = int_0^t i f(s) e^{i delta s} ds
//   theta(t) = Im int_0^t ds2 beta'(s2) conj(beta(s2))
// The i keeps the square-pulse limit at (e^{i delta t} - 1) / delta.
struct Quadrature {
  complex<double> beta;
  double theta;
};

Quadrature integrate_envelope(double t, double total, double tau, double delta,
                              int n = 2000000) {
  const double h = t / n;
  complex<double> beta = 0;
  double theta = 0;
  auto dbeta = [&](double s) { return kI * envelope(s, total, tau) * std::exp(kI * delta * s); };
  complex<double> prev = dbeta(0.0);
  complex<double> beta_prev = 0;
  for (int k = 1; k <= n; ++k) {
    const double s = k * h;
    const complex<double> cur = dbeta(s);
    const complex<double> beta_cur = beta + 0.5 * h * (prev + cur);
    theta += 0.5 * h * (std::imag(prev * std::conj(beta_prev)) + std::imag(cur * std::conj(beta_cur)));
    beta = beta_cur;
    beta_prev = beta_cur;
    prev = cur;
  }
  return {beta, theta};
}

// Composite Simpson rule for complex integrands.
template <typename F>
complex<double> simpson(F f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  complex<double> acc = f(a) + f(b);
  for (int k = 1; k < n; ++k) acc += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return acc * (h / 3.0);
}

coupling::CouplingTable ca_sr_table(double ref = two_pi * 660e3) {
  const auto ca = species::lookup("40Ca+");
  const auto sr = species::lookup("88Sr+");
  const auto modes = crystal::normal_modes({{ca, sr}, sr, ref});
  std::vector<coupling::LaserField> lasers = {{ca.label, ca.wavevector(), 1.0, std::nullopt},
                                              {sr.label, sr.wavevector(), 1.0, std::nullopt}};
  return coupling::lamb_dicke(modes, lasers, 0.0);
}

// Drive with hand-set signed couplings; only the detuning and the couplings
// matter for the analytic propagator.
msgate::GateParams drive(double eta0, double eta1, int loops = 1, double t_g = 100e-6) {
  msgate::GateParams p;
  p.mode = "IP";
  p.mode_frequency = two_pi * 2e6;
  p.gate_time = t_g;
  p.loops = loops;
  p.detuning = two_pi * loops / t_g;
  p.eta = {eta0, eta1};
  const double product = p.detuning / (4.0 * std::sqrt(double(loops)));
  p.carrier_rabi = {product / std::abs(eta0), product / std::abs(eta1)};
  return p;
}

}  // namespace

TEST_CASE("exponential-polynomial evaluation, products and conjugation") {
  using msgate::detail::ExpPoly;
  const ExpPoly f = ExpPoly::term({2.0, 0.5}, 2, 3.0) + ExpPoly::term({-1.0, 0.25}, 0, -1.2) +
                    ExpPoly::constant(0.7);
  auto direct = [](double t) {
    return complex<double>(2.0, 0.5) * t * t * std::exp(kI * 3.0 * t) +
           complex<double>(-1.0, 0.25) * std::exp(-kI * 1.2 * t) + 0.7;
  };
  for (double t : {0.0, 0.3, 0.8, 2.1}) {
    CHECK(std::abs(f.eval(t) - direct(t)) < 1e-13);
    CHECK(std::abs(f.conj().eval(t) - std::conj(f.eval(t))) < 1e-13);
  }

  const ExpPoly g = ExpPoly::term({0.4, -1.0}, 1, 0.7);
  const ExpPoly fg = f * g;
  for (double t : {0.25, 1.7}) CHECK(std::abs(fg.eval(t) - f.eval(t) * g.eval(t)) < 1e-12);
}

TEST_CASE("exponential-polynomial antiderivative vanishes at zero and matches Simpson") {
  using msgate::detail::ExpPoly;
  const ExpPoly f = ExpPoly::term({2.0, 0.5}, 2, 3.0) + ExpPoly::term({-1.0, 0.25}, 0, -1.2) +
                    ExpPoly::term({0.3, 0.0}, 1, 0.0);
  const ExpPoly F = f.antiderivative(2.0);
  CHECK(std::abs(F.eval(0.0)) < 1e-15);

  // derivative check by central differences
  for (double t : {0.4, 1.3}) {
    const double h = 1e-6;
    const complex<double> d = (F.eval(t + h) - F.eval(t - h)) / (2.0 * h);
    CHECK(std::abs(d - f.eval(t)) < 1e-7);
  }

  const complex<double> exact = f.integrate(0.2, 1.7, 2.0);
  const complex<double> numeric = simpson([&](double t) { return f.eval(t); }, 0.2, 1.7);
  CHECK(std::abs(exact - numeric) < 1e-10);
}

TEST_CASE("near-cancelling frequencies integrate through the series branch") {
  using msgate::detail::ExpPoly;
  for (double w : {0.0, 1e-9, 1e-5, 4e-4}) {
    const ExpPoly f = ExpPoly::term({1.0, 0.0}, 1, w);  // t e^{iwt}, |w| t_scale < 1e-3
    const complex<double> exact = f.integrate(0.0, 1.0, 1.0);
    const complex<double> numeric = simpson([&](double t) { return f.eval(t); }, 0.0, 1.0);
    CHECK(std::abs(exact - numeric) < 1e-12);
  }
  // Just above the switch the closed form takes over; right at the threshold
  // its subtractive cancellation costs up to eps / (w (b-a))^2 ~ 5e-11.
  const ExpPoly f1 = ExpPoly::term({1.0, 0.0}, 1, 2e-3);
  const complex<double> exact = f1.integrate(0.0, 1.0, 1.0);
  const complex<double> numeric = simpson([&](double t) { return f1.eval(t); }, 0.0, 1.0);
  CHECK(std::abs(exact - numeric) < 1e-10);
}

TEST_CASE("square-pulse trajectory integrals match their closed forms") {
  const auto p = drive(0.08, -0.05, 2, 120e-6);
  const double d = p.detuning;
  for (double t : {0.0, 17e-6, 60e-6, 120e-6}) {
    const auto [beta, theta] = msgate::loop_integrals(p, t);
    const complex<double> beta_ref = (std::exp(kI * d * t) - 1.0) / d;
    const double theta_ref = (d * t - std::sin(d * t)) / (d * d);
    CHECK(std::abs(beta - beta_ref) * d < 1e-10);
    CHECK(std::abs(theta - theta_ref) * d * d < 1e-8);
  }
  // the loop closes at the gate time
  CHECK(std::abs(msgate::loop_integrals(p, p.gate_time).first) * d < 1e-12);
}

TEST_CASE("ramped trajectory integrals match direct quadrature") {
  auto check_against_quadrature = [](int loops, double tau_frac) {
    msgate::GateParams p = drive(0.08, -0.05, loops, 100e-6);
    p.ramp = {msgate::RampShape::sine_squared, tau_frac * p.gate_time};
    for (double frac : {0.31, 0.73, 1.0}) {
      const double t = frac * p.gate_time;
      const auto [beta, theta] = msgate::loop_integrals(p, t);
      const auto q = integrate_envelope(t, p.gate_time, p.ramp.duration, p.detuning);
      const double theta_scale = two_pi * loops / (p.detuning * p.detuning);
      CHECK(std::abs(beta - q.beta) * p.detuning < 1e-7);
      CHECK(std::abs(theta - q.theta) < 1e-7 * theta_scale);
    }
  };
  check_against_quadrature(1, 0.2);
  check_against_quadrature(3, 0.1);
  // degenerate edge: the ramp frequency pi/tau equals the detuning, which
  // sends some product terms through the small-frequency series branch
  check_against_quadrature(10, 0.05);
}

TEST_CASE("calibration fixes detuning, products and the conditional phase") {
  const auto table = ca_sr_table();
  const double t_g = 100e-6;
  for (int k : {1, 2, 4}) {
    const auto p = msgate::calibrate_gate(table, "IP", t_g, k);
    CHECK(p.mode == "IP");
    CHECK(p.gate_time == Approx(t_g).epsilon(1e-15));
    CHECK(p.loops == k);
    CHECK(p.detuning == Approx(two_pi * k / t_g).epsilon(1e-14));
    CHECK(p.mode_frequency == Approx(table.at(0, "IP").mode_frequency).epsilon(1e-15));

    const auto g = p.sideband_product();
    const double target = p.detuning / (4.0 * std::sqrt(double(k)));
    CHECK(std::abs(g[0]) == Approx(target).epsilon(1e-12));
    CHECK(std::abs(g[1]) == Approx(target).epsilon(1e-12));
    CHECK(p.eta[0] == Approx(table.at(0, "IP").eta_signed).epsilon(1e-15));
    CHECK(p.eta[1] == Approx(table.at(1, "IP").eta_signed).epsilon(1e-15));

    // accumulated two-qubit phase: Theta(t_g) x 4 g0 g1 = +-pi/2
    const double theta = msgate::loop_integrals(p, t_g).second;
    CHECK(std::abs(theta * 4.0 * g[0] * g[1]) == Approx(pi / 2).epsilon(1e-12));
  }

  // three-ion chain drives the end pair by default
  const auto sr = species::lookup("88Sr+");
  const auto ca = species::lookup("43Ca+");
  const auto m3 = crystal::normal_modes({{sr, ca, sr}, sr, two_pi * 660e3});
  std::vector<coupling::LaserField> lasers = {{sr.label, sr.wavevector(), 1.0, std::nullopt},
                                              {ca.label, ca.wavevector(), 1.0, std::nullopt}};
  const auto t3 = coupling::lamb_dicke(m3, lasers, 0.0);
  const auto p3 = msgate::calibrate_gate(t3, "Stretch", t_g, 1);
  CHECK(p3.eta[0] == Approx(t3.at(0, "Stretch").eta_signed).epsilon(1e-15));
  CHECK(p3.eta[1] == Approx(t3.at(2, "Stretch").eta_signed).epsilon(1e-15));

  // driving the decoupled centre ion is rejected with context
  CHECK_THROWS_AS(msgate::calibrate_gate(t3, "Stretch", t_g, 1, std::pair{0, 1}), ConfigError);
  try {
    msgate::calibrate_gate(t3, "Stretch", t_g, 1, std::pair{0, 1});
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("Stretch") != std::string::npos);
    CHECK(msg.find("43Ca+") != std::string::npos);
  }
}

TEST_CASE("ground-state gate lands on a pure Bell state") {
  const auto p = msgate::calibrate_gate(ca_sr_table(), "IP", 100e-6, 1);

  const auto t0 = msgate::propagate_analytic(p, 0.0);
  CHECK(t0.p11() == Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(t0.coherence()) < 1e-14);

  const auto st = msgate::propagate_analytic(p, p.gate_time);
  CHECK(st.p00() == Approx(0.5).epsilon(1e-12));
  CHECK(st.p11() == Approx(0.5).epsilon(1e-12));
  CHECK(st.p1bright() < 1e-12);
  CHECK(std::abs(st.coherence()) == Approx(0.5).epsilon(1e-12));

  const double purity = (st.rho * st.rho).trace().real();
  CHECK(purity == Approx(1.0).epsilon(1e-12));
  CHECK(msgate::state_fidelity(st, p.bell_phase()) == Approx(1.0).epsilon(1e-12));
  CHECK(st.rho.trace().real() == Approx(1.0).epsilon(1e-13));
}

TEST_CASE("created Bell phase follows the coupling signs and drive phases") {
  for (const double s0 : {1.0, -1.0}) {
    for (const double s1 : {1.0, -1.0}) {
      for (const auto& phases : {std::array<double, 2>{0.0, 0.0},
                                 std::array<double, 2>{0.3, -0.2}}) {
        auto p = drive(s0 * 0.08, s1 * 0.05);
        p.drive_phase = phases;

        const double sign = (s0 * s1 < 0) ? -1.0 : 1.0;
        const double expected =
            std::remainder(sign * pi / 2 - phases[0] - phases[1], two_pi);
        CHECK(std::remainder(p.bell_phase() - expected, two_pi) ==
              Approx(0.0).scale(1.0).epsilon(1e-12));

        const auto st = msgate::propagate_analytic(p, p.gate_time);
        CHECK(msgate::state_fidelity(st, p.bell_phase()) == Approx(1.0).epsilon(1e-9));
        CHECK(st.p1bright() < 1e-12);
      }
    }
  }
}

TEST_CASE("thermal weights form a capped renormalized geometric ladder") {
  CHECK(msgate::thermal_weights(0.0) == std::vector<double>{1.0});
  CHECK(msgate::thermal_weights(0.0, 40) == std::vector<double>{1.0});

  const auto open_ended = msgate::thermal_weights(2.0);
  CHECK(open_ended.size() > 40);
  double sum = 0;
  for (double w : open_ended) sum += w;
  CHECK(sum == Approx(1.0).epsilon(1e-14));
  for (size_t n = 1; n < 10; ++n)
    CHECK(open_ended[n] / open_ended[n - 1] == Approx(2.0 / 3.0).epsilon(1e-12));

  const auto capped = msgate::thermal_weights(2.0, 40);
  CHECK(capped.size() == 10);  // n <= n_max/4 - 1
  sum = 0;
  for (double w : capped) sum += w;
  CHECK(sum == Approx(1.0).epsilon(1e-14));
  for (size_t n = 1; n < capped.size(); ++n)
    CHECK(capped[n] / capped[n - 1] == Approx(2.0 / 3.0).epsilon(1e-12));

  CHECK_THROWS_AS(msgate::thermal_weights(-0.1), ConfigError);
  CHECK_THROWS_AS(msgate::thermal_weights(2.0, 3), ConfigError);
}

TEST_CASE("thermal state is the weighted mixture of Fock-state runs") {
  const auto p = drive(0.08, -0.05);
  const double t = 0.37 * p.gate_time;
  const int n_max = 40;
  const double nbar = 1.5;

  const auto mixed = msgate::propagate_analytic(p, t, msgate::MotionalSpec::thermal(nbar, n_max));
  const auto weights = msgate::thermal_weights(nbar, n_max);
  Eigen::Matrix4cd acc = Eigen::Matrix4cd::Zero();
  for (size_t n = 0; n < weights.size(); ++n) {
    const auto st =
        msgate::propagate_analytic(p, t, msgate::MotionalSpec::fock(static_cast<int>(n), n_max));
    acc += weights[n] * st.rho;
  }
  CHECK((mixed.rho - acc).cwiseAbs().maxCoeff() < 1e-12);

  // the lowest rung of the ladder is the ground state
  const auto fock0 = msgate::propagate_analytic(p, t, msgate::MotionalSpec::fock(0, n_max));
  const auto ground = msgate::propagate_analytic(p, t, msgate::MotionalSpec::ground_state(n_max));
  CHECK((fock0.rho - ground.rho).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("loop closure makes the gate insensitive to the thermal occupation") {
  const auto p = msgate::calibrate_gate(ca_sr_table(), "IP", 80e-6, 4);
  double lo = 1.0, hi = 0.0;
  for (double nbar : {0.0, 0.5, 2.0}) {
    const auto st = msgate::propagate_analytic(p, p.gate_time, msgate::MotionalSpec::thermal(nbar));
    const double f = msgate::protocol_fidelity(st);
    lo = std::min(lo, f);
    hi = std::max(hi, f);
    CHECK(st.p1bright() < 1e-12);
    const double purity = (st.rho * st.rho).trace().real();
    CHECK(purity == Approx(1.0).epsilon(1e-12));
  }
  CHECK(hi - lo < 1e-9);
  CHECK(lo > 0.9999);
}

TEST_CASE("parity fringe: unit contrast and the phase convention") {
  auto p = drive(0.08, 0.05);
  p.drive_phase = {0.45, -0.1};
  const auto st = msgate::propagate_analytic(p, p.gate_time);

  std::vector<double> chi(65);
  for (int i = 0; i < 65; ++i) chi[i] = pi * i / 64.0;
  const auto fringe = msgate::parity_scan(st, chi);
  const auto fit = msgate::fit_parity_contrast(fringe);

  CHECK(fit.contrast == Approx(1.0).epsilon(1e-9));
  CHECK(fit.offset == Approx(0.0).scale(1.0).epsilon(1e-9));
  // fitted phase sits at -(bell phase) - pi/2 modulo 2 pi
  const double expected = -p.bell_phase() - pi / 2;
  CHECK(std::remainder(fit.phase - expected, two_pi) == Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(fit.warnings.empty());

  // the fringe is pi periodic
  for (double x : {0.0, 0.3, 1.1, 2.0}) {
    const auto two = msgate::parity_scan(st, {x, x + pi});
    CHECK(two[0].parity == Approx(two[1].parity).scale(1.0).epsilon(1e-12));
  }

  CHECK(msgate::protocol_fidelity(st) == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("dephased mixture: flat fringe and fidelity exactly one half") {
  msgate::TwoQubitState s;
  s.rho(0, 0) = 0.5;
  s.rho(3, 3) = 0.5;

  std::vector<double> chi(65);
  for (int i = 0; i < 65; ++i) chi[i] = pi * i / 64.0;
  const auto fit = msgate::fit_parity_contrast(msgate::parity_scan(s, chi));
  CHECK(fit.contrast < 1e-12);
  CHECK(msgate::protocol_fidelity(s) == 0.5);
}

TEST_CASE("population fidelity estimate rejects unphysical inputs and clamps") {
  CHECK(msgate::bell_fidelity(0.5, 0.5, 1.0) == 1.0);
  CHECK(msgate::bell_fidelity(0.5, 0.5, 0.0) == 0.5);
  CHECK(msgate::bell_fidelity(0.48, 0.47, 0.9) == Approx(0.925).epsilon(1e-12));

  CHECK_THROWS_AS(msgate::bell_fidelity(0.3, 0.3, 0.8), ConfigError);   // C > 2 sqrt(P00 P11)
  CHECK_THROWS_AS(msgate::bell_fidelity(-0.2, 0.5, 0.1), ConfigError);  // range
  CHECK_THROWS_AS(msgate::bell_fidelity(0.5, 1.2, 0.1), ConfigError);

  std::string note;
  const double f = msgate::bell_fidelity(0.5 + 4e-10, 0.5 + 4e-10, 1.0, &note);
  CHECK(f == 1.0);
  CHECK(note.find("clamped") != std::string::npos);
}

TEST_CASE("parity fit needs enough points and a full period") {
  msgate::TwoQubitState s;
  s.rho(0, 0) = 0.5;
  s.rho(3, 3) = 0.5;
  s.rho(0, 3) = s.rho(3, 0) = 0.5;

  std::vector<double> few = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  CHECK_THROWS_AS(msgate::fit_parity_contrast(msgate::parity_scan(s, few)), ConfigError);

  std::vector<double> narrow(12);
  for (int i = 0; i < 12; ++i) narrow[i] = 0.5 * pi * i / 11.0;
  CHECK_THROWS_AS(msgate::fit_parity_contrast(msgate::parity_scan(s, narrow)), ConfigError);

  CHECK_THROWS_AS(msgate::parity_scan(s, {}), ConfigError);
  CHECK_THROWS_AS(msgate::protocol_fidelity(s, 4), ConfigError);
}

TEST_CASE("bright-population zeros sit at every closed loop") {
  const int loops = 3;
  const auto p = msgate::calibrate_gate(ca_sr_table(), "IP", 100e-6, loops);
  std::vector<double> grid(301);
  for (int i = 0; i < 301; ++i) grid[i] = p.gate_time * i / 300.0;

  const auto r = msgate::run_gate(p, msgate::MotionalSpec::ground_state(), grid);
  REQUIRE(r.p1bright_zeros.size() == 3);
  for (int k = 1; k <= 3; ++k)
    CHECK(std::abs(r.p1bright_zeros[k - 1] - k * p.gate_time / 3.0) < 2e-8);

  CHECK(r.fidelity == Approx(1.0).epsilon(1e-9));
  CHECK(r.contrast == Approx(1.0).epsilon(1e-9));
  CHECK(r.times.size() == r.populations.size());
  for (const auto& pop : r.populations)
    CHECK(pop[0] + pop[1] + pop[2] == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("doubling the drive closes the loop but ruins the phase") {
  auto p = msgate::calibrate_gate(ca_sr_table(), "IP", 100e-6, 1);
  p.carrier_rabi = {2.0 * p.carrier_rabi[0], 2.0 * p.carrier_rabi[1]};
  const auto st = msgate::propagate_analytic(p, p.gate_time);
  CHECK(st.p1bright() < 1e-12);  // the trajectory still returns to the origin
  CHECK(msgate::protocol_fidelity(st) == Approx(0.5).epsilon(1e-9));
}

TEST_CASE("ramped drive stays physical over the whole pulse") {
  auto p = msgate::calibrate_gate(ca_sr_table(), "IP", 100e-6, 1);
  p.ramp = {msgate::RampShape::sine_squared, 0.2 * p.gate_time};
  for (double frac : {0.2, 0.5, 0.9, 1.0}) {
    const auto st = msgate::propagate_analytic(p, frac * p.gate_time);
    CHECK(st.rho.trace().real() == Approx(1.0).epsilon(1e-12));
    CHECK((st.rho * st.rho).trace().real() <= 1.0 + 1e-12);
    CHECK(st.p00() >= -1e-12);
    CHECK(st.p11() >= -1e-12);
    CHECK(st.p1bright() >= -1e-12);
  }
  CHECK_THROWS_AS(msgate::propagate_analytic(p, 1.0001 * p.gate_time), ConfigError);
}

TEST_CASE("drive parameter validation") {
  const auto good = drive(0.08, -0.05);
  auto p = good;
  p.detuning = 0;
  CHECK_THROWS_AS(msgate::propagate_analytic(p, 1e-6), ConfigError);
  p = good;
  p.gate_time = -1;
  CHECK_THROWS_AS(msgate::propagate_analytic(p, 1e-6), ConfigError);
  p = good;
  p.loops = 0;
  CHECK_THROWS_AS(msgate::propagate_analytic(p, 1e-6), ConfigError);
  p = good;
  p.nbar = -0.5;
  CHECK_THROWS_AS(msgate::propagate_analytic(p, 1e-6), ConfigError);
  p = good;
  p.ramp = {msgate::RampShape::sine_squared, 0.6 * p.gate_time};
  CHECK_THROWS_AS(msgate::propagate_analytic(p, 1e-6), ConfigError);
  CHECK_THROWS_AS(msgate::propagate_analytic(good, -1e-9), ConfigError);

  CHECK_THROWS_AS(msgate::run_gate(good, msgate::MotionalSpec::ground_state(), {}), ConfigError);
  CHECK_THROWS_AS(
      msgate::run_gate(good, msgate::MotionalSpec::ground_state(), {1e-6, 0.5e-6}), ConfigError);
}
