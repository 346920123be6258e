#include "ionchain/msgate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include "ionchain/constants.hpp"
#include "ionchain/detail/exppoly.hpp"
#include "ionchain/errors.hpp"

namespace boost::numeric::odeint {

// The bundled Eigen adapter deduces the norm's result type from the matrix
// scalar, which is complex here; the error checker needs a real norm.
template <>
struct vector_space_norm_inf<Eigen::VectorXcd> {
  typedef double result_type;
  double operator()(const Eigen::VectorXcd& v) const { return v.cwiseAbs().maxCoeff(); }
};

}  // namespace boost::numeric::odeint

namespace ionchain::msgate {

namespace {

using cd = std::complex<double>;
using Eigen::Matrix2cd;
using Eigen::Matrix4cd;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::Vector4cd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using constants::pi;
using constants::two_pi;

constexpr cd kI(0.0, 1.0);

void validate_drive(const GateParams& p) {
  if (!(p.detuning > 0)) throw ConfigError("gate detuning must be positive");
  if (!(p.gate_time > 0)) throw ConfigError("gate time must be positive");
  if (p.loops < 1) throw ConfigError("loop count must be at least 1");
  if (p.ramp.shape != RampShape::none) {
    if (p.ramp.duration < 0) throw ConfigError("ramp duration must be non-negative");
    if (2.0 * p.ramp.duration > p.gate_time * (1.0 + 1e-12))
      throw ConfigError("ramp edges overlap: 2 x duration exceeds the gate time");
  }
  if (p.nbar < 0) throw ConfigError("nbar must be non-negative");
}

double envelope_value(const RampSpec& r, double t, double gate_time) {
  if (r.shape == RampShape::none || r.duration <= 0) return 1.0;
  const double tau = r.duration;
  if (t < tau) {
    const double s = std::sin(pi * t / (2.0 * tau));
    return s * s;
  }
  if (t > gate_time - tau) {
    const double s = std::sin(pi * (gate_time - t) / (2.0 * tau));
    return s * s;
  }
  return 1.0;
}

// Eigenbasis of cos(phi) sigma_y + sin(phi) sigma_x; columns are the +1 / -1
// eigenvectors.  phi = 0 recovers sigma_y.
Matrix2cd axis_basis(double phi) {
  const double r = 1.0 / std::sqrt(2.0);
  const cd a = kI * std::exp(-kI * phi) * r;
  Matrix2cd v;
  v << r, r, a, -a;
  return v;
}

Matrix2cd axis_operator(double phi) {
  Matrix2cd s;
  s << 0.0, -kI * std::exp(kI * phi), kI * std::exp(-kI * phi), 0.0;
  return s;
}

Matrix4cd kron2(const Matrix2cd& a, const Matrix2cd& b) {
  Matrix4cd k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return k;
}

// Characteristic-function kernel of the initial motional state:
// G(x) = Tr[rho_m D(z)] with x = |z|^2.
std::function<double(double)> motional_kernel(const MotionalSpec& m) {
  switch (m.initial) {
    case MotionalInit::ground:
      return [](double x) { return std::exp(-0.5 * x); };
    case MotionalInit::fock: {
      if (m.fock_n < 0) throw ConfigError("Fock level must be non-negative");
      const unsigned n = static_cast<unsigned>(m.fock_n);
      return [n](double x) { return std::exp(-0.5 * x) * std::laguerre(n, x); };
    }
    case MotionalInit::thermal: {
      if (m.n_max == 0) {
        // Untruncated geometric average has the exact closed form.
        const double nb = m.nbar;
        if (nb < 0) throw ConfigError("nbar must be non-negative");
        return [nb](double x) { return std::exp(-x * (nb + 0.5)); };
      }
      const auto w = thermal_weights(m.nbar, m.n_max);
      return [w](double x) {
        double v = 0;
        const double e = std::exp(-0.5 * x);
        for (unsigned n = 0; n < w.size(); ++n) v += w[n] * e * std::laguerre(n, x);
        return v;
      };
    }
  }
  throw ConfigError("unknown motional initial state");
}

TwoQubitState analytic_state(const GateParams& p, double t, const std::function<double(double)>& G) {
  const auto [beta, theta] = loop_integrals(p, t);
  const auto g = p.sideband_product();
  const double S[4] = {g[0] + g[1], g[0] - g[1], -g[0] + g[1], -g[0] - g[1]};
  const double b2 = std::norm(beta);

  const Matrix4cd T = kron2(axis_basis(p.drive_phase[0]), axis_basis(p.drive_phase[1]));
  Vector4cd start;
  start << 0.0, 0.0, 0.0, 1.0;  // |11>
  const Vector4cd c = T.adjoint() * start;

  Matrix4cd rho_y;
  for (int s = 0; s < 4; ++s)
    for (int r = 0; r < 4; ++r) {
      const cd phase = std::exp(kI * theta * (S[s] * S[s] - S[r] * S[r]));
      const double dS = S[s] - S[r];
      rho_y(s, r) = c[s] * std::conj(c[r]) * phase * G(b2 * dS * dS);
    }

  TwoQubitState out;
  out.rho = T * rho_y * T.adjoint();
  return out;
}

// ---------------------------------------------------------------------------
// Numerical propagator

std::vector<std::pair<int, double>> motional_members(const MotionalSpec& m) {
  m.validate_for_oracle();
  switch (m.initial) {
    case MotionalInit::ground:
      return {{0, 1.0}};
    case MotionalInit::fock:
      return {{m.fock_n, 1.0}};
    case MotionalInit::thermal: {
      const auto w = thermal_weights(m.nbar, m.n_max);
      std::vector<std::pair<int, double>> out;
      for (int n = 0; n < static_cast<int>(w.size()); ++n) out.push_back({n, w[n]});
      return out;
    }
  }
  throw ConfigError("unknown motional initial state");
}

class SchrodingerRhs {
 public:
  SchrodingerRhs(const GateParams& p, const std::vector<ModeChannel>& channels, Hamiltonian ham)
      : ham_(ham),
        rabi_{p.carrier_rabi},
        phase_{p.drive_phase},
        ramp_(p.ramp),
        gate_time_(p.gate_time),
        delta_(p.detuning),
        n_modes_(static_cast<int>(channels.size())) {
    if (n_modes_ < 1 || n_modes_ > 2)
      throw ConfigError("the numerical propagator handles one or two modes");
    if (ham_ == Hamiltonian::lamb_dicke && n_modes_ != 1)
      throw ConfigError("the Lamb-Dicke propagator handles a single mode");

    for (int m = 0; m < n_modes_; ++m) {
      const auto& ch = channels[m];
      ch.motion.validate_for_oracle();
      dim_[m] = ch.motion.n_max;
      freq_[m] = ch.frequency;
      eta_[m] = ch.eta;
      if (ham_ == Hamiltonian::full) {
        if (!(ch.frequency > 0)) throw ConfigError("mode frequency must be positive");
        // exp(i eta (a + a^dag)) once per (mode, ion) from the tridiagonal
        // position operator; exactly unitary up to the eigensolve itself.
        MatrixXd x = MatrixXd::Zero(dim_[m], dim_[m]);
        for (int n = 0; n + 1 < dim_[m]; ++n) x(n, n + 1) = x(n + 1, n) = std::sqrt(n + 1.0);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(x);
        if (es.info() != Eigen::Success) throw NumericalError("position-operator eigensolve failed");
        for (int j = 0; j < 2; ++j) {
          VectorXcd ph(dim_[m]);
          for (int k = 0; k < dim_[m]; ++k)
            ph[k] = std::exp(kI * ch.eta[j] * es.eigenvalues()[k]);
          disp_[m][j] = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().transpose();
          disp_conj_[m][j] = disp_[m][j].conjugate();
        }
      }
    }
    drive_freq_ = (ham_ == Hamiltonian::full) ? freq_[0] + delta_ : 0.0;
    block_ = dim_[0] * dim_[1];
    scratch_a_.resize(4 * block_);
    scratch_b_.resize(4 * block_);
  }

  int n_modes() const { return n_modes_; }
  int dim(int m) const { return dim_[m]; }
  int block() const { return block_; }
  int total_dim() const { return 4 * block_; }
  int index(int q, int n1, int n2) const { return (q * dim_[0] + n1) * dim_[1] + n2; }

  double max_frequency() const {
    double f = std::abs(delta_);
    if (ham_ == Hamiltonian::full)
      for (int m = 0; m < n_modes_; ++m) f = std::max(f, freq_[m] + std::abs(delta_));
    return f;
  }

  void operator()(const VectorXcd& psi, VectorXcd& dpsi, double t) const {
    dpsi.setZero(psi.size());
    const double env = envelope_value(ramp_, t, gate_time_);
    if (env == 0.0) return;
    if (ham_ == Hamiltonian::lamb_dicke)
      rhs_lamb_dicke(psi, dpsi, t, env);
    else
      rhs_full(psi, dpsi, t, env);
  }

  // Population in the top two Fock levels of mode m.
  double edge_population(const VectorXcd& psi, int m) const {
    double pop = 0;
    const int nm = dim_[m];
    for (int q = 0; q < 4; ++q)
      for (int n1 = 0; n1 < dim_[0]; ++n1)
        for (int n2 = 0; n2 < dim_[1]; ++n2) {
          const int n = (m == 0) ? n1 : n2;
          if (n >= nm - 2) pop += std::norm(psi[index(q, n1, n2)]);
        }
    return pop;
  }

 private:
  // d psi / dt = +i sum_j g_j r(t) (a e^{-i delta t} + a^dag e^{i delta t}) sigma_axis_j psi
  void rhs_lamb_dicke(const VectorXcd& psi, VectorXcd& dpsi, double t, double env) const {
    const int n1 = dim_[0];
    const cd eb = std::exp(-kI * delta_ * t);
    const cd ebc = std::conj(eb);
    // u = (a e^{-i delta t} + a^dag e^{i delta t}) psi, shared by both ions
    VectorXcd& u = scratch_a_;
    for (int q = 0; q < 4; ++q)
      for (int n = 0; n < n1; ++n) {
        cd v = 0;
        if (n + 1 < n1) v += eb * std::sqrt(n + 1.0) * psi[q * n1 + n + 1];
        if (n > 0) v += ebc * std::sqrt(double(n)) * psi[q * n1 + n - 1];
        u[q * n1 + n] = v;
      }
    for (int j = 0; j < 2; ++j) {
      const double g = eta_[0][j] * rabi_[j];
      if (g == 0.0) continue;
      const Matrix2cd s = axis_operator(phase_[j]);
      add_spin(dpsi, u, j, kI * env * g * s);
    }
  }

  // d psi / dt = -i sum_j Omega_j r(t) 2 cos((w0 + delta) t)
  //              (D_j(t) sigma_+^j + D_j(t)^dag sigma_-^j) psi
  void rhs_full(const VectorXcd& psi, VectorXcd& dpsi, double t, double env) const {
    const double drive = 2.0 * std::cos(drive_freq_ * t);
    std::array<VectorXcd, 2> phases;
    for (int m = 0; m < n_modes_; ++m) {
      phases[m].resize(dim_[m]);
      for (int n = 0; n < dim_[m]; ++n) phases[m][n] = std::exp(kI * freq_[m] * t * double(n));
    }
    for (int j = 0; j < 2; ++j) {
      if (rabi_[j] == 0.0) continue;
      const cd coef = -kI * rabi_[j] * env * drive;
      // raising part: D_j sigma_+ psi
      apply_sigma(scratch_a_, psi, j, /*plus=*/true);
      apply_displacement(scratch_a_, j, phases, /*dagger=*/false);
      dpsi += coef * scratch_a_;
      // lowering part: D_j^dag sigma_- psi
      apply_sigma(scratch_a_, psi, j, /*plus=*/false);
      apply_displacement(scratch_a_, j, phases, /*dagger=*/true);
      dpsi += coef * scratch_a_;
    }
  }

  // out += (2x2 matrix s acting on qubit j) applied to v
  void add_spin(VectorXcd& out, const VectorXcd& v, int j, const Matrix2cd& s) const {
    const int b = block_;
    auto seg = [&](VectorXcd& x, int q) { return x.segment(q * b, b); };
    auto cseg = [&](const VectorXcd& x, int q) { return x.segment(q * b, b); };
    if (j == 0) {
      for (int q2 = 0; q2 < 2; ++q2)
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c)
            if (s(r, c) != 0.0) seg(out, 2 * r + q2) += s(r, c) * cseg(v, 2 * c + q2);
    } else {
      for (int q1 = 0; q1 < 2; ++q1)
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c)
            if (s(r, c) != 0.0) seg(out, 2 * q1 + r) += s(r, c) * cseg(v, 2 * q1 + c);
    }
  }

  // out = sigma_+/- on qubit j applied to psi (sigma_+ = |0><1|)
  void apply_sigma(VectorXcd& out, const VectorXcd& psi, int j, bool plus) const {
    out.setZero(psi.size());
    const int b = block_;
    const int dst0 = plus ? 0 : 1;  // sigma_+ maps q_j = 1 -> 0
    if (j == 0) {
      for (int q2 = 0; q2 < 2; ++q2)
        out.segment((2 * dst0 + q2) * b, b) = psi.segment((2 * (1 - dst0) + q2) * b, b);
    } else {
      for (int q1 = 0; q1 < 2; ++q1)
        out.segment((2 * q1 + dst0) * b, b) = psi.segment((2 * q1 + (1 - dst0)) * b, b);
    }
  }

  // v <- D_j(t) v (or its dagger), D_j(t) = Phi(t) exp(i eta_j (a+a^dag)) Phi(t)^dag
  // per mode, with Phi(t) the free-evolution phase diagonal.
  void apply_displacement(VectorXcd& v, int j, const std::array<VectorXcd, 2>& phases,
                          bool dagger) const {
    for (int m = 0; m < n_modes_; ++m) {
      phase_scale(v, m, phases[m], /*conjugate=*/true);
      mode_apply(v, m, dagger ? disp_conj_[m][j] : disp_[m][j]);
      phase_scale(v, m, phases[m], /*conjugate=*/false);
    }
  }

  void phase_scale(VectorXcd& v, int m, const VectorXcd& ph, bool conjugate) const {
    for (int q = 0; q < 4; ++q)
      for (int i1 = 0; i1 < dim_[0]; ++i1)
        for (int i2 = 0; i2 < dim_[1]; ++i2) {
          const cd f = ph[(m == 0) ? i1 : i2];
          v[index(q, i1, i2)] *= conjugate ? std::conj(f) : f;
        }
  }

  void mode_apply(VectorXcd& v, int m, const MatrixXcd& op) const {
    using RowMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    VectorXcd& tmp = scratch_b_;
    for (int q = 0; q < 4; ++q) {
      Eigen::Map<const RowMat> in(v.data() + q * block_, dim_[0], dim_[1]);
      Eigen::Map<RowMat> out(tmp.data() + q * block_, dim_[0], dim_[1]);
      if (m == 0)
        out = op * in;
      else
        out = in * op.transpose();
    }
    v.swap(tmp);
  }

  Hamiltonian ham_;
  std::array<double, 2> rabi_;
  std::array<double, 2> phase_;
  RampSpec ramp_;
  double gate_time_;
  double delta_;
  double drive_freq_ = 0;
  int n_modes_;
  std::array<int, 2> dim_{1, 1};
  std::array<double, 2> freq_{0, 0};
  std::array<std::array<double, 2>, 2> eta_{};
  std::array<std::array<MatrixXcd, 2>, 2> disp_{};
  std::array<std::array<MatrixXcd, 2>, 2> disp_conj_{};
  int block_ = 1;
  mutable VectorXcd scratch_a_, scratch_b_;
};

void reduce_into(Matrix4cd& rho, const VectorXcd& psi, int block, double weight) {
  for (int q = 0; q < 4; ++q)
    for (int r = 0; r < 4; ++r) {
      cd v = 0;
      for (int k = 0; k < block; ++k) v += psi[q * block + k] * std::conj(psi[r * block + k]);
      rho(q, r) += weight * v;
    }
}

std::vector<std::array<double, 3>> to_populations(const std::vector<TwoQubitState>& states) {
  std::vector<std::array<double, 3>> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back({s.p00(), s.p1bright(), s.p11()});
  return out;
}

// Local minima of P1bright that touch zero, refined by the quadratic through
// the three bracketing samples.
std::vector<double> zero_census(const std::vector<double>& t,
                                const std::vector<std::array<double, 3>>& pops) {
  constexpr double kZero = 1e-6;
  std::vector<double> zeros;
  const int n = static_cast<int>(t.size());
  for (int i = 1; i + 1 < n; ++i) {
    const double pm = pops[i - 1][1], p0 = pops[i][1], pp = pops[i + 1][1];
    if (p0 > kZero || p0 > pm || p0 > pp) continue;
    const double denom = pm - 2.0 * p0 + pp;
    double t_star = t[i];
    if (denom > 0) {
      // uniform-grid vertex offset is exact enough for the refined report
      const double h = 0.5 * (t[i + 1] - t[i - 1]);
      t_star = t[i] + 0.5 * h * (pm - pp) / denom;
    }
    zeros.push_back(t_star);
  }
  if (n >= 2 && pops[n - 1][1] < kZero && pops[n - 1][1] <= pops[n - 2][1])
    zeros.push_back(t[n - 1]);
  return zeros;
}

std::vector<TwoQubitState> states_over_grid(const GateParams& p, const MotionalSpec& motion,
                                            const std::vector<double>& grid, Propagator prop) {
  if (grid.empty()) throw ConfigError("empty time grid");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0) throw ConfigError("negative time in grid");
    if (i > 0 && grid[i] <= grid[i - 1]) throw ConfigError("time grid must be increasing");
  }
  if (prop == Propagator::analytic) {
    std::vector<TwoQubitState> states;
    states.reserve(grid.size());
    for (double t : grid) states.push_back(propagate_analytic(p, t, motion));
    return states;
  }
  const std::vector<ModeChannel> channels = {{p.mode_frequency, p.eta, motion}};
  const auto ham = (prop == Propagator::oracle_full) ? Hamiltonian::full : Hamiltonian::lamb_dicke;
  return propagate_oracle_times(p, channels, ham, grid);
}

}  // namespace

double GateParams::bell_phase() const {
  // The conditional phase is exp(i gamma sigma_axis x sigma_axis) with
  // gamma = pi/4 sign(g0 g1) at calibration, so the Bell phase flips with the
  // sign of the coupling product.
  const auto g = sideband_product();
  const double s = (g[0] * g[1] < 0) ? -1.0 : 1.0;
  return std::remainder(s * pi / 2 - drive_phase[0] - drive_phase[1], two_pi);
}

void MotionalSpec::validate_for_oracle() const {
  if (n_max < 4) throw ConfigError("n_max must be at least 4");
  if (nbar < 0) throw ConfigError("nbar must be non-negative");
  if (initial == MotionalInit::thermal && n_max < 4.0 * (nbar + 1.0))
    throw ConfigError("n_max must be at least 4 (nbar + 1)");
  if (initial == MotionalInit::fock) {
    if (fock_n < 0) throw ConfigError("Fock level must be non-negative");
    if (fock_n > n_max - 3)
      throw ConfigError("initial Fock level too close to the truncation edge");
  }
}

std::vector<double> thermal_weights(double nbar, int n_max) {
  if (nbar < 0) throw ConfigError("nbar must be non-negative");
  if (nbar == 0.0) return {1.0};
  const int cap = (n_max > 0) ? n_max / 4 - 1 : std::numeric_limits<int>::max();
  if (cap < 0) throw ConfigError("n_max too small for thermal averaging");
  std::vector<double> w;
  const double ratio = nbar / (nbar + 1.0);
  double wn = 1.0 / (nbar + 1.0);
  double cum = 0;
  for (int n = 0; cum < 1.0 - 1e-10 && n <= cap; ++n) {
    w.push_back(wn);
    cum += wn;
    wn *= ratio;
  }
  for (auto& x : w) x /= cum;
  return w;
}

std::pair<cd, double> loop_integrals(const GateParams& p, double t) {
  validate_drive(p);
  if (t < 0) throw ConfigError("time must be non-negative");
  const double d = p.detuning;

  if (p.ramp.shape == RampShape::none || p.ramp.duration <= 0) {
    const cd beta = (std::exp(kI * d * t) - 1.0) / d;
    const double theta = (d * t - std::sin(d * t)) / (d * d);
    return {beta, theta};
  }

  if (t > p.gate_time * (1.0 + 1e-12))
    throw ConfigError("time beyond the end of the ramped pulse");
  using detail::ExpPoly;
  const double T = p.gate_time;
  const double tau = p.ramp.duration;
  const double wr = pi / tau;

  // Envelope on each piece as constant-coefficient exponentials in t.
  const ExpPoly half = ExpPoly::constant(0.5);
  const ExpPoly rise = half + ExpPoly::term(-0.25, 0, wr) + ExpPoly::term(-0.25, 0, -wr);
  const ExpPoly fall = half + ExpPoly::term(cd(-0.25) * std::exp(kI * wr * T), 0, -wr) +
                       ExpPoly::term(cd(-0.25) * std::exp(-kI * wr * T), 0, wr);
  const ExpPoly flat = ExpPoly::constant(1.0);

  struct Piece {
    double a, b;
    ExpPoly r;
  };
  const std::vector<Piece> pieces = {{0.0, tau, rise}, {tau, T - tau, flat}, {T - tau, T, fall}};

  cd beta = 0;
  double theta = 0;
  const ExpPoly carrier = ExpPoly::term(kI, 0, d);  // i e^{i delta t}
  for (const auto& piece : pieces) {
    if (t <= piece.a + 1e-300) break;
    const double b_end = std::min(piece.b, t);
    if (b_end <= piece.a) continue;
    const ExpPoly f_beta = piece.r * carrier;                 // beta' on this piece
    const ExpPoly F = f_beta.antiderivative(T);
    const ExpPoly beta_poly = F + ExpPoly::constant(beta - F.eval(piece.a));
    // theta' = Im(beta' conj(beta))
    const ExpPoly f_theta = f_beta * beta_poly.conj();
    theta += f_theta.integrate(piece.a, b_end, T).imag();
    beta = beta_poly.eval(b_end);
    if (b_end >= t) break;
  }
  return {beta, theta};
}

TwoQubitState propagate_analytic(const GateParams& p, double t) {
  MotionalSpec m;
  m.initial = (p.nbar > 0) ? MotionalInit::thermal : MotionalInit::ground;
  m.nbar = p.nbar;
  m.n_max = 0;  // untruncated: thermal kernel in closed form
  return propagate_analytic(p, t, m);
}

TwoQubitState propagate_analytic(const GateParams& p, double t, const MotionalSpec& motion) {
  validate_drive(p);
  if (t < 0) throw ConfigError("time must be non-negative");
  return analytic_state(p, t, motional_kernel(motion));
}

TwoQubitState propagate_oracle(const GateParams& p, const MotionalSpec& motion, Hamiltonian ham,
                               double t) {
  const std::vector<ModeChannel> channels = {{p.mode_frequency, p.eta, motion}};
  return propagate_oracle_times(p, channels, ham, {t}).back();
}

std::vector<TwoQubitState> propagate_oracle_times(const GateParams& p,
                                                  const std::vector<ModeChannel>& channels,
                                                  Hamiltonian ham,
                                                  const std::vector<double>& times,
                                                  const OracleOptions& opts) {
  validate_drive(p);
  if (times.empty()) throw ConfigError("no output times requested");
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0) throw ConfigError("time must be non-negative");
    if (i > 0 && times[i] <= times[i - 1]) throw ConfigError("output times must be increasing");
  }

  SchrodingerRhs rhs(p, channels, ham);

  // Integration always starts from t = 0.
  std::vector<double> grid = times;
  bool skip_first = false;
  if (grid.front() > 0) {
    grid.insert(grid.begin(), 0.0);
    skip_first = true;
  }

  // Weighted initial Fock members per mode, identical to the analytic
  // ensemble rule so the two routes average the same mixture.
  std::vector<std::vector<std::pair<int, double>>> members;
  for (const auto& ch : channels) members.push_back(motional_members(ch.motion));

  std::vector<Matrix4cd> rho(times.size(), Matrix4cd::Zero());

  namespace ode = boost::numeric::odeint;
  using Stepper = ode::runge_kutta_dopri5<VectorXcd, double, VectorXcd, double,
                                          ode::vector_space_algebra>;

  const double span = grid.back() - grid.front();
  double dt0 = span > 0 ? span / 100.0 : 1e-9;
  const double fmax = rhs.max_frequency();
  if (fmax > 0) dt0 = std::min(dt0, 0.02 / fmax);

  const auto second_members =
      (channels.size() > 1) ? members[1] : std::vector<std::pair<int, double>>{{0, 1.0}};

  for (const auto& [n1, w1] : members[0]) {
    for (const auto& [n2, w2] : second_members) {
      const double weight = w1 * w2;
      VectorXcd psi = VectorXcd::Zero(rhs.total_dim());
      psi[rhs.index(3, n1, channels.size() > 1 ? n2 : 0)] = 1.0;

      size_t slot = 0;
      bool first = true;
      auto observer = [&](const VectorXcd& x, double) {
        for (int m = 0; m < rhs.n_modes(); ++m) {
          const double leak = rhs.edge_population(x, m);
          if (leak > opts.leak_threshold) {
            const int nm = rhs.dim(m);
            throw LeakageError(nm, nm + std::max(8, nm / 2), leak);
          }
        }
        if (first && skip_first) {
          first = false;
          return;
        }
        first = false;
        reduce_into(rho[slot], x, rhs.block(), weight);
        ++slot;
      };

      if (span == 0.0) {
        // Single requested time t = 0: no integration needed.
        observer(psi, 0.0);
        continue;
      }
      auto controlled = ode::make_controlled(opts.abs_tol, opts.rel_tol, Stepper());
      ode::integrate_times(controlled, std::ref(rhs), psi, grid.begin(), grid.end(), dt0,
                           observer);
    }
  }

  std::vector<TwoQubitState> out(times.size());
  for (size_t i = 0; i < times.size(); ++i) out[i].rho = rho[i];
  return out;
}

GateResult population_flopping(const GateParams& p, const MotionalSpec& motion,
                               const std::vector<double>& t_grid, Propagator prop) {
  const auto states = states_over_grid(p, motion, t_grid, prop);
  GateResult r;
  r.times = t_grid;
  r.populations = to_populations(states);
  r.p1bright_zeros = zero_census(r.times, r.populations);
  return r;
}

std::vector<ParityPoint> parity_scan(const TwoQubitState& state,
                                     const std::vector<double>& chi_grid) {
  if (chi_grid.empty()) throw ConfigError("empty analysis-phase grid");
  std::vector<ParityPoint> out;
  out.reserve(chi_grid.size());
  for (double chi : chi_grid) {
    // pi/2 rotation about the equatorial axis at angle chi, both qubits
    Matrix2cd rr;
    const double r = 1.0 / std::sqrt(2.0);
    rr << r, -kI * std::exp(-kI * chi) * r, -kI * std::exp(kI * chi) * r, r;
    const Matrix4cd u = kron2(rr, rr);
    const Matrix4cd rho = u * state.rho * u.adjoint();
    const double parity =
        (rho(0, 0) + rho(3, 3) - rho(1, 1) - rho(2, 2)).real();
    out.push_back({chi, parity});
  }
  return out;
}

ParityFit fit_parity_contrast(const std::vector<ParityPoint>& fringe) {
  if (fringe.size() < 8) throw ConfigError("parity fit needs at least 8 fringe points");
  double lo = fringe.front().chi, hi = fringe.front().chi;
  for (const auto& p : fringe) {
    lo = std::min(lo, p.chi);
    hi = std::max(hi, p.chi);
  }
  if (hi - lo < pi - 1e-9)
    throw ConfigError("parity fringe must span at least one period (pi)");

  const int n = static_cast<int>(fringe.size());
  MatrixXd a(n, 3);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    a(i, 0) = std::sin(2.0 * fringe[i].chi);
    a(i, 1) = std::cos(2.0 * fringe[i].chi);
    a(i, 2) = 1.0;
    y[i] = fringe[i].parity;
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(a);
  if (qr.rank() < 3) throw NumericalError("degenerate parity fit");
  const Eigen::Vector3d coef = qr.solve(y);

  ParityFit fit;
  fit.contrast = std::hypot(coef[0], coef[1]);
  fit.phase = std::atan2(coef[1], coef[0]);
  fit.offset = coef[2];
  if (std::abs(fit.offset) > 0.05)
    fit.warnings.push_back("parity fringe offset " + std::to_string(fit.offset) +
                           " exceeds 0.05; analysis pulses or state preparation look biased");
  return fit;
}

double bell_fidelity(double p00, double p11, double contrast, std::string* warning) {
  constexpr double tol = 1e-9;
  auto check_range = [&](double v, const char* name) {
    if (v < -1e-12 || v > 1.0 + tol)
      throw ConfigError(std::string(name) + " outside [0, 1]");
  };
  check_range(p00, "P00");
  check_range(p11, "P11");
  check_range(contrast, "contrast");
  if (contrast > 2.0 * std::sqrt(std::max(0.0, p00 * p11)) + tol)
    throw ConfigError("unphysical inputs: contrast exceeds 2 sqrt(P00 P11)");
  double f = 0.5 * (p00 + p11 + contrast);
  if (f > 1.0) {
    if (warning) *warning += "fidelity clamped to 1";
    f = 1.0;
  } else if (f < 0.0) {
    if (warning) *warning += "fidelity clamped to 0";
    f = 0.0;
  }
  return f;
}

double state_fidelity(const TwoQubitState& s, double bell_phase) {
  Vector4cd v;
  v << 1.0, 0.0, 0.0, std::exp(kI * bell_phase);
  v /= std::sqrt(2.0);
  return (v.adjoint() * s.rho * v)(0, 0).real();
}

double protocol_fidelity(const TwoQubitState& s, int chi_points) {
  if (chi_points < 8) throw ConfigError("need at least 8 analysis phases");
  std::vector<double> grid(chi_points);
  for (int i = 0; i < chi_points; ++i) grid[i] = pi * double(i) / double(chi_points - 1);
  const auto fit = fit_parity_contrast(parity_scan(s, grid));
  return bell_fidelity(s.p00(), s.p11(), fit.contrast);
}

GateParams calibrate_gate(const coupling::CouplingTable& table, const std::string& mode,
                          double gate_time, int loops,
                          std::optional<std::pair<int, int>> driven) {
  if (!(gate_time > 0)) throw ConfigError("gate time must be positive");
  if (loops < 1) throw ConfigError("loop count must be at least 1");
  const int n = static_cast<int>(table.ions.size());
  if (n < 2) throw ConfigError("gate calibration needs at least two ions");
  const std::pair<int, int> pair = driven.value_or(std::make_pair(0, n - 1));
  if (pair.first == pair.second || pair.first < 0 || pair.second < 0 || pair.first >= n ||
      pair.second >= n)
    throw ConfigError("driven ions must be two distinct chain indices");

  GateParams p;
  p.mode = mode;
  p.loops = loops;
  p.gate_time = gate_time;
  p.detuning = two_pi * loops / gate_time;
  const double product = p.detuning / (4.0 * std::sqrt(double(loops)));
  const std::array<int, 2> ions = {pair.first, pair.second};
  for (int j = 0; j < 2; ++j) {
    const auto& e = table.at(ions[j], mode);
    p.mode_frequency = e.mode_frequency;
    if (e.eta < 1e-12)
      throw ConfigError("ion " + std::to_string(ions[j]) + " (" + e.species +
                        ") is decoupled from mode \"" + mode + "\"; cannot drive the gate");
    p.eta[j] = e.eta_signed;
    p.carrier_rabi[j] = product / e.eta;
  }
  return p;
}

GateResult run_gate(const GateParams& p, const MotionalSpec& motion,
                    const std::vector<double>& t_grid, Propagator prop, int chi_points) {
  const auto states = states_over_grid(p, motion, t_grid, prop);
  GateResult r;
  r.times = t_grid;
  r.populations = to_populations(states);
  r.p1bright_zeros = zero_census(r.times, r.populations);

  const TwoQubitState& last = states.back();
  std::vector<double> chi(chi_points);
  for (int i = 0; i < chi_points; ++i) chi[i] = pi * double(i) / double(chi_points - 1);
  r.parity_fringe = parity_scan(last, chi);
  const auto fit = fit_parity_contrast(r.parity_fringe);
  r.contrast = fit.contrast;
  r.fit_phase = fit.phase;
  r.fit_offset = fit.offset;
  r.fidelity = bell_fidelity(last.p00(), last.p11(), fit.contrast);
  return r;
}

}  // namespace ionchain::msgate
