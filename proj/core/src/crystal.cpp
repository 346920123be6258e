#include "ionchain/crystal.hpp"

#include <algorithm>
#include <cmath>

#include "ionchain/constants.hpp"
#include "ionchain/errors.hpp"

namespace ionchain::crystal {

namespace {

constexpr int kMaxIons = 16;

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Dimensionless chain potential V = sum u_i^2 / 2 + sum_{i<j} 1 / |u_i - u_j|.
VectorXd chain_gradient(const VectorXd& u) {
  const int n = static_cast<int>(u.size());
  VectorXd g = u;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = u[i] - u[j];
      g[i] -= (d > 0 ? 1.0 : -1.0) / (d * d);
    }
  return g;
}

MatrixXd chain_hessian(const VectorXd& u) {
  const int n = static_cast<int>(u.size());
  MatrixXd h = MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double c = 2.0 / std::pow(std::abs(u[i] - u[j]), 3);
      h(i, i) += c;
      h(i, j) -= c;
    }
  return h;
}

VectorXd seed_positions(int n) {
  VectorXd u(n);
  if (n == 2) {
    const double a = std::pow(2.0, -2.0 / 3.0);
    u << -a, a;
  } else if (n == 3) {
    const double a = std::pow(1.25, 1.0 / 3.0);
    u << -a, 0.0, a;
  } else {
    // Uniform spacing close to the true minimum spacing of long chains.
    const double s = 2.018 / std::pow(n, 0.559);
    for (int i = 0; i < n; ++i) u[i] = s * (i - 0.5 * (n - 1));
  }
  return u;
}

void validate(const CrystalConfig& cfg) {
  const int n = static_cast<int>(cfg.ions.size());
  if (n < 1 || n > kMaxIons)
    throw ConfigError("chain must hold between 1 and " + std::to_string(kMaxIons) + " ions");
  if (!(cfg.reference_frequency > 0))
    throw ConfigError("reference frequency must be positive");
  if (!(cfg.reference_species.mass > 0))
    throw ConfigError("reference species mass must be positive");
  for (const auto& ion : cfg.ions)
    if (!(ion.mass > 0)) throw ConfigError("ion mass must be positive");
}

// Sign convention for stored eigenvectors: first non-negligible component >= 0.
void fix_sign(Eigen::VectorXd& b) {
  for (int i = 0; i < b.size(); ++i) {
    if (std::abs(b[i]) > 1e-9) {
      if (b[i] < 0) b = -b;
      return;
    }
  }
}

int sign_changes(const Eigen::VectorXd& b) {
  const double tol = 1e-6 * b.cwiseAbs().maxCoeff();
  int changes = 0;
  double prev = 0;
  for (int i = 0; i < b.size(); ++i) {
    if (std::abs(b[i]) <= tol) continue;
    if (prev != 0 && b[i] * prev < 0) ++changes;
    prev = b[i];
  }
  return changes;
}

std::vector<std::string> mode_labels(const std::vector<Mode>& modes,
                                     const std::vector<species::IonSpecies>& ions) {
  const int n = static_cast<int>(modes.size());
  std::vector<std::string> labels(n);
  labels[0] = "IP";  // lowest mode: all ions in phase
  if (n == 2) {
    labels[1] = "OOP";
  } else if (n == 3 && std::abs(ions[0].mass - ions[2].mass) < 1e-12 * ions[0].mass) {
    // Symmetric chain: identify Stretch (odd, quiet center) and Alt (two nodes)
    // by the node count, robust against frequency-order crossings.
    for (int k = 1; k < 3; ++k)
      labels[k] = sign_changes(modes[k].b) == 1 ? "Stretch" : "Alt";
  } else {
    for (int k = 1; k < n; ++k) labels[k] = "mode" + std::to_string(k + 1);
  }
  return labels;
}

ModeTable assemble(std::vector<species::IonSpecies> ions, std::vector<Mode> modes,
                   std::vector<double> positions) {
  std::sort(modes.begin(), modes.end(),
            [](const Mode& a, const Mode& b) { return a.frequency < b.frequency; });
  for (auto& m : modes) fix_sign(m.b);
  const auto labels = mode_labels(modes, ions);
  for (size_t k = 0; k < modes.size(); ++k) modes[k].label = labels[k];
  ModeTable t;
  t.ions = std::move(ions);
  t.modes = std::move(modes);
  t.positions = std::move(positions);
  return t;
}

}  // namespace

const Mode& ModeTable::at(const std::string& label) const {
  const int i = index_of(label);
  if (i < 0) throw ConfigError("no mode labelled \"" + label + "\" in this chain");
  return modes[i];
}

int ModeTable::index_of(const std::string& label) const {
  for (size_t k = 0; k < modes.size(); ++k)
    if (modes[k].label == label) return static_cast<int>(k);
  return -1;
}

double length_scale(const CrystalConfig& cfg) {
  validate(cfg);
  const double q = constants::elementary_charge;
  const double curvature = cfg.reference_species.mass * cfg.reference_frequency * cfg.reference_frequency;
  return std::cbrt(q * q / (4.0 * constants::pi * constants::vacuum_permittivity * curvature));
}

std::vector<double> equilibrium_dimensionless(int n_ions) {
  if (n_ions < 1 || n_ions > kMaxIons)
    throw ConfigError("chain must hold between 1 and " + std::to_string(kMaxIons) + " ions");
  if (n_ions == 1) return {0.0};

  VectorXd u = seed_positions(n_ions);
  double gnorm = chain_gradient(u).cwiseAbs().maxCoeff();
  for (int iter = 0; iter < 200 && gnorm > 1e-13; ++iter) {
    const VectorXd g = chain_gradient(u);
    const MatrixXd h = chain_hessian(u);
    VectorXd step = h.ldlt().solve(-g);
    double alpha = 1.0;
    VectorXd next = u + step;
    double next_norm = chain_gradient(next).cwiseAbs().maxCoeff();
    while (next_norm > gnorm && alpha > 1e-6) {
      alpha *= 0.5;
      next = u + alpha * step;
      next_norm = chain_gradient(next).cwiseAbs().maxCoeff();
    }
    u = next;
    gnorm = next_norm;
  }
  if (gnorm > 1e-12) throw NumericalError("chain equilibrium did not converge");
  for (int i = 1; i < n_ions; ++i)
    if (u[i] <= u[i - 1]) throw NumericalError("chain equilibrium is not ordered");
  return {u.data(), u.data() + n_ions};
}

std::vector<double> equilibrium_positions(const CrystalConfig& cfg) {
  validate(cfg);
  const double l = length_scale(cfg);
  auto u = equilibrium_dimensionless(static_cast<int>(cfg.ions.size()));
  for (auto& x : u) x *= l;
  return u;
}

ModeTable normal_modes(const CrystalConfig& cfg) {
  validate(cfg);
  const int n = static_cast<int>(cfg.ions.size());
  const auto u_dimless = equilibrium_dimensionless(n);
  const VectorXd u = Eigen::Map<const VectorXd>(u_dimless.data(), n);

  // Mass-weighted Hessian in units of the reference curvature; eigenvalues are
  // (w / w_ref)^2.
  const double m_ref = cfg.reference_species.mass;
  MatrixXd h = chain_hessian(u);
  VectorXd inv_sqrt_mu(n);
  for (int i = 0; i < n; ++i) inv_sqrt_mu[i] = std::sqrt(m_ref / cfg.ions[i].mass);
  h = inv_sqrt_mu.asDiagonal() * h * inv_sqrt_mu.asDiagonal();

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("mode eigensolver failed");

  std::vector<Mode> modes(n);
  for (int k = 0; k < n; ++k) {
    const double lambda = es.eigenvalues()[k];
    if (!(lambda > 0)) throw NumericalError("non-positive mode eigenvalue");
    modes[k].frequency = cfg.reference_frequency * std::sqrt(lambda);
    modes[k].b = es.eigenvectors().col(k);
  }

  const double l = length_scale(cfg);
  std::vector<double> positions(n);
  for (int i = 0; i < n; ++i) positions[i] = l * u[i];
  return assemble(cfg.ions, std::move(modes), std::move(positions));
}

double two_ion_frequency_ratio(double mu) {
  if (!(mu > 0)) throw ConfigError("mass ratio must be positive");
  const double s = std::sqrt(1.0 - mu + mu * mu);
  return std::sqrt((1.0 + mu + s) / (1.0 + mu - s));
}

ModeTable closed_form_two_ion(const species::IonSpecies& heavy,
                              const species::IonSpecies& light,
                              double reference_frequency) {
  if (!(reference_frequency > 0)) throw ConfigError("reference frequency must be positive");
  if (heavy.mass < light.mass) throw ConfigError("two-ion closed form expects (heavy, light)");
  const double mu = species::mass_ratio(heavy, light);
  const double s = std::sqrt(1.0 - mu + mu * mu);
  const double nu_h = reference_frequency;

  // Per-ion amplitude on the lower mode from the other/own mass ratio.
  auto b_low = [](double other_over_own) {
    const double r = std::sqrt(1.0 - other_over_own + other_over_own * other_over_own);
    return std::sqrt((1.0 - other_over_own + r) / (2.0 * r));
  };
  const double bh = b_low(1.0 / mu);
  const double bl = b_low(mu);

  std::vector<Mode> modes(2);
  modes[0].frequency = nu_h * std::sqrt(1.0 + mu - s);
  modes[0].b = Eigen::Vector2d(bh, bl).normalized();
  modes[1].frequency = nu_h * std::sqrt(1.0 + mu + s);
  modes[1].b = Eigen::Vector2d(bl, -bh).normalized();

  CrystalConfig cfg{{heavy, light}, heavy, reference_frequency};
  const double d = std::cbrt(2.0) * length_scale(cfg);
  return assemble({heavy, light}, std::move(modes), {-0.5 * d, 0.5 * d});
}

ModeTable closed_form_three_ion_symmetric(const species::IonSpecies& outer,
                                          const species::IonSpecies& center,
                                          double reference_frequency) {
  if (!(reference_frequency > 0)) throw ConfigError("reference frequency must be positive");
  const double mu = outer.mass / center.mass;   // outer/center
  const double mu_inv = 1.0 / mu;
  const double root = std::sqrt(441.0 - 34.0 * mu_inv + 169.0 * mu_inv * mu_inv);
  const double nu = reference_frequency;

  auto even_mode = [&](double sign) {
    Mode m;
    const double ratio_sq = 1.3 + (21.0 + sign * root) / (10.0 * mu_inv);
    m.frequency = nu * std::sqrt(ratio_sq);
    const double x_center = (13.0 - 5.0 * ratio_sq) / (8.0 * std::sqrt(mu));
    m.b = Eigen::Vector3d(1.0, x_center, 1.0).normalized();
    return m;
  };

  std::vector<Mode> modes(3);
  modes[0] = even_mode(-1.0);
  modes[1].frequency = std::sqrt(3.0) * nu;  // odd mode: center at rest
  modes[1].b = Eigen::Vector3d(1.0, 0.0, -1.0).normalized();
  modes[2] = even_mode(+1.0);

  CrystalConfig cfg{{outer, center, outer}, outer, reference_frequency};
  const double a = std::pow(1.25, 1.0 / 3.0) * length_scale(cfg);
  return assemble({outer, center, outer}, std::move(modes), {-a, 0.0, a});
}

}  // namespace ionchain::crystal
