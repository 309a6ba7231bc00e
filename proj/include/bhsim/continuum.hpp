// continuum.hpp — wave packets on a fine chain probing the horizon.
//
// The packet obeys  -i d psi_n / dt = kappa_n psi_{n-1} + kappa_{n+1} psi_{n+1}
// + mu psi_n,  with kappa_n = (f(x_{n+1}) + f(x_n)) / (8 d); note the bond
// here is indexed by its right site, one slot off from the lattice module's
// left-site convention.  The grid is centered so x = 0 (the horizon of
// f(x) = tanh(alpha x)) falls on site floor(n/2).

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "bhsim/propagate.hpp"
#include "bhsim/units.hpp"

namespace bhsim::continuum {

using Complex = std::complex<double>;

// ---------------------------------- config -----------------------------------

struct PacketConfig {
  int n = 0;            // sites
  double d = 0.0;       // lattice constant
  double alpha = 0.0;   // metric steepness, f(x) = tanh(alpha x)
  double k = 0.0;       // carrier wavenumber
  double delta = 0.0;   // packet width
  double x0 = 0.0;      // initial center
  double mu = 0.0;      // constant on-site potential

  double site_x(int s) const { return (s - n / 2) * d; }

  void validate() const {
    if (n < 8) throw std::invalid_argument("PacketConfig: need at least 8 sites");
    if (d <= 0 || delta <= 0) throw std::invalid_argument("PacketConfig: d and delta must be positive");
    // 5 sigma of exp(-x^2/Delta^2) is 5 Delta / sqrt(2)
    const double support = 5.0 * delta / std::sqrt(2.0);
    if (x0 - support < site_x(0) || x0 + support > site_x(n - 1))
      throw std::invalid_argument("PacketConfig: packet support does not fit the chain");
  }
};

// --------------------------------- dispersion ---------------------------------

// omega_k = sin(2 k d) / (2 d); linear (massless) for kd << 1, band maximum
// 1/(2d) at kd = pi/4.
inline double dispersion(double k, double d) {
  if (d <= 0) throw std::invalid_argument("dispersion: lattice constant must be positive");
  return std::sin(2.0 * k * d) / (2.0 * d);
}

// ----------------------------------- packet -----------------------------------

// psi_n(0) = Z^-1 exp(-(x_n - x0)^2 / Delta^2) exp(i 2 x_n (k - pi/(4d))),
// normalized; rejects configurations leaking more than 1e-6 weight onto the
// boundary sites.
inline Eigen::VectorXcd gaussian_packet(const PacketConfig& cfg) {
  cfg.validate();
  Eigen::VectorXcd psi(cfg.n);
  const double carrier = 2.0 * (cfg.k - pi / (4.0 * cfg.d));
  for (int s = 0; s < cfg.n; ++s) {
    const double x = cfg.site_x(s);
    const double envelope = std::exp(-(x - cfg.x0) * (x - cfg.x0) / (cfg.delta * cfg.delta));
    psi(s) = envelope * std::exp(Complex(0, carrier * x));
  }
  psi.normalize();
  if (std::norm(psi(0)) + std::norm(psi(cfg.n - 1)) > 1e-6)
    throw std::invalid_argument("gaussian_packet: more than 1e-6 weight at the boundary sites");
  return psi;
}

// ------------------------------- time evolution -------------------------------

enum class Engine { automatic, runge_kutta, chebyshev };

struct PacketTrajectory {
  std::vector<double> times;
  Eigen::MatrixXd density;   // row per time, |psi_n|^2
  Eigen::VectorXd center;    // sum x_n |psi_n|^2 per time
  Eigen::VectorXd norm;      // total weight per time
  Eigen::VectorXcd final_state;
};

// Couplings of the packet equation as an effective tridiagonal operator:
// i d psi/dt = T psi with T off-diagonal -kappa and diagonal -mu.
inline propagate::Tridiagonal packet_operator(const PacketConfig& cfg, const std::function<double(double)>& f) {
  propagate::Tridiagonal t;
  t.diag = Eigen::VectorXd::Constant(cfg.n, -cfg.mu);
  t.offdiag.resize(cfg.n - 1);
  for (int b = 0; b < cfg.n - 1; ++b) {
    // bond between sites b and b+1 carries kappa_{n = b+1}
    const double x_n = cfg.site_x(b + 1);
    t.offdiag(b) = -(f(x_n + cfg.d) + f(x_n)) / (8.0 * cfg.d);
  }
  return t;
}

inline PacketTrajectory evolve_tridiagonal(const propagate::Tridiagonal& op, const Eigen::VectorXcd& psi0,
                                           const std::vector<double>& x_grid, const std::vector<double>& t_grid,
                                           Engine engine, double boundary_tol) {
  if (t_grid.empty()) throw std::invalid_argument("evolve_tridiagonal: empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (t_grid[i] <= t_grid[i - 1]) throw std::invalid_argument("evolve_tridiagonal: time grid must be increasing");
  if (t_grid.front() < 0) throw std::invalid_argument("evolve_tridiagonal: time grid must be nonnegative");

  const Eigen::Index n = psi0.size();
  Engine chosen = engine;
  if (chosen == Engine::automatic) {
    auto [lo, hi] = op.spectral_bounds();
    const double work = (hi - lo) * t_grid.back() * static_cast<double>(n);
    chosen = work > 2e6 ? Engine::chebyshev : Engine::runge_kutta;
  }

  PacketTrajectory out;
  out.times = t_grid;
  out.density.resize(static_cast<Eigen::Index>(t_grid.size()), n);
  out.center.resize(static_cast<Eigen::Index>(t_grid.size()));
  out.norm.resize(static_cast<Eigen::Index>(t_grid.size()));

  Eigen::VectorXcd psi = psi0;
  double t_now = 0.0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double target = t_grid[i];
    if (target > t_now) {
      psi = (chosen == Engine::chebyshev) ? propagate::expm_chebyshev(op, psi, target - t_now)
                                          : propagate::integrate_rk(op, psi, t_now, target);
      t_now = target;
    }
    const Eigen::VectorXd density = psi.cwiseAbs2();
    out.density.row(static_cast<Eigen::Index>(i)) = density.transpose();
    out.norm(static_cast<Eigen::Index>(i)) = density.sum();
    double com = 0.0;
    for (Eigen::Index s = 0; s < n; ++s) com += x_grid[static_cast<std::size_t>(s)] * density(s);
    out.center(static_cast<Eigen::Index>(i)) = com / density.sum();
    if (density(0) + density(n - 1) > boundary_tol)
      throw std::runtime_error("evolve_tridiagonal: boundary escape beyond tolerance");
  }
  out.final_state = std::move(psi);
  return out;
}

// Norm-preserving propagation of the Gaussian packet under metric f on the
// times in t_grid (ascending, starting at or after 0).
inline PacketTrajectory evolve_packet(const PacketConfig& cfg, const std::function<double(double)>& f,
                                      const std::vector<double>& t_grid, Engine engine = Engine::automatic,
                                      double boundary_tol = 1e-6) {
  const Eigen::VectorXcd psi0 = gaussian_packet(cfg);
  const auto op = packet_operator(cfg, f);
  std::vector<double> x_grid(static_cast<std::size_t>(cfg.n));
  for (int s = 0; s < cfg.n; ++s) x_grid[static_cast<std::size_t>(s)] = cfg.site_x(s);
  return evolve_tridiagonal(op, psi0, x_grid, t_grid, engine, boundary_tol);
}

// ------------------------------- validity report ------------------------------

enum class Regime { satisfied, marginal, violated };

inline Regime classify(double value) {
  if (value <= 0.25) return Regime::satisfied;
  if (value < 1.0) return Regime::marginal;
  return Regime::violated;
}

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::satisfied: return "satisfied";
    case Regime::marginal: return "marginal";
    default: return "violated";
  }
}

// The four small parameters of the geometric-optics window: kd, d*alpha,
// Delta*alpha and d/Delta.
struct ValidityReport {
  double kd, d_alpha, delta_alpha, d_over_delta;
  Regime kd_flag, d_alpha_flag, delta_alpha_flag, d_over_delta_flag;

  bool all_satisfied() const {
    return kd_flag == Regime::satisfied && d_alpha_flag == Regime::satisfied &&
           delta_alpha_flag == Regime::satisfied && d_over_delta_flag == Regime::satisfied;
  }
};

inline ValidityReport validity_report(const PacketConfig& cfg) {
  ValidityReport r{};
  r.kd = std::abs(cfg.k * cfg.d);
  r.d_alpha = std::abs(cfg.d * cfg.alpha);
  r.delta_alpha = std::abs(cfg.delta * cfg.alpha);
  r.d_over_delta = cfg.delta > 0 ? cfg.d / cfg.delta : std::numeric_limits<double>::infinity();
  r.kd_flag = classify(r.kd);
  r.d_alpha_flag = classify(r.d_alpha);
  r.delta_alpha_flag = classify(r.delta_alpha);
  r.d_over_delta_flag = classify(r.d_over_delta);
  return r;
}

// --------------------------- trapping diagnostics -----------------------------

// Time the packet center spends inside |x| < radius: first entry to first
// exit afterwards; -1 when it never enters, and time-to-window-end when it
// never leaves.
struct TrappingTimes {
  double entry = -1.0;
  double exit = -1.0;
  double duration = -1.0;
  bool escaped = false;
};

inline TrappingTimes trapping_times(const PacketTrajectory& traj, double radius) {
  TrappingTimes t;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double x = traj.center(static_cast<Eigen::Index>(i));
    if (t.entry < 0.0 && std::abs(x) < radius) t.entry = traj.times[i];
    if (t.entry >= 0.0 && std::abs(x) >= radius) {
      t.exit = traj.times[i];
      t.escaped = true;
      break;
    }
  }
  if (t.entry >= 0.0) t.duration = (t.escaped ? t.exit : traj.times.back()) - t.entry;
  return t;
}

}  // namespace bhsim::continuum
