// radiation.hpp — the Hawking pipeline.
//
// Exterior density matrix -> embed into the full chain with the interior
// pinned to |0...0> -> project onto energy eigenstates of the 0- and
// 1-excitation sectors -> group equal positive energies -> fit
// ln(P) = a - E / T_H.  Closed-form tunneling and occupation formulas and
// the metric-side temperature live here too.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bhsim/basis.hpp"
#include "bhsim/density_matrix.hpp"
#include "bhsim/lattice.hpp"
#include "bhsim/units.hpp"

namespace bhsim::radiation {

// Default tolerance for "same positive energy" grouping: 2*pi * 1e-3 MHz.
inline constexpr double default_energy_tolerance = two_pi * 1e-6;  // rad/ns

// ---------------------------------- embedding --------------------------------

// rho_out = |0..0><0..0|_interior (x) rho_ext on n sites.  `interior` lists
// the sites pinned to |0> (1-based); the exterior is its ascending-ordered
// complement and must match the dimension of rho_ext.
inline DensityMatrix embed_exterior(const DensityMatrix& rho_ext, int n, const std::vector<int>& interior) {
  // materializes a 4^n-entry matrix
  if (n < 1 || n > 12) throw std::invalid_argument("embed_exterior: site count out of range");
  std::vector<bool> is_interior(static_cast<std::size_t>(n) + 1, false);
  for (int s : interior) {
    if (s < 1 || s > n) throw std::invalid_argument("embed_exterior: interior site out of range");
    if (is_interior[static_cast<std::size_t>(s)]) throw std::invalid_argument("embed_exterior: duplicate interior site");
    is_interior[static_cast<std::size_t>(s)] = true;
  }
  std::vector<int> exterior;
  for (int s = 1; s <= n; ++s)
    if (!is_interior[static_cast<std::size_t>(s)]) exterior.push_back(s);
  const auto ext_dim = Eigen::Index{1} << exterior.size();
  if (rho_ext.dim() != ext_dim) throw std::invalid_argument("embed_exterior: exterior dimension mismatch");

  DensityMatrix out;
  out.rho = Eigen::MatrixXcd::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
  for (Eigen::Index a = 0; a < ext_dim; ++a) {
    const auto ga = static_cast<Eigen::Index>(scatter_bits(static_cast<Pattern>(a), exterior));
    for (Eigen::Index b = 0; b < ext_dim; ++b) {
      const auto gb = static_cast<Eigen::Index>(scatter_bits(static_cast<Pattern>(b), exterior));
      out.rho(ga, gb) = rho_ext.rho(a, b);
    }
  }
  return out;
}

// ---------------------------------- spectrum ---------------------------------

struct SpectrumLine {
  double energy;       // rad/ns
  double probability;  // <E_n| rho_out |E_n>
  int sector;          // excitation number of the eigenstate (0 or 1)
};

struct RadiationSpectrum {
  std::vector<SpectrumLine> lines;
  double evolution_time_ns = 0.0;
  std::string profile_label;

  double total_probability() const {
    double s = 0.0;
    for (const auto& l : lines) s += l.probability;
    return s;
  }
};

// P_n = <E_n| rho_out |E_n> over the vacuum and single-particle eigenstates.
// Only these sectors can overlap an embedding whose global state carried at
// most one excitation.
inline RadiationSpectrum radiation_probabilities(const lattice::HamiltonianSpec& h, const DensityMatrix& rho_out) {
  const int n = h.site_count();
  if (rho_out.dim() != (Eigen::Index{1} << n))
    throw std::invalid_argument("radiation_probabilities: density matrix dimension mismatch");

  RadiationSpectrum spec;
  spec.lines.push_back({0.0, rho_out.rho(0, 0).real(), 0});

  // Restrict rho_out to the single-excitation block (global index 2^j).
  Eigen::MatrixXcd block(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l)
      block(j, l) = rho_out.rho(Eigen::Index{1} << j, Eigen::Index{1} << l);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lattice::single_particle_matrix(h));
  if (es.info() != Eigen::Success) throw std::runtime_error("radiation_probabilities: eigensolve failed");
  for (int m = 0; m < n; ++m) {
    const Eigen::VectorXd v = es.eigenvectors().col(m);
    const double p = (v.cast<std::complex<double>>().adjoint() * block * v.cast<std::complex<double>>())(0).real();
    spec.lines.push_back({es.eigenvalues()(m), p, 1});
  }
  return spec;
}

// Group lines with E > 0 whose successive energies differ by at most e_tol;
// each group reports (mean energy, mean probability), ascending in energy.
inline std::vector<std::pair<double, double>> average_positive(const RadiationSpectrum& spec,
                                                               double e_tol = default_energy_tolerance) {
  if (e_tol < 0) throw std::invalid_argument("average_positive: tolerance must be nonnegative");
  std::vector<SpectrumLine> pos;
  for (const auto& l : spec.lines)
    if (l.energy > 0) pos.push_back(l);
  if (pos.empty()) throw std::invalid_argument("average_positive: no positive-energy lines");
  std::sort(pos.begin(), pos.end(), [](const auto& a, const auto& b) { return a.energy < b.energy; });

  std::vector<std::pair<double, double>> groups;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= pos.size(); ++i) {
    if (i < pos.size() && pos[i].energy - pos[i - 1].energy <= e_tol) continue;
    double e = 0.0, p = 0.0;
    for (std::size_t j = start; j < i; ++j) {
      e += pos[j].energy;
      p += pos[j].probability;
    }
    const auto count = static_cast<double>(i - start);
    groups.emplace_back(e / count, p / count);
    start = i;
  }
  return groups;
}

// -------------------------------- temperature fit ----------------------------

struct TemperatureFit {
  double slope = 0.0;       // d ln(P) / dE, 1/(rad/ns)
  double intercept = 0.0;
  double t_h = 0.0;         // -1/slope, rad/ns
  double t_h_mhz = 0.0;     // T_H / (2 pi) in MHz
  double t_kelvin = 0.0;
  double slope_stderr = 0.0;
  double t_h_stderr = 0.0;  // rad/ns, propagated from the slope error
  int points_used = 0;
  bool degenerate = false;  // nonnegative slope: no decaying spectrum
};

// T[K] = h * nu / k_B with nu = omega/(2*pi) converted to Hz.
inline double kelvin(double t_angular_rad_ns) {
  if (t_angular_rad_ns < 0) throw std::invalid_argument("kelvin: temperature must be nonnegative");
  const double nu_hz = t_angular_rad_ns / two_pi * 1e9;
  return planck_J_s * nu_hz / boltzmann_J_per_K;
}

// Unweighted least squares of ln(P) against E; points with P <= 0 are
// dropped before fitting.
inline TemperatureFit fit_temperature(const std::vector<std::pair<double, double>>& points) {
  std::vector<std::pair<double, double>> usable;
  for (const auto& [e, p] : points)
    if (p > 0) usable.emplace_back(e, std::log(p));
  if (usable.size() < 2) throw std::invalid_argument("fit_temperature: need at least 2 points with positive probability");

  const auto n = static_cast<double>(usable.size());
  double se = 0, sl = 0, see = 0, sel = 0;
  for (const auto& [e, l] : usable) {
    se += e;
    sl += l;
    see += e * e;
    sel += e * l;
  }
  const double denom = n * see - se * se;
  if (denom <= 0) throw std::invalid_argument("fit_temperature: degenerate energies");

  TemperatureFit fit;
  fit.points_used = static_cast<int>(usable.size());
  fit.slope = (n * sel - se * sl) / denom;
  fit.intercept = (sl - fit.slope * se) / n;

  double ssr = 0;
  for (const auto& [e, l] : usable) {
    const double r = l - (fit.intercept + fit.slope * e);
    ssr += r * r;
  }
  if (usable.size() > 2) {
    const double var = ssr / (n - 2.0);
    fit.slope_stderr = std::sqrt(var * n / denom);
  }

  if (fit.slope >= 0) {
    fit.degenerate = true;
    return fit;
  }
  fit.t_h = -1.0 / fit.slope;
  fit.t_h_mhz = rad_ns_to_mhz(fit.t_h);
  fit.t_kelvin = kelvin(fit.t_h);
  fit.t_h_stderr = fit.slope_stderr / (fit.slope * fit.slope);
  return fit;
}

// ------------------------------ analytic formulas ----------------------------

// T_H = g_h / (2 pi) with g_h = f'(x_h)/2; beta/(4 pi) for the tanh metric.
inline double hawking_temperature(const lattice::MetricSpec& metric) {
  const double g_h = metric.surface_gravity();
  if (g_h <= 0) throw std::invalid_argument("hawking_temperature: metric has no horizon (f'(x_h) <= 0)");
  return g_h / two_pi;
}

// Schwarzschild mass with the same temperature, in solar masses.
inline double equivalent_mass(double t_kelvin) {
  if (t_kelvin <= 0) throw std::invalid_argument("equivalent_mass: temperature must be positive");
  return 6.4e-8 / t_kelvin;
}

// Single-particle tunneling rate across the horizon, P = exp(-2 pi w / g_h).
inline double tunneling_rate(double omega, double g_h) {
  if (g_h <= 0) throw std::invalid_argument("tunneling_rate: surface gravity must be positive");
  return std::exp(-two_pi * omega / g_h);
}

enum class Statistics { bose, fermi };

// Mean occupation at energy w for a horizon with surface gravity g_h.
inline double occupation(double omega, double g_h, Statistics stats) {
  if (g_h <= 0) throw std::invalid_argument("occupation: surface gravity must be positive");
  if (stats == Statistics::bose) {
    if (omega <= 0) throw std::invalid_argument("occupation: bosonic occupation requires omega > 0");
    return 1.0 / (std::exp(two_pi * omega / g_h) - 1.0);
  }
  return 1.0 / (std::exp(two_pi * omega / g_h) + 1.0);
}

}  // namespace bhsim::radiation
