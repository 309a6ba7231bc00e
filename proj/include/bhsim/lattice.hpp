// lattice.hpp — coupling profiles from metric data and the chain Hamiltonian.
//
// The chain realizes H = -sum_j kappa_j (s+_j s-_{j+1} + h.c.)
//                        - sum_j g_nnn_j (s+_j s-_{j+2} + h.c.)
//                        - sum_j mu_j n_j
// with bonds indexed by their left site: kappa_j couples sites j and j+1
// (1-based).  A static (1+1)-D metric f(x) in infalling null coordinates maps
// onto the bonds through kappa_j = (f(x_{j+1}) + f(x_j)) / (8 d) with
// x_j = (j - j_h) d; the sign change of f at the horizon x_h = 0 puts the
// horizon on site j_h.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bhsim/basis.hpp"
#include "bhsim/rng.hpp"
#include "bhsim/units.hpp"

namespace bhsim::lattice {

// --------------------------------- metric -----------------------------------

// f(x) = beta * tanh(eta x) / eta, horizon at x = 0 with f'(0) = beta > 0.
struct TanhMetric {
  double beta;  // rad/ns
  double eta;   // 1 / lattice-constant units
};

// Piecewise-linear samples of f(x), strictly increasing in x, with exactly
// one sign change at x_h where f' > 0.
struct TabulatedMetric {
  std::vector<double> x;
  std::vector<double> f;
};

struct MetricSpec {
  std::optional<TanhMetric> tanh_form;
  std::optional<TabulatedMetric> table;
  double lattice_constant = 1.0;  // d, dimensionless model units
  int horizon_index = 1;          // j_h, 1-based site index

  static MetricSpec make_tanh(double beta, double eta, double d, int j_h) {
    if (beta <= 0 || eta <= 0) throw std::invalid_argument("MetricSpec: tanh metric requires beta > 0 and eta > 0");
    if (d <= 0) throw std::invalid_argument("MetricSpec: lattice constant must be positive");
    MetricSpec m;
    m.tanh_form = TanhMetric{beta, eta};
    m.lattice_constant = d;
    m.horizon_index = j_h;
    return m;
  }

  static MetricSpec make_tabulated(std::vector<double> x, std::vector<double> f, double d, int j_h) {
    if (x.size() != f.size() || x.size() < 2) throw std::invalid_argument("MetricSpec: table needs matching x/f samples");
    if (!std::is_sorted(x.begin(), x.end())) throw std::invalid_argument("MetricSpec: table x samples must be ascending");
    int sign_changes = 0;
    for (std::size_t i = 1; i < f.size(); ++i)
      if (f[i - 1] < 0 && f[i] >= 0) ++sign_changes;
    for (std::size_t i = 1; i < f.size(); ++i)
      if (f[i - 1] >= 0 && f[i] < 0) ++sign_changes;
    if (sign_changes != 1) throw std::invalid_argument("MetricSpec: table must cross zero exactly once");
    if (d <= 0) throw std::invalid_argument("MetricSpec: lattice constant must be positive");
    MetricSpec m;
    m.table = TabulatedMetric{std::move(x), std::move(f)};
    m.lattice_constant = d;
    m.horizon_index = j_h;
    return m;
  }

  // Evaluate f(x).  Tabulated metrics interpolate linearly and refuse to
  // extrapolate.
  double f(double x) const {
    if (tanh_form) return tanh_form->beta * std::tanh(tanh_form->eta * x) / tanh_form->eta;
    const auto& t = *table;
    if (x < t.x.front() || x > t.x.back())
      throw std::out_of_range("MetricSpec: tabulated metric does not cover requested x");
    auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
    if (it == t.x.begin()) ++it;
    if (it == t.x.end()) --it;
    std::size_t i = static_cast<std::size_t>(it - t.x.begin());
    double w = (x - t.x[i - 1]) / (t.x[i] - t.x[i - 1]);
    return (1.0 - w) * t.f[i - 1] + w * t.f[i];
  }

  // Coordinate of the horizon: 0 for the tanh form, the interpolated root of
  // the table otherwise.
  double horizon_x() const {
    if (tanh_form) return 0.0;
    const auto& t = *table;
    for (std::size_t i = 1; i < t.f.size(); ++i) {
      if ((t.f[i - 1] < 0) == (t.f[i] < 0)) continue;
      const double w = -t.f[i - 1] / (t.f[i] - t.f[i - 1]);
      return t.x[i - 1] + w * (t.x[i] - t.x[i - 1]);
    }
    throw std::invalid_argument("MetricSpec: metric has no sign change");
  }

  // Surface gravity g_h = f'(x_h) / 2.  Analytic for the tanh form, centered
  // finite difference with step d/100 otherwise.
  double surface_gravity() const {
    if (tanh_form) return tanh_form->beta / 2.0;
    const double x_h = horizon_x();
    const double h = lattice_constant / 100.0;
    return (f(x_h + h) - f(x_h - h)) / (2.0 * h) / 2.0;
  }
};

// --------------------------------- profiles ---------------------------------

// Per-bond hoppings kappa_j (rad/ns, N-1 entries, bond j = sites j,j+1) and
// per-site potentials mu_j (rad/ns, N entries).
struct CouplingProfile {
  Eigen::VectorXd couplings;
  Eigen::VectorXd onsite;

  int site_count() const { return static_cast<int>(onsite.size()); }

  void validate() const {
    if (onsite.size() < 2) throw std::invalid_argument("CouplingProfile: need at least 2 sites");
    if (couplings.size() != onsite.size() - 1)
      throw std::invalid_argument("CouplingProfile: expected N-1 couplings");
    if (!couplings.allFinite() || !onsite.allFinite())
      throw std::invalid_argument("CouplingProfile: entries must be finite");
  }
};

// kappa_j = beta * tanh((j - j_h + 1/2) eta d) / (4 eta d), onsite zero.
inline CouplingProfile tanh_profile(double beta, double eta_d, int j_h, int n) {
  if (beta <= 0) throw std::invalid_argument("tanh_profile: beta must be positive");
  if (eta_d <= 0) throw std::invalid_argument("tanh_profile: eta_d must be positive");
  if (n < 2) throw std::invalid_argument("tanh_profile: need at least 2 sites");
  if (j_h < 1 || j_h > n) throw std::invalid_argument("tanh_profile: horizon index out of range");
  CouplingProfile p;
  p.couplings.resize(n - 1);
  for (int j = 1; j <= n - 1; ++j)
    p.couplings(j - 1) = beta * std::tanh((j - j_h + 0.5) * eta_d) / (4.0 * eta_d);
  p.onsite = Eigen::VectorXd::Zero(n);
  return p;
}

inline CouplingProfile flat_profile(double kappa, int n) {
  if (n < 2) throw std::invalid_argument("flat_profile: need at least 2 sites");
  if (!std::isfinite(kappa)) throw std::invalid_argument("flat_profile: kappa must be finite");
  CouplingProfile p;
  p.couplings = Eigen::VectorXd::Constant(n - 1, kappa);
  p.onsite = Eigen::VectorXd::Zero(n);
  return p;
}

// Black hole centered on the chain: interior bonds between the two horizons
// at sites 4 and 7 turn negative,
//   kappa_j = beta (1 - tanh((j - 7/2) eta d) + tanh((j - 13/2) eta d)) / (4 eta d).
inline CouplingProfile centered_profile(double beta, double eta_d, int n) {
  if (beta <= 0) throw std::invalid_argument("centered_profile: beta must be positive");
  if (eta_d <= 0) throw std::invalid_argument("centered_profile: eta_d must be positive");
  if (n < 8) throw std::invalid_argument("centered_profile: need at least 8 sites");
  CouplingProfile p;
  p.couplings.resize(n - 1);
  for (int j = 1; j <= n - 1; ++j) {
    double bracket = 1.0 - std::tanh((j - 3.5) * eta_d) + std::tanh((j - 6.5) * eta_d);
    p.couplings(j - 1) = beta * bracket / (4.0 * eta_d);
  }
  p.onsite = Eigen::VectorXd::Zero(n);
  return p;
}

// Exact two-point average kappa_j = (f(x_{j+1}) + f(x_j)) / (8 d).
inline CouplingProfile profile_from_metric(const MetricSpec& metric, int n) {
  if (n < 2) throw std::invalid_argument("profile_from_metric: need at least 2 sites");
  const double d = metric.lattice_constant;
  CouplingProfile p;
  p.couplings.resize(n - 1);
  for (int j = 1; j <= n - 1; ++j) {
    const double xj = (j - metric.horizon_index) * d;
    p.couplings(j - 1) = (metric.f(xj + d) + metric.f(xj)) / (8.0 * d);
  }
  p.onsite = Eigen::VectorXd::Zero(n);
  return p;
}

// ------------------------------- Hamiltonian --------------------------------

struct HamiltonianSpec {
  CouplingProfile profile;
  std::optional<Eigen::VectorXd> nnn_couplings;  // N-2 entries, rad/ns

  int site_count() const { return profile.site_count(); }

  void validate() const {
    profile.validate();
    if (nnn_couplings && nnn_couplings->size() != profile.onsite.size() - 2)
      throw std::invalid_argument("HamiltonianSpec: expected N-2 next-nearest couplings");
  }
};

inline HamiltonianSpec clean_hamiltonian(CouplingProfile profile) {
  HamiltonianSpec h{std::move(profile), std::nullopt};
  h.validate();
  return h;
}

// Draw next-nearest-neighbour hops from uniform[-w_nnn, w_nnn] and on-site
// shifts from uniform[-w_mu, w_mu], reproducibly from `seed`.
//
// Stream contract: one Xoshiro256ss seeded with `seed`; draws are the N-2
// NNN bonds in ascending bond order followed by the N on-site shifts in
// ascending site order.
inline HamiltonianSpec disorder_hamiltonian(const CouplingProfile& profile, double w_nnn, double w_mu,
                                            std::uint64_t seed) {
  if (w_nnn < 0 || w_mu < 0) throw std::invalid_argument("disorder_hamiltonian: disorder widths must be nonnegative");
  profile.validate();
  const int n = profile.site_count();
  Xoshiro256ss rng(seed);
  HamiltonianSpec h;
  h.profile = profile;
  Eigen::VectorXd nnn(n - 2);
  for (int j = 0; j < n - 2; ++j) nnn(j) = rng.uniform_symmetric(w_nnn);
  for (int j = 0; j < n; ++j) h.profile.onsite(j) += rng.uniform_symmetric(w_mu);
  h.nnn_couplings = std::move(nnn);
  return h;
}

// ------------------------------ sector matrices -----------------------------

// Matrix of H restricted to the k-excitation sector, basis ordered by
// ascending pattern value.  Hopping terms carry no string signs: these are
// the spin-ladder operators of the chain, not Jordan-Wigner fermions.
inline Eigen::MatrixXd sector_matrix(const HamiltonianSpec& h, int k) {
  h.validate();
  const int n = h.site_count();
  if (k < 0 || k > n) throw std::invalid_argument("sector_matrix: excitation count out of range");
  const auto basis = sector_basis(n, k);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  if (dim > 200000) throw std::invalid_argument("sector_matrix: sector dimension too large");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);

  auto add_hop = [&](int left_bit, int right_bit, double amplitude) {
    // -amplitude * (s+_{left} s-_{right} + h.c.) restricted to the sector
    const Pattern mask = (Pattern{1} << left_bit) | (Pattern{1} << right_bit);
    for (Eigen::Index col = 0; col < dim; ++col) {
      const Pattern pat = basis[static_cast<std::size_t>(col)];
      const Pattern occ = pat & mask;
      if (occ == 0 || occ == mask) continue;
      const Pattern flipped = pat ^ mask;
      const auto row = static_cast<Eigen::Index>(sector_index(basis, flipped));
      m(row, col) -= amplitude;
    }
  };

  for (int b = 0; b < n - 1; ++b) add_hop(b, b + 1, h.profile.couplings(b));
  if (h.nnn_couplings)
    for (int b = 0; b < n - 2; ++b) add_hop(b, b + 2, (*h.nnn_couplings)(b));

  for (Eigen::Index col = 0; col < dim; ++col) {
    const Pattern pat = basis[static_cast<std::size_t>(col)];
    double diag = 0.0;
    for (int site = 0; site < n; ++site)
      if (pat & (Pattern{1} << site)) diag -= h.profile.onsite(site);
    m(col, col) += diag;
  }
  return m;
}

// Flat text table of a profile for inspection: bond index and kappa/(2 pi)
// in MHz, one bond per line after a header.
inline std::string profile_table(const CouplingProfile& p) {
  p.validate();
  std::string out = "bond\tkappa_over_2pi_MHz\n";
  char buf[64];
  for (Eigen::Index j = 0; j < p.couplings.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%d\t%.15g\n", static_cast<int>(j + 1), rad_ns_to_mhz(p.couplings(j)));
    out += buf;
  }
  return out;
}

// Single-excitation matrix without the detour through pattern enumeration;
// identical to sector_matrix(h, 1) because the k=1 basis is site order.
inline Eigen::MatrixXd single_particle_matrix(const HamiltonianSpec& h) {
  h.validate();
  const int n = h.site_count();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n - 1; ++j) {
    m(j, j + 1) = -h.profile.couplings(j);
    m(j + 1, j) = -h.profile.couplings(j);
  }
  if (h.nnn_couplings)
    for (int j = 0; j < n - 2; ++j) {
      m(j, j + 2) = -(*h.nnn_couplings)(j);
      m(j + 2, j) = -(*h.nnn_couplings)(j);
    }
  for (int j = 0; j < n; ++j) m(j, j) = -h.profile.onsite(j);
  return m;
}

}  // namespace bhsim::lattice
