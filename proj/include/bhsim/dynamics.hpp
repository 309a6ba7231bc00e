// dynamics.hpp — few-excitation pure states and exact evolution.
//
// The chain Hamiltonian conserves total excitation number, so a pure state
// is stored as one amplitude vector per populated sector and each sector is
// advanced independently through its eigendecomposition.  Relative phases
// between sectors are physical (the Bell pair spans sectors 0 and 2) and are
// preserved exactly.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "bhsim/basis.hpp"
#include "bhsim/density_matrix.hpp"
#include "bhsim/lattice.hpp"

namespace bhsim::dynamics {

using Complex = std::complex<double>;

// ------------------------------- sector states ------------------------------

struct SectorState {
  int n = 0;                                // site count
  std::map<int, Eigen::VectorXcd> sectors;  // excitation number -> amplitudes

  double squared_norm() const {
    double s = 0.0;
    for (const auto& [k, v] : sectors) s += v.squaredNorm();
    return s;
  }

  void validate() const {
    if (n < 1 || n > max_sites) throw std::invalid_argument("SectorState: site count out of range");
    for (const auto& [k, v] : sectors) {
      if (k < 0 || k > n) throw std::invalid_argument("SectorState: sector index out of range");
      if (static_cast<std::uint64_t>(v.size()) != binomial(n, k))
        throw std::invalid_argument("SectorState: sector dimension mismatch");
    }
    if (std::abs(squared_norm() - 1.0) > 1e-10)
      throw std::invalid_argument("SectorState: state not normalized");
  }
};

// Unit amplitude on one occupation pattern, e.g. "1000000000".
inline SectorState basis_state(const std::string& bitstring) {
  SectorState s;
  s.n = static_cast<int>(bitstring.size());
  const Pattern p = parse_bitstring(bitstring);
  const int k = popcount(p);
  const auto basis = sector_basis(s.n, k);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
  v(static_cast<Eigen::Index>(sector_index(basis, p))) = 1.0;
  s.sectors.emplace(k, std::move(v));
  return s;
}

// (|00...0> + |110...0>) / sqrt(2): sites 1 and 2 share a Bell pair, the rest
// of the chain is empty.  Weights 1/2 in sectors 0 and 2.
inline SectorState bell_pair_state(int n) {
  if (n < 2) throw std::invalid_argument("bell_pair_state: need at least 2 sites");
  SectorState s;
  s.n = n;
  const double amp = 1.0 / std::sqrt(2.0);
  s.sectors.emplace(0, Eigen::VectorXcd::Constant(1, amp));
  const auto basis2 = sector_basis(n, 2);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis2.size()));
  v(static_cast<Eigen::Index>(sector_index(basis2, Pattern{3}))) = amp;
  s.sectors.emplace(2, std::move(v));
  return s;
}

// ----------------------------- propagator cache -----------------------------

// Eigendecompositions of the populated sector matrices.  Immutable once
// built; safe to share read-only across workers.
class PropagatorCache {
 public:
  struct Eigensystem {
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;  // columns are eigenvectors, real symmetric H
  };

  PropagatorCache(const lattice::HamiltonianSpec& h, const std::vector<int>& ks) : n_(h.site_count()) {
    for (int k : ks) {
      if (decomps_.count(k)) continue;
      Eigen::MatrixXd m = (k == 1) ? lattice::single_particle_matrix(h) : lattice::sector_matrix(h, k);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
      if (es.info() != Eigen::Success) throw std::runtime_error("PropagatorCache: eigendecomposition failed");
      decomps_.emplace(k, Eigensystem{es.eigenvalues(), es.eigenvectors()});
    }
  }

  int site_count() const { return n_; }

  const Eigensystem& sector(int k) const {
    auto it = decomps_.find(k);
    if (it == decomps_.end()) throw std::invalid_argument("PropagatorCache: sector not cached");
    return it->second;
  }

  bool has_sector(int k) const { return decomps_.count(k) != 0; }

 private:
  int n_;
  std::map<int, Eigensystem> decomps_;
};

inline std::vector<int> populated_sectors(const SectorState& s) {
  std::vector<int> ks;
  ks.reserve(s.sectors.size());
  for (const auto& [k, v] : s.sectors) ks.push_back(k);
  return ks;
}

// --------------------------------- evolution --------------------------------

// Advance each populated sector by exp(-i H_k t).
inline SectorState evolve(const PropagatorCache& cache, const SectorState& state, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("evolve: time must be finite");
  if (cache.site_count() != state.n) throw std::invalid_argument("evolve: dimension mismatch");
  SectorState out;
  out.n = state.n;
  for (const auto& [k, v] : state.sectors) {
    const auto& es = cache.sector(k);
    Eigen::VectorXcd phases =
        (Complex(0, -t) * es.energies.array()).exp().matrix();
    Eigen::VectorXcd coeffs = es.vectors.transpose() * v;
    out.sectors.emplace(k, es.vectors * phases.cwiseProduct(coeffs));
  }
  return out;
}

inline SectorState evolve(const lattice::HamiltonianSpec& h, const SectorState& state, double t) {
  PropagatorCache cache(h, populated_sectors(state));
  return evolve(cache, state, t);
}

// ------------------------------- observables --------------------------------

// p_j = <n_j>, j = 1..N.  Number conservation kills cross-sector terms.
inline Eigen::VectorXd occupations(const SectorState& state) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(state.n);
  for (const auto& [k, v] : state.sectors) {
    const auto basis = sector_basis(state.n, k);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double w = std::norm(v(i));
      if (w == 0.0) continue;
      Pattern pat = basis[static_cast<std::size_t>(i)];
      while (pat) {
        p(std::countr_zero(pat)) += w;
        pat &= pat - 1;
      }
    }
  }
  return p;
}

// Partial trace over the complement of `sites` (1-based site list; bit i of
// the reduced index is sites[i]).  Cross-sector coherences survive exactly
// when the complement patterns match.
inline DensityMatrix reduced_density_matrix(const SectorState& state, const std::vector<int>& sites) {
  if (sites.empty()) throw std::invalid_argument("reduced_density_matrix: empty subset");
  Pattern sub_mask = 0;
  for (int s : sites) {
    if (s < 1 || s > state.n) throw std::invalid_argument("reduced_density_matrix: site out of range");
    const Pattern bit = Pattern{1} << (s - 1);
    if (sub_mask & bit) throw std::invalid_argument("reduced_density_matrix: duplicate site");
    sub_mask |= bit;
  }
  const auto dim = Eigen::Index{1} << sites.size();

  // Group amplitudes by complement pattern; each group contributes a rank-1
  // term psi_c psi_c^dagger.
  std::unordered_map<Pattern, Eigen::VectorXcd> groups;
  for (const auto& [k, v] : state.sectors) {
    const auto basis = sector_basis(state.n, k);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v(i) == Complex{0, 0}) continue;
      const Pattern pat = basis[static_cast<std::size_t>(i)];
      const Pattern a = gather_bits(pat, sites);
      const Pattern c = pat & ~sub_mask;
      auto [it, inserted] = groups.try_emplace(c, Eigen::VectorXcd::Zero(dim));
      it->second(static_cast<Eigen::Index>(a)) += v(i);
    }
  }

  DensityMatrix out;
  out.rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [c, psi] : groups) out.rho += psi * psi.adjoint();
  return out;
}

// --------------------------- single-excitation lane --------------------------
//
// For one excitation the sector matrix is the N x N hopping matrix itself, so
// chains of hundreds of sites evolve through a dense symmetric (tridiagonal
// when NNN terms are absent) eigensolve without touching 2^N anything.

struct SingleParticlePropagator {
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;

  explicit SingleParticlePropagator(const lattice::HamiltonianSpec& h) {
    const Eigen::MatrixXd m = lattice::single_particle_matrix(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    if (!h.nnn_couplings || h.nnn_couplings->isZero(0.0)) {
      es.computeFromTridiagonal(m.diagonal(), m.diagonal(-1));
    } else {
      es.compute(m);
    }
    if (es.info() != Eigen::Success) throw std::runtime_error("SingleParticlePropagator: eigensolve failed");
    energies = es.eigenvalues();
    vectors = es.eigenvectors();
  }

  Eigen::VectorXcd amplitudes(const Eigen::VectorXcd& psi0, double t) const {
    Eigen::VectorXcd phases = (Complex(0, -t) * energies.array()).exp().matrix();
    return vectors * phases.cwiseProduct(vectors.transpose() * psi0);
  }
};

// Occupation trajectories p_j(t) for a single-excitation initial amplitude
// vector; rows follow `times`, columns are sites.
inline Eigen::MatrixXd single_particle_occupations(const lattice::HamiltonianSpec& h, const Eigen::VectorXcd& psi0,
                                                   const std::vector<double>& times) {
  if (psi0.size() != h.site_count())
    throw std::invalid_argument("single_particle_occupations: initial vector length mismatch");
  if (std::abs(psi0.squaredNorm() - 1.0) > 1e-10)
    throw std::invalid_argument("single_particle_occupations: initial vector not normalized");
  const SingleParticlePropagator prop(h);
  Eigen::MatrixXd p(static_cast<Eigen::Index>(times.size()), h.site_count());
  for (std::size_t i = 0; i < times.size(); ++i)
    p.row(static_cast<Eigen::Index>(i)) = prop.amplitudes(psi0, times[i]).cwiseAbs2().transpose();
  return p;
}

// Convenience overload: excitation starts on one site (1-based).  Rejects
// anything that is not a one-excitation initial condition by construction.
inline Eigen::MatrixXd single_particle_occupations(const lattice::HamiltonianSpec& h, int initial_site,
                                                   const std::vector<double>& times) {
  if (initial_site < 1 || initial_site > h.site_count())
    throw std::invalid_argument("single_particle_occupations: initial site out of range");
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(h.site_count());
  psi0(initial_site - 1) = 1.0;
  return single_particle_occupations(h, psi0, times);
}

// Bitstring overload; anything but exactly one excitation is rejected.
inline Eigen::MatrixXd single_particle_occupations(const lattice::HamiltonianSpec& h, const std::string& bitstring,
                                                   const std::vector<double>& times) {
  const Pattern p = parse_bitstring(bitstring);
  if (popcount(p) != 1)
    throw std::invalid_argument("single_particle_occupations: initial condition must carry exactly one excitation");
  return single_particle_occupations(h, std::countr_zero(p) + 1, times);
}

}  // namespace bhsim::dynamics
