// test_support.hpp — independent full-Hilbert oracle for chain dynamics.
//
// Builds the 2^N operator directly from occupation bitmasks and evolves with
// a dense complex eigensolve; shares no code with the sector engine it is
// used to check.

#pragma once

#include <Eigen/Dense>

#include <complex>

#include "bhsim/basis.hpp"
#include "bhsim/dynamics.hpp"
#include "bhsim/lattice.hpp"

namespace bhsim::testsupport {

inline Eigen::MatrixXcd dense_hamiltonian(const lattice::HamiltonianSpec& h) {
  const int n = h.site_count();
  const auto dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
  auto hop = [&](int a, int b, double amp) {
    const Pattern mask = (Pattern{1} << a) | (Pattern{1} << b);
    for (Eigen::Index m = 0; m < dim; ++m) {
      const Pattern occ = static_cast<Pattern>(m) & mask;
      if (occ == 0 || occ == mask) continue;
      H(m ^ mask, m) -= amp;
    }
  };
  for (int j = 0; j < n - 1; ++j) hop(j, j + 1, h.profile.couplings(j));
  if (h.nnn_couplings)
    for (int j = 0; j < n - 2; ++j) hop(j, j + 2, (*h.nnn_couplings)(j));
  for (Eigen::Index m = 0; m < dim; ++m)
    for (int s = 0; s < n; ++s)
      if (m & (Eigen::Index{1} << s)) H(m, m) -= h.profile.onsite(s);
  return H;
}

inline Eigen::VectorXcd dense_evolve(const lattice::HamiltonianSpec& h, const Eigen::VectorXcd& psi0, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_hamiltonian(h));
  Eigen::VectorXcd phases = (std::complex<double>(0, -t) * es.eigenvalues().array()).exp().matrix();
  return es.eigenvectors() * phases.cwiseProduct(es.eigenvectors().adjoint() * psi0);
}

inline Eigen::VectorXcd to_dense(const dynamics::SectorState& s) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(Eigen::Index{1} << s.n);
  for (const auto& [k, v] : s.sectors) {
    const auto basis = sector_basis(s.n, k);
    for (Eigen::Index i = 0; i < v.size(); ++i) psi(basis[static_cast<std::size_t>(i)]) += v(i);
  }
  return psi;
}

}  // namespace bhsim::testsupport
