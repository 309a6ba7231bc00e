// observables.hpp — scalar diagnostics over states and density matrices.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "bhsim/density_matrix.hpp"

namespace bhsim::observables {

// F = sum_j sqrt(p_j q_j) after normalizing each distribution by its total
// weight (for k-excitation occupations the total is the excitation number,
// so distributions from different sectors compare on equal footing).
inline double bhattacharyya_fidelity(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw std::invalid_argument("bhattacharyya_fidelity: length mismatch");
  if (p.minCoeff() < 0 || q.minCoeff() < 0)
    throw std::invalid_argument("bhattacharyya_fidelity: entries must be nonnegative");
  const double sp = p.sum(), sq = q.sum();
  if (sp <= 0 || sq <= 0) throw std::invalid_argument("bhattacharyya_fidelity: distributions must have weight");
  return (p / sp).cwiseProduct(q / sq).cwiseSqrt().sum();
}

// Probability of finding the particle outside the horizon: sum of p_j for
// sites j > j_h (1-based).
inline double p_out(const Eigen::VectorXd& p, int horizon_index) {
  if (horizon_index < 0 || horizon_index > p.size()) throw std::invalid_argument("p_out: horizon index out of range");
  return p.tail(p.size() - horizon_index).sum();
}

// Von Neumann entropy in bits; eigenvalues clipped at zero, 0 log 0 = 0.
inline double von_neumann_entropy(const DensityMatrix& dm) {
  dm.validate();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dm.rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam > 0.0) s -= lam * std::log2(lam);
  }
  return s < 0.0 ? 0.0 : s;
}

// Square roots of the eigenvalues of rho * rho~ in decreasing order, where
// rho~ = (sy x sy) conj(rho) (sy x sy).  Evaluated through the Hermitian
// PSD product sqrt(rho) rho~ sqrt(rho), which shares the spectrum.
inline Eigen::Vector4d concurrence_lambdas(const DensityMatrix& dm) {
  if (dm.dim() != 4) throw std::invalid_argument("concurrence: need a two-qubit density matrix");
  dm.validate();

  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  yy(0, 3) = -1;
  yy(1, 2) = 1;
  yy(2, 1) = 1;
  yy(3, 0) = -1;
  const Eigen::Matrix4cd flipped = yy * dm.rho.conjugate() * yy;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es_rho(dm.rho);
  Eigen::Vector4d clipped = es_rho.eigenvalues().cwiseMax(0.0);
  const Eigen::Matrix4cd sqrt_rho =
      es_rho.eigenvectors() * clipped.cwiseSqrt().asDiagonal() * es_rho.eigenvectors().adjoint();

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(sqrt_rho * flipped * sqrt_rho);
  Eigen::Vector4d lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::swap(lam(0), lam(3));
  std::swap(lam(1), lam(2));  // decreasing order
  return lam;
}

// Wootters concurrence max(0, l1 - l2 - l3 - l4).
inline double concurrence(const DensityMatrix& dm) {
  const Eigen::Vector4d lam = concurrence_lambdas(dm);
  const double c = lam(0) - lam(1) - lam(2) - lam(3);
  return c > 0.0 ? c : 0.0;
}

}  // namespace bhsim::observables
