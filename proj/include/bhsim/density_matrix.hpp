// density_matrix.hpp — Hermitian, PSD, unit-trace operators on qubit subsets.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>

namespace bhsim {

struct DensityMatrix {
  Eigen::MatrixXcd rho;

  Eigen::Index dim() const { return rho.rows(); }

  // Invariants: Hermitian within 1e-12, eigenvalues >= -1e-10, trace 1
  // within 1e-10.
  void validate() const {
    if (rho.rows() != rho.cols() || rho.rows() == 0)
      throw std::invalid_argument("DensityMatrix: matrix must be square and nonempty");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-10)
      throw std::invalid_argument("DensityMatrix: trace must be 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
      throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
  }
};

inline DensityMatrix pure_density(const Eigen::VectorXcd& psi) {
  DensityMatrix d;
  d.rho = psi * psi.adjoint();
  return d;
}

}  // namespace bhsim
