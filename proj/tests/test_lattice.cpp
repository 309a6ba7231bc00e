// Coupling-profile constructors and sector matrices.
//
// Frozen values:
//   kappa_3/(2pi) = 4.39 * tanh(0.175) / 1.4   = 0.543216 MHz
//   kappa_9/(2pi) = 4.39 * tanh(2.275) / 1.4   = 3.070137 MHz
// both from direct evaluation of the tanh bond formula with
// beta/(2pi) = 4.39 MHz, eta*d = 0.35, j_h = 3.

#include "doctest.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "bhsim/basis.hpp"
#include "bhsim/lattice.hpp"
#include "bhsim/units.hpp"

using namespace bhsim;
using lattice::CouplingProfile;
using lattice::HamiltonianSpec;

namespace {

// Independent full-Hilbert construction of the chain Hamiltonian by Kronecker
// products of ladder operators; used to cross-check sector_matrix.
Eigen::MatrixXcd dense_chain_hamiltonian(const HamiltonianSpec& h) {
  const int n = h.site_count();
  const auto dim = Eigen::Index{1} << n;
  auto site_op = [&](const Eigen::Matrix2cd& op, int site) {
    Eigen::MatrixXcd full = Eigen::MatrixXcd::Identity(1, 1);
    for (int s = 0; s < n; ++s) {
      const Eigen::Matrix2cd& factor = (s == site) ? op : Eigen::Matrix2cd::Identity();
      // site s occupies bit s, so it is the *inner* factor of the product
      Eigen::MatrixXcd next(full.rows() * 2, full.cols() * 2);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) next.block(a * full.rows(), b * full.cols(), full.rows(), full.cols()) = factor(a, b) * full;
      full = next;
    }
    return full;
  };
  Eigen::Matrix2cd sp = Eigen::Matrix2cd::Zero();  // raising in the {|0>,|1>} basis, |1> = bit set
  sp(1, 0) = 1.0;
  Eigen::Matrix2cd sm = sp.adjoint();
  Eigen::Matrix2cd num = sp * sm;

  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
  for (int j = 0; j < n - 1; ++j) {
    Eigen::MatrixXcd hop = site_op(sp, j) * site_op(sm, j + 1);
    H -= h.profile.couplings(j) * (hop + hop.adjoint());
  }
  if (h.nnn_couplings)
    for (int j = 0; j < n - 2; ++j) {
      Eigen::MatrixXcd hop = site_op(sp, j) * site_op(sm, j + 2);
      H -= (*h.nnn_couplings)(j) * (hop + hop.adjoint());
    }
  for (int j = 0; j < n; ++j) H -= h.profile.onsite(j) * site_op(num, j);
  return H;
}

}  // namespace

TEST_CASE("tanh_profile reproduces the reference bond strengths") {
  const double beta = mhz_to_rad_ns(4.39);
  const auto p = lattice::tanh_profile(beta, 0.35, 3, 10);
  REQUIRE(p.couplings.size() == 9);
  CHECK(rad_ns_to_mhz(p.couplings(2)) == doctest::Approx(0.543216).epsilon(1e-5));
  CHECK(rad_ns_to_mhz(p.couplings(8)) == doctest::Approx(3.070137).epsilon(1e-5));
  CHECK(p.couplings(1) == doctest::Approx(-p.couplings(2)).epsilon(1e-14));
  CHECK(p.onsite.isZero(0.0));
}

TEST_CASE("tanh_profile is odd about the horizon") {
  const auto p = lattice::tanh_profile(1.0, 0.4, 5, 12);
  for (int m = 1; m <= 4; ++m)
    CHECK(p.couplings(5 - 1 + m - 1) == doctest::Approx(-p.couplings(5 - m - 1)).epsilon(1e-14));
}

TEST_CASE("tanh_profile rejects invalid parameters") {
  CHECK_THROWS_AS(lattice::tanh_profile(0.0, 0.35, 3, 10), std::invalid_argument);
  CHECK_THROWS_AS(lattice::tanh_profile(1.0, -1.0, 3, 10), std::invalid_argument);
  CHECK_THROWS_AS(lattice::tanh_profile(1.0, 0.35, 11, 10), std::invalid_argument);
  CHECK_THROWS_AS(lattice::tanh_profile(1.0, 0.35, 0, 10), std::invalid_argument);
}

TEST_CASE("flat_profile fills equal bonds") {
  const double kappa = mhz_to_rad_ns(2.94);
  const auto p = lattice::flat_profile(kappa, 10);
  CHECK(p.couplings.size() == 9);
  CHECK(p.couplings.minCoeff() == kappa);
  CHECK(p.couplings.maxCoeff() == kappa);

  const auto zero = lattice::flat_profile(0.0, 4);
  CHECK(zero.couplings.isZero(0.0));

  const auto bond = lattice::flat_profile(mhz_to_rad_ns(1.0), 2);
  CHECK(bond.couplings.size() == 1);
}

TEST_CASE("centered_profile places horizons at sites 4 and 7") {
  const double beta = mhz_to_rad_ns(13.2);
  const auto p = lattice::centered_profile(beta, 1.0, 10);

  // interior bonds (between sites 4..7) negative, exterior positive
  for (int b : {0, 1, 2, 6, 7, 8}) CHECK(p.couplings(b) > 0);
  for (int b : {3, 4, 5}) CHECK(p.couplings(b) < 0);

  // frozen 9-bond bracket vector (couplings * 4*eta_d / beta), direct evaluation
  const double expected[] = {0.98664, 0.90540, 0.46394, -0.44873, -0.81031,
                             -0.44873, 0.46394, 0.90540, 0.98664};
  for (int b = 0; b < 9; ++b)
    CHECK(p.couplings(b) * 4.0 / beta == doctest::Approx(expected[b]).epsilon(2e-4));
}

TEST_CASE("centered_profile interior bracket approaches -1 for steep eta_d") {
  const auto p = lattice::centered_profile(1.0, 8.0, 10);
  // bond 5 sits midway between the two horizons
  CHECK(p.couplings(4) * 4.0 * 8.0 == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK_THROWS_AS(lattice::centered_profile(1.0, 1.0, 6), std::invalid_argument);
}

TEST_CASE("profile_from_metric matches tanh_profile to midpoint-rule accuracy") {
  // The two constructions differ by the trapezoid-vs-midpoint error of tanh
  // over one lattice step, which is (eta*d)^2/4 at the horizon bond.  At
  // eta*d = 0.35 the worst per-bond relative difference is 2.9e-2 and at
  // eta*d = 0.2 it drops below 1e-2.
  const double beta = mhz_to_rad_ns(4.39);
  for (double eta_d : {0.35, 0.2}) {
    const auto metric = lattice::MetricSpec::make_tanh(beta, eta_d, 1.0, 3);
    const auto exact = lattice::profile_from_metric(metric, 10);
    const auto mid = lattice::tanh_profile(beta, eta_d, 3, 10);
    double worst = 0.0;
    for (int b = 0; b < 9; ++b)
      worst = std::max(worst, std::abs(exact.couplings(b) - mid.couplings(b)) / std::abs(mid.couplings(b)));
    CHECK(worst < eta_d * eta_d / 4.0 * 1.2);
    if (eta_d <= 0.2) CHECK(worst < 1e-2);
  }
}

TEST_CASE("profile_from_metric: constant metric and sign change at the horizon") {
  const double d = 0.7;
  std::vector<double> x, f;
  for (int i = -20; i <= 20; ++i) {
    x.push_back(i * d);
    f.push_back(2.0 * std::tanh(0.5 * i * d));
  }
  const auto metric = lattice::MetricSpec::make_tabulated(x, f, d, 4);
  const auto p = lattice::profile_from_metric(metric, 8);
  CHECK(p.couplings(2) < 0);  // bond 3 touches f(x_3 < 0)... sign flip at horizon site 4
  CHECK(p.couplings(3) > 0);
  for (int b = 0; b < 3; ++b) CHECK(p.couplings(b) < 0);
  for (int b = 4; b < 7; ++b) CHECK(p.couplings(b) > 0);

  // f == const c -> every bond c/(4d)
  std::vector<double> fc(x.size(), 3.0);
  fc[0] = -1e-12;  // keep the single-sign-change invariant satisfiable
  CHECK_THROWS_AS(lattice::MetricSpec::make_tabulated(x, std::vector<double>(x.size(), 3.0), d, 4),
                  std::invalid_argument);
  const auto flatish = lattice::MetricSpec::make_tabulated(x, fc, d, 4);
  const auto pc = lattice::profile_from_metric(flatish, 8);
  for (int b = 1; b < 7; ++b) CHECK(pc.couplings(b) == doctest::Approx(3.0 / (4.0 * d)).epsilon(1e-12));

  // requested range outside the table
  CHECK_THROWS_AS(lattice::profile_from_metric(metric, 40), std::out_of_range);
}

TEST_CASE("disorder_hamiltonian is reproducible and respects widths") {
  const auto p = lattice::tanh_profile(mhz_to_rad_ns(4.39), 0.35, 3, 10);
  const double w_nnn = mhz_to_rad_ns(0.1);
  const double w_mu = mhz_to_rad_ns(0.2);

  const auto h1 = lattice::disorder_hamiltonian(p, w_nnn, w_mu, 42);
  const auto h2 = lattice::disorder_hamiltonian(p, w_nnn, w_mu, 42);
  CHECK((h1.profile.onsite - h2.profile.onsite).isZero(0.0));
  CHECK((*h1.nnn_couplings - *h2.nnn_couplings).isZero(0.0));

  const auto h3 = lattice::disorder_hamiltonian(p, w_nnn, w_mu, 43);
  CHECK((h1.profile.onsite - h3.profile.onsite).cwiseAbs().maxCoeff() > 0);

  CHECK(h1.nnn_couplings->cwiseAbs().maxCoeff() <= w_nnn);
  CHECK(h1.profile.onsite.cwiseAbs().maxCoeff() <= w_mu);

  // zero widths: clean Hamiltonian, exactly
  const auto clean = lattice::disorder_hamiltonian(p, 0.0, 0.0, 7);
  CHECK(clean.profile.onsite.isZero(0.0));
  CHECK(clean.nnn_couplings->isZero(0.0));
  CHECK_THROWS_AS(lattice::disorder_hamiltonian(p, -1.0, 0.0, 7), std::invalid_argument);
}

TEST_CASE("sector_matrix: trivial sectors and tridiagonal single-excitation block") {
  const auto h = lattice::clean_hamiltonian(lattice::tanh_profile(mhz_to_rad_ns(4.39), 0.35, 3, 6));
  const auto m0 = lattice::sector_matrix(h, 0);
  CHECK(m0.rows() == 1);
  CHECK(m0(0, 0) == 0.0);

  const auto m1 = lattice::sector_matrix(h, 1);
  CHECK(m1.rows() == 6);
  for (int j = 0; j < 5; ++j) {
    CHECK(m1(j, j + 1) == doctest::Approx(-h.profile.couplings(j)).epsilon(1e-15));
    CHECK(m1(j + 1, j) == doctest::Approx(-h.profile.couplings(j)).epsilon(1e-15));
  }
  CHECK(m1.diagonal().isZero(0.0));
  CHECK((m1 - lattice::single_particle_matrix(h)).isZero(0.0));

  CHECK_THROWS_AS(lattice::sector_matrix(h, 7), std::invalid_argument);
  CHECK_THROWS_AS(lattice::sector_matrix(h, -1), std::invalid_argument);
}

TEST_CASE("sector_matrix agrees with the dense Kronecker construction") {
  lattice::CouplingProfile p;
  p.couplings.resize(3);
  p.couplings << 1.3, -0.7, 0.4;
  p.onsite.resize(4);
  p.onsite << 0.1, -0.2, 0.05, 0.3;
  HamiltonianSpec h;
  h.profile = p;
  Eigen::VectorXd nnn(2);
  nnn << 0.15, -0.25;
  h.nnn_couplings = nnn;

  const Eigen::MatrixXcd full = dense_chain_hamiltonian(h);

  // assemble the block-diagonal operator from the sector matrices
  Eigen::MatrixXcd assembled = Eigen::MatrixXcd::Zero(16, 16);
  for (int k = 0; k <= 4; ++k) {
    const auto basis = sector_basis(4, k);
    const auto m = lattice::sector_matrix(h, k);
    for (std::size_t a = 0; a < basis.size(); ++a)
      for (std::size_t b = 0; b < basis.size(); ++b)
        assembled(basis[a], basis[b]) = m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  CHECK((assembled - full).cwiseAbs().maxCoeff() < 1e-14);

  // the 6x6 two-excitation block equals the projection of the full operator
  const auto m2 = lattice::sector_matrix(h, 2);
  const auto basis2 = sector_basis(4, 2);
  for (std::size_t a = 0; a < basis2.size(); ++a)
    for (std::size_t b = 0; b < basis2.size(); ++b)
      CHECK(std::abs(full(basis2[a], basis2[b]) - m2(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b))) <
            1e-14);
}

TEST_CASE("sector matrices are exactly symmetric") {
  Xoshiro256ss rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    lattice::CouplingProfile p;
    const int n = 5;
    p.couplings.resize(n - 1);
    p.onsite.resize(n);
    for (int j = 0; j < n - 1; ++j) p.couplings(j) = rng.uniform_symmetric(2.0);
    for (int j = 0; j < n; ++j) p.onsite(j) = rng.uniform_symmetric(1.0);
    const auto h = lattice::disorder_hamiltonian(p, 0.3, 0.4, 1000 + trial);
    for (int k = 0; k <= n; ++k) {
      const auto m = lattice::sector_matrix(h, k);
      CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("number conservation holds for the clean 6-site chain") {
  const auto h = lattice::clean_hamiltonian(lattice::tanh_profile(mhz_to_rad_ns(4.39), 0.35, 3, 6));
  const Eigen::MatrixXcd full = dense_chain_hamiltonian(h);
  Eigen::MatrixXcd assembled = Eigen::MatrixXcd::Zero(64, 64);
  for (int k = 0; k <= 6; ++k) {
    const auto basis = sector_basis(6, k);
    const auto m = lattice::sector_matrix(h, k);
    for (std::size_t a = 0; a < basis.size(); ++a)
      for (std::size_t b = 0; b < basis.size(); ++b)
        assembled(basis[a], basis[b]) = m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  CHECK((assembled - full).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("profile table lists bonds in MHz") {
  const auto p = lattice::tanh_profile(mhz_to_rad_ns(4.39), 0.35, 3, 10);
  const std::string table = lattice::profile_table(p);
  CHECK(table.rfind("bond\tkappa_over_2pi_MHz\n", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 10);  // header + 9 bonds
  CHECK(table.find("0.543215") != std::string::npos);          // kappa_3
}

TEST_CASE("surface gravity: analytic tanh derivative vs finite difference") {
  const double beta = mhz_to_rad_ns(4.39);
  const auto metric = lattice::MetricSpec::make_tanh(beta, 0.35, 1.0, 3);
  CHECK(metric.surface_gravity() == doctest::Approx(beta / 2.0).epsilon(1e-14));

  std::vector<double> x, f;
  for (int i = -300; i <= 300; ++i) {
    x.push_back(i * 0.01);
    f.push_back(beta * std::tanh(0.35 * i * 0.01) / 0.35);
  }
  const auto tab = lattice::MetricSpec::make_tabulated(x, f, 1.0, 3);
  CHECK(tab.horizon_x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(tab.surface_gravity() == doctest::Approx(beta / 2.0).epsilon(1e-3));

  // a table whose root sits away from x = 0 differentiates at its own root
  std::vector<double> xs, fs;
  for (int i = -200; i <= 400; ++i) {
    xs.push_back(i * 0.01);
    fs.push_back(beta * std::tanh(0.35 * (i * 0.01 - 1.7)) / 0.35);
  }
  const auto shifted = lattice::MetricSpec::make_tabulated(xs, fs, 1.0, 3);
  CHECK(shifted.horizon_x() == doctest::Approx(1.7).epsilon(1e-6));
  CHECK(shifted.surface_gravity() == doctest::Approx(beta / 2.0).epsilon(1e-3));
}
