// Wave-packet propagation: dispersion, packet construction, transport speed,
// horizon trapping and the two integration engines against each other.

#include "doctest.h"

#include <cmath>
#include <complex>

#include "bhsim/continuum.hpp"
#include "bhsim/dynamics.hpp"
#include "bhsim/lattice.hpp"
#include "bhsim/units.hpp"

using namespace bhsim;
using namespace bhsim::continuum;
using Complex = std::complex<double>;

namespace {

PacketConfig reference_packet(double d, int n, double x0) {
  PacketConfig cfg;
  cfg.d = d;
  cfg.n = n;
  cfg.alpha = 0.01;
  cfg.k = 0.01;
  cfg.delta = 20.0;  // Delta * alpha = 0.2
  cfg.x0 = x0;
  return cfg;
}

}  // namespace

TEST_CASE("dispersion relation") {
  CHECK(dispersion(0.0, 0.05) == 0.0);
  // near-linear for kd << 1
  CHECK(dispersion(0.01, 0.05) == doctest::Approx(0.01).epsilon(1e-5));
  // band maximum 1/(2d) at kd = pi/4
  const double d = 0.3;
  CHECK(dispersion(pi / (4.0 * d), d) == doctest::Approx(1.0 / (2.0 * d)).epsilon(1e-12));
  CHECK_THROWS_AS(dispersion(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("gaussian packet: normalization, neighbour phase, reference parameters") {
  auto cfg = reference_packet(0.05, 6000, -40.0);
  const auto psi = gaussian_packet(cfg);
  CHECK(psi.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));

  // wide packet: local phase increment 2d(k - pi/(4d)) between neighbours
  PacketConfig wide = reference_packet(0.25, 2400, 0.0);
  wide.delta = 60.0;
  const auto psi_w = gaussian_packet(wide);
  const int mid = wide.n / 2 - 200;
  const Complex ratio = psi_w(mid + 1) / psi_w(mid);
  const double expected = 2.0 * wide.d * (wide.k - pi / (4.0 * wide.d));
  CHECK(std::arg(ratio) == doctest::Approx(std::remainder(expected, two_pi)).epsilon(1e-9));

  // support check rejects a packet pressed against the wall
  PacketConfig cramped = cfg;
  cramped.x0 = -95.0;
  cramped.n = 220;  // chain spans [-5.5, 5.45] at d = 0.05
  CHECK_THROWS_AS(gaussian_packet(cramped), std::invalid_argument);
  PacketConfig bad = cfg;
  bad.delta = -1.0;
  CHECK_THROWS_AS(gaussian_packet(bad), std::invalid_argument);
}

TEST_CASE("validity report flags the geometric-optics window") {
  const auto cfg = reference_packet(0.05, 4000, -40.0);
  const auto rep = validity_report(cfg);
  CHECK(rep.kd == doctest::Approx(5e-4));
  CHECK(rep.d_alpha == doctest::Approx(5e-4));
  CHECK(rep.delta_alpha == doctest::Approx(0.2));
  CHECK(rep.d_over_delta == doctest::Approx(2.5e-3));
  CHECK(rep.all_satisfied());

  PacketConfig coarse = cfg;
  coarse.d = coarse.delta;  // d/Delta = 1
  CHECK(validity_report(coarse).d_over_delta_flag == Regime::violated);

  PacketConfig flat = cfg;
  flat.alpha = 0.0;
  const auto frep = validity_report(flat);
  CHECK(frep.d_alpha == 0.0);
  CHECK(frep.delta_alpha == 0.0);
  CHECK(frep.d_alpha_flag == Regime::satisfied);
}

TEST_CASE("flat-space transport at speed |f|/2 and norm conservation") {
  PacketConfig cfg = reference_packet(0.25, 2400, 0.0);
  cfg.alpha = 0.0;
  auto f = [](double) { return 1.0; };
  std::vector<double> ts{0.0, 100.0, 200.0};
  const auto traj = evolve_packet(cfg, f, ts, Engine::chebyshev);
  const double speed = std::abs(traj.center(2) - traj.center(0)) / 200.0;
  CHECK(speed == doctest::Approx(0.5).epsilon(0.05));
  for (Eigen::Index i = 0; i < traj.norm.size(); ++i) CHECK(std::abs(traj.norm(i) - 1.0) < 1e-8);
}

TEST_CASE("Chebyshev propagation matches a dense eigensolve on a random chain") {
  Xoshiro256ss rng(31);
  propagate::Tridiagonal op;
  const int n = 80;
  op.diag.resize(n);
  op.offdiag.resize(n - 1);
  for (int i = 0; i < n; ++i) op.diag(i) = rng.uniform_symmetric(0.5);
  for (int i = 0; i < n - 1; ++i) op.offdiag(i) = rng.uniform_symmetric(2.0);

  Eigen::VectorXcd psi0(n);
  for (int i = 0; i < n; ++i) psi0(i) = Complex(rng.uniform_symmetric(1.0), rng.uniform_symmetric(1.0));
  psi0.normalize();

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  m.diagonal() = op.diag;
  m.diagonal(1) = op.offdiag;
  m.diagonal(-1) = op.offdiag;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);

  for (double t : {0.0, 3.7, 120.0, 900.0}) {
    const Eigen::VectorXcd cheb = propagate::expm_chebyshev(op, psi0, t);
    Eigen::VectorXcd phases = (Complex(0, -t) * es.eigenvalues().array()).exp().matrix();
    const Eigen::VectorXcd exact = es.eigenvectors() * phases.cwiseProduct(es.eigenvectors().transpose() * psi0);
    CHECK((cheb - exact).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("Runge-Kutta and Chebyshev engines agree") {
  PacketConfig cfg = reference_packet(0.5, 600, -40.0);
  auto f = [&](double x) { return std::tanh(cfg.alpha * x); };
  std::vector<double> ts{0.0, 40.0, 80.0};
  const auto a = evolve_packet(cfg, f, ts, Engine::chebyshev);
  const auto b = evolve_packet(cfg, f, ts, Engine::runge_kutta);
  CHECK((a.final_state - b.final_state).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs(a.norm(2) - 1.0) < 1e-10);
  CHECK(std::abs(b.norm(2) - 1.0) < 1e-10);
}

TEST_CASE("packet equation reproduces the lattice single-particle walk") {
  // Same couplings, same index convention: lattice bond j (left-site indexed)
  // becomes the packet's kappa_{j+1} (right-site indexed), so the off-diagonal
  // arrays coincide and only the overall sign of H differs; occupations from a
  // single-site start are insensitive to that sign.
  const auto profile = lattice::tanh_profile(mhz_to_rad_ns(4.39), 0.35, 3, 10);
  const auto h = lattice::clean_hamiltonian(profile);

  propagate::Tridiagonal op;
  op.diag = Eigen::VectorXd::Zero(10);
  op.offdiag = -profile.couplings;

  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(10);
  psi0(0) = 1.0;
  std::vector<double> xs(10);
  for (int s = 0; s < 10; ++s) xs[static_cast<std::size_t>(s)] = s;
  std::vector<double> ts{0.0, 60.0, 130.0, 200.0};
  const auto traj = evolve_tridiagonal(op, psi0, xs, ts, Engine::runge_kutta, 1.0);

  const auto reference = dynamics::single_particle_occupations(h, 1, ts);
  CHECK((traj.density - reference).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("horizon: packet trapped for d = 0.05, released for d = 0.5") {
  std::vector<double> ts;
  for (int i = 0; i <= 64; ++i) ts.push_back(i * 25.0);

  PacketConfig coarse = reference_packet(0.5, 1400, -60.0);
  auto f = [&](double x) { return std::tanh(0.01 * x); };
  const auto traj_coarse = evolve_packet(coarse, f, ts, Engine::chebyshev, 1e-3);
  const auto trap_coarse = trapping_times(traj_coarse, 2.5);
  CHECK(trap_coarse.entry > 0.0);
  CHECK(trap_coarse.escaped);  // leaves the horizon region inside the window

  PacketConfig fine = reference_packet(0.05, 14000, -60.0);
  const auto traj_fine = evolve_packet(fine, f, ts, Engine::chebyshev, 1e-3);
  CHECK(traj_fine.center.maxCoeff() < 0.0);  // never crosses the horizon
  CHECK(traj_fine.center(64) > -1.0);        // but hugs it
  for (Eigen::Index i = 0; i < traj_fine.norm.size(); ++i) CHECK(std::abs(traj_fine.norm(i) - 1.0) < 1e-8);
}

TEST_CASE("trapping time in a fixed horizon region grows as d shrinks") {
  // Residence in the fixed region |x| < 2.5 (the coarsest run's 5d) is the
  // discretization-controlled quantity; with the literal 5d radius both the
  // region and the closest approach scale with d and the residence time goes
  // flat.  Runs share alpha, k, Delta and x0.
  auto f = [](double x) { return std::tanh(0.01 * x); };
  std::vector<double> ts;
  for (int i = 0; i <= 110; ++i) ts.push_back(i * 20.0);

  double previous = -1.0;
  for (double d : {0.5, 0.25, 0.1, 0.05}) {
    PacketConfig cfg = reference_packet(d, static_cast<int>(std::ceil(1000.0 / d)), -60.0);
    const auto traj = evolve_packet(cfg, f, ts, Engine::chebyshev, 1e-3);
    const auto trap = trapping_times(traj, 2.5);
    CHECK(trap.entry > 0.0);
    CHECK(trap.escaped);
    CHECK(trap.duration > previous);
    previous = trap.duration;
  }
}

TEST_CASE("boundary escape monitor fires when the packet hits the wall") {
  PacketConfig cfg = reference_packet(0.25, 700, 0.0);
  cfg.alpha = 0.0;
  auto f = [](double) { return 1.0; };
  std::vector<double> ts{0.0, 120.0, 240.0};  // packet reaches the edge at |x| ~ 87
  CHECK_THROWS_AS(evolve_packet(cfg, f, ts, Engine::chebyshev, 1e-6), std::runtime_error);
}
