// propagate.hpp — time stepping for i d/dt psi = T psi with T real symmetric
// tridiagonal.
//
// Two engines: an embedded Dormand-Prince 5(4) pair with per-step error
// control, and a Chebyshev expansion of exp(-i T t) whose coefficients are
// Bessel functions evaluated by Miller downward recurrence.  The Chebyshev
// route is exact to expansion tolerance for the time-independent chains used
// here and costs one matvec per polynomial order, so it carries the long
// wide-grid runs; the pair cross-check each other in tests.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace bhsim::propagate {

using Complex = std::complex<double>;

struct Tridiagonal {
  Eigen::VectorXd diag;     // N entries
  Eigen::VectorXd offdiag;  // N-1 entries

  Eigen::Index size() const { return diag.size(); }

  void validate() const {
    if (diag.size() < 1 || offdiag.size() != diag.size() - 1)
      throw std::invalid_argument("Tridiagonal: diagonal/off-diagonal size mismatch");
    if (!diag.allFinite() || !offdiag.allFinite()) throw std::invalid_argument("Tridiagonal: entries must be finite");
  }

  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& out) const {
    const Eigen::Index n = size();
    out.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex v = diag(i) * x(i);
      if (i > 0) v += offdiag(i - 1) * x(i - 1);
      if (i + 1 < n) v += offdiag(i) * x(i + 1);
      out(i) = v;
    }
  }

  // Gershgorin bounds on the spectrum.
  std::pair<double, double> spectral_bounds() const {
    const Eigen::Index n = size();
    double lo = diag(0), hi = diag(0);
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = 0.0;
      if (i > 0) r += std::abs(offdiag(i - 1));
      if (i + 1 < n) r += std::abs(offdiag(i));
      lo = std::min(lo, diag(i) - r);
      hi = std::max(hi, diag(i) + r);
    }
    return {lo, hi};
  }
};

// ------------------------------- Bessel helper -------------------------------

// J_0..J_k_max(x) by Miller's downward recurrence, normalized with
// J_0 + 2 sum J_{2m} = 1.  Adequate over the k ~ x ranges used by the
// Chebyshev expansion.
inline std::vector<double> bessel_j_sequence(int k_max, double x) {
  std::vector<double> j(static_cast<std::size_t>(k_max) + 1, 0.0);
  if (x < 1e-8) {  // leading series terms; higher orders are below 5e-18
    j[0] = 1.0 - 0.25 * x * x;
    if (k_max >= 1) j[1] = 0.5 * x;
    if (k_max >= 2) j[2] = 0.125 * x * x;
    return j;
  }
  const int start = k_max + 30 + static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k_max) + x)));
  double jp = 0.0;        // J_{m+1}
  double jc = 1e-30;      // J_m
  double norm = 0.0;
  for (int m = start; m >= 1; --m) {
    const double jm = (2.0 * m / x) * jc - jp;
    jp = jc;
    jc = jm;
    if (m - 1 <= k_max) j[static_cast<std::size_t>(m - 1)] = jc;
    if ((m - 1) % 2 == 0 && m - 1 > 0) norm += 2.0 * jc;
    if (std::abs(jc) > 1e250) {  // rescale to dodge overflow
      jc *= 1e-250;
      jp *= 1e-250;
      norm *= 1e-250;
      for (auto& v : j) v *= 1e-250;
    }
  }
  norm += j[0];
  for (auto& v : j) v /= norm;
  return j;
}

// ------------------------------ Chebyshev engine ------------------------------

// out = exp(-i T t) psi, expanded in Chebyshev polynomials of the rescaled
// operator; series truncated once the Bessel coefficients fall below tol.
inline Eigen::VectorXcd expm_chebyshev(const Tridiagonal& t_mat, const Eigen::VectorXcd& psi, double t,
                                       double tol = 1e-13) {
  t_mat.validate();
  if (psi.size() != t_mat.size()) throw std::invalid_argument("expm_chebyshev: state size mismatch");
  auto [lo, hi] = t_mat.spectral_bounds();
  double half_span = 0.5 * (hi - lo);
  const double center = 0.5 * (hi + lo);
  if (half_span <= 0.0) half_span = 1e-15;

  const double x = half_span * std::abs(t);
  int k_max = static_cast<int>(std::ceil(x + 11.0 * std::cbrt(x + 1.0) + 20.0));
  const auto bessel = bessel_j_sequence(k_max, x);
  while (k_max > 1 && std::abs(bessel[static_cast<std::size_t>(k_max)]) < tol &&
         std::abs(bessel[static_cast<std::size_t>(k_max - 1)]) < tol)
    --k_max;

  const double sign = t >= 0.0 ? 1.0 : -1.0;
  // S = (T - center)/half_span; phi_k follow the Chebyshev recurrence.
  Eigen::VectorXcd phi_prev = psi;
  Eigen::VectorXcd tmp(psi.size());
  t_mat.apply(psi, tmp);
  Eigen::VectorXcd phi_curr = (tmp - center * psi) / half_span;

  // c_k = (2 - delta_k0) (-i)^k J_k(|t| a), with k -> sign flip for t < 0.
  Eigen::VectorXcd acc = bessel[0] * phi_prev;
  for (int k = 1; k <= k_max; ++k) {
    Complex ik;  // (-i * sign)^k
    switch (k % 4) {
      case 0: ik = {1, 0}; break;
      case 1: ik = {0, -sign}; break;
      case 2: ik = {-1, 0}; break;
      default: ik = {0, sign}; break;
    }
    acc += 2.0 * bessel[static_cast<std::size_t>(k)] * ik * phi_curr;
    if (k == k_max) break;
    t_mat.apply(phi_curr, tmp);
    Eigen::VectorXcd phi_next = 2.0 * (tmp - center * phi_curr) / half_span - phi_prev;
    phi_prev.swap(phi_curr);
    phi_curr.swap(phi_next);
  }
  return std::exp(Complex(0, -center * t)) * acc;
}

// ------------------------------ Dormand-Prince --------------------------------

struct RkOptions {
  double abs_tol = 1e-10;  // per-step max-norm error bound
  double initial_step = 1e-3;
  double max_step = 1e9;
  std::size_t max_steps = 50'000'000;
};

// Integrate i d/dt psi = T psi from t0 to t1 with the DP5(4) embedded pair.
inline Eigen::VectorXcd integrate_rk(const Tridiagonal& t_mat, Eigen::VectorXcd psi, double t0, double t1,
                                     const RkOptions& opts = {}) {
  t_mat.validate();
  if (psi.size() != t_mat.size()) throw std::invalid_argument("integrate_rk: state size mismatch");
  if (t1 < t0) throw std::invalid_argument("integrate_rk: backwards integration not supported");
  if (t1 == t0) return psi;

  const Eigen::Index n = psi.size();
  auto rhs = [&](const Eigen::VectorXcd& y, Eigen::VectorXcd& out) {
    t_mat.apply(y, out);
    out *= Complex(0, -1);
  };

  Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y(n), y5(n);
  rhs(psi, k1);
  double t = t0;
  double h = std::min({opts.initial_step, opts.max_step, t1 - t0});
  std::size_t steps = 0;

  while (t < t1) {
    if (++steps > opts.max_steps) throw std::runtime_error("integrate_rk: step limit exceeded");
    h = std::min(h, t1 - t);

    y = psi + h * (1.0 / 5.0) * k1;
    rhs(y, k2);
    y = psi + h * ((3.0 / 40.0) * k1 + (9.0 / 40.0) * k2);
    rhs(y, k3);
    y = psi + h * ((44.0 / 45.0) * k1 - (56.0 / 15.0) * k2 + (32.0 / 9.0) * k3);
    rhs(y, k4);
    y = psi + h * ((19372.0 / 6561.0) * k1 - (25360.0 / 2187.0) * k2 + (64448.0 / 6561.0) * k3 - (212.0 / 729.0) * k4);
    rhs(y, k5);
    y = psi + h * ((9017.0 / 3168.0) * k1 - (355.0 / 33.0) * k2 + (46732.0 / 5247.0) * k3 + (49.0 / 176.0) * k4 -
                   (5103.0 / 18656.0) * k5);
    rhs(y, k6);
    y5 = psi + h * ((35.0 / 384.0) * k1 + (500.0 / 1113.0) * k3 + (125.0 / 192.0) * k4 - (2187.0 / 6784.0) * k5 +
                    (11.0 / 84.0) * k6);
    rhs(y5, k7);

    // embedded 4th-order solution for the error estimate
    y = psi + h * ((5179.0 / 57600.0) * k1 + (7571.0 / 16695.0) * k3 + (393.0 / 640.0) * k4 -
                   (92097.0 / 339200.0) * k5 + (187.0 / 2100.0) * k6 + (1.0 / 40.0) * k7);
    const double err = (y5 - y).cwiseAbs().maxCoeff();

    if (err <= opts.abs_tol) {
      t += h;
      psi.swap(y5);
      k1.swap(k7);  // FSAL
    }
    const double scale = err > 0.0 ? 0.9 * std::pow(opts.abs_tol / err, 0.2) : 5.0;
    h *= std::clamp(scale, 0.2, 5.0);
    h = std::min(h, opts.max_step);
    if (h < 1e-14 * std::max(1.0, std::abs(t))) throw std::runtime_error("integrate_rk: step size underflow");
  }
  return psi;
}

}  // namespace bhsim::propagate
