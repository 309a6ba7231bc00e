// devicemodel.hpp — tunable-coupler calibration mathematics.
//
// A transmon's frequency follows its flux bias (Zpa) through
//   omega(Zpa) = sqrt(8 E_JJ E_C sqrt(delta^2 + cos^2(A Zpa + phi))) - E_C,
// and a qubit-coupler-qubit triple produces the effective exchange
//   g_eff = g_qq + g_qc g_q2c / Lambda,
//   Lambda = harmonic mean of (omega_q - omega_c) and (omega_q2 - omega_c).
//
// Sign convention: Lambda is built from omega_qubit - omega_coupler, so a
// coupler parked above the qubits gives Lambda < 0 and g_eff tunes from
// g_qq through zero to negative as the coupler comes down.  The inverse
// map Zpa(g_eff) is the composition of the Lambda inversion with
// Zpa(omega) under this same convention.
//
// Units: omegas and E_JJ/E_C in GHz (as nu = omega/2pi), couplings in MHz;
// swap dynamics convert to angular rad/ns internally.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bhsim/neldermead.hpp"
#include "bhsim/units.hpp"

namespace bhsim::device {

// -------------------------------- transmon map --------------------------------

struct TransmonParams {
  double e_jj_ghz = 0.0;     // Josephson energy / 2pi
  double e_c_ghz = 0.0;      // charging energy / 2pi
  double asymmetry = 0.0;    // junction asymmetry delta in [0, 1)
  double zpa_slope = 1.0;    // A, rad per Zpa unit
  double flux_offset = 0.0;  // phi, rad

  void validate() const {
    if (e_jj_ghz <= 0 || e_c_ghz <= 0) throw std::invalid_argument("TransmonParams: energies must be positive");
    if (asymmetry < 0 || asymmetry >= 1) throw std::invalid_argument("TransmonParams: asymmetry must be in [0, 1)");
    if (zpa_slope == 0) throw std::invalid_argument("TransmonParams: Zpa slope must be nonzero");
  }
};

inline double freq_from_zpa(const TransmonParams& p, double zpa) {
  p.validate();
  const double c = std::cos(p.zpa_slope * zpa + p.flux_offset);
  return std::sqrt(8.0 * p.e_jj_ghz * p.e_c_ghz * std::sqrt(p.asymmetry * p.asymmetry + c * c)) - p.e_c_ghz;
}

inline double max_frequency(const TransmonParams& p) {
  return std::sqrt(8.0 * p.e_jj_ghz * p.e_c_ghz * std::sqrt(p.asymmetry * p.asymmetry + 1.0)) - p.e_c_ghz;
}

inline double min_frequency(const TransmonParams& p) {
  return std::sqrt(8.0 * p.e_jj_ghz * p.e_c_ghz * p.asymmetry) - p.e_c_ghz;
}

enum class Branch { positive, negative };

// Zpa(omega) = (arccos(+-sqrt((omega+E_C)^4/(8 E_JJ E_C)^2 - delta^2)) - phi) / A.
// The positive branch takes A Zpa + phi in [0, pi/2], the negative in (pi/2, pi].
inline double zpa_from_freq(const TransmonParams& p, double omega_ghz, Branch branch = Branch::positive) {
  p.validate();
  if (omega_ghz > max_frequency(p) + 1e-12 || omega_ghz < min_frequency(p) - 1e-12)
    throw std::invalid_argument("zpa_from_freq: frequency outside the achievable band");
  const double ratio = std::pow(omega_ghz + p.e_c_ghz, 4) / std::pow(8.0 * p.e_jj_ghz * p.e_c_ghz, 2);
  const double arg2 = ratio - p.asymmetry * p.asymmetry;
  const double root = std::sqrt(std::clamp(arg2, 0.0, 1.0));
  const double signed_root = branch == Branch::positive ? root : -root;
  return (std::acos(signed_root) - p.flux_offset) / p.zpa_slope;
}

// ------------------------------- coupler triple --------------------------------

struct CouplerTriple {
  double g_qc_mhz = 0.0;    // qubit_j  <-> coupler
  double g_q2c_mhz = 0.0;   // qubit_j+1 <-> coupler
  double g_qq_mhz = 0.0;    // direct qubit-qubit
  double omega_q_ghz = 0.0;
  double omega_q2_ghz = 0.0;
  TransmonParams coupler;
  double anharmonicity_q_mhz = 0.0;  // recorded device data; the single-
  double anharmonicity_c_mhz = 0.0;  // excitation models here never feel
  double anharmonicity_q2_mhz = 0.0; // the anharmonicities

  // Largest g/detuning ratio at this coupler frequency; > 0.25 means the
  // dispersive treatment is suspect.
  double dispersive_ratio(double omega_c_ghz) const {
    const double d1 = std::abs(omega_q_ghz - omega_c_ghz) * 1e3;
    const double d2 = std::abs(omega_q2_ghz - omega_c_ghz) * 1e3;
    if (d1 == 0 || d2 == 0) return std::numeric_limits<double>::infinity();
    return std::max(std::abs(g_qc_mhz) / d1, std::abs(g_q2c_mhz) / d2);
  }
};

// Harmonic-mean detuning Lambda in MHz; throws on resonance.
inline double harmonic_detuning(const CouplerTriple& t, double omega_c_ghz) {
  const double d1 = (t.omega_q_ghz - omega_c_ghz) * 1e3;
  const double d2 = (t.omega_q2_ghz - omega_c_ghz) * 1e3;
  if (d1 == 0.0 || d2 == 0.0) throw std::invalid_argument("harmonic_detuning: coupler resonant with a qubit");
  return 2.0 / (1.0 / d1 + 1.0 / d2);
}

inline double effective_coupling(const CouplerTriple& t, double omega_c_ghz) {
  return t.g_qq_mhz + t.g_qc_mhz * t.g_q2c_mhz / harmonic_detuning(t, omega_c_ghz);
}

enum class ChainPosition { left_end, middle, right_end };

// Dressed frequency of the triple's first qubit: omega_q plus g^2/Delta for
// each adjacent coupler.  End qubits touch one coupler; for a middle qubit
// pass its couplings to the left and right couplers as g_qc and g_q2c.
inline double dressed_frequency(const CouplerTriple& t, ChainPosition position, double omega_c_left_ghz,
                                double omega_c_right_ghz) {
  auto shift = [&](double g_mhz, double omega_c_ghz) {
    const double det = (t.omega_q_ghz - omega_c_ghz) * 1e3;
    if (det == 0.0) throw std::invalid_argument("dressed_frequency: coupler resonant with the qubit");
    return g_mhz * g_mhz / det * 1e-3;  // back to GHz
  };
  switch (position) {
    case ChainPosition::left_end: return t.omega_q_ghz + shift(t.g_qc_mhz, omega_c_right_ghz);
    case ChainPosition::right_end: return t.omega_q_ghz + shift(t.g_q2c_mhz, omega_c_left_ghz);
    default: return t.omega_q_ghz + shift(t.g_qc_mhz, omega_c_left_ghz) + shift(t.g_q2c_mhz, omega_c_right_ghz);
  }
}

// Coupler frequency that realizes a target effective coupling.  The defining
// relation 1/(wq - wc) + 1/(wq2 - wc) = 2/Lambda is quadratic in wc; the
// root with the coupler outside the qubit band is the physical one.
inline double coupler_freq_for_coupling(const CouplerTriple& t, double g_target_mhz) {
  if (g_target_mhz == t.g_qq_mhz)
    throw std::invalid_argument("coupler_freq_for_coupling: target equals the direct coupling (infinite detuning)");
  const double lambda = t.g_qc_mhz * t.g_q2c_mhz / (g_target_mhz - t.g_qq_mhz);  // MHz
  const double wq = t.omega_q_ghz * 1e3, wq2 = t.omega_q2_ghz * 1e3;             // MHz
  const double s = 2.0 / lambda;
  const double a = s;
  const double b = 2.0 - s * (wq + wq2);
  const double c = s * wq * wq2 - (wq + wq2);
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0) throw std::invalid_argument("coupler_freq_for_coupling: unreachable coupling");
  const double lo = std::min(wq, wq2), hi = std::max(wq, wq2);
  // The quadratic admits a spurious root pinned at a qubit frequency (zero
  // detuning); keep the root that actually reproduces the target coupling.
  double best_root = 0.0, best_err = std::numeric_limits<double>::infinity();
  for (double root : {(-b + std::sqrt(disc)) / (2.0 * a), (-b - std::sqrt(disc)) / (2.0 * a)}) {
    if (root > lo && root < hi) continue;  // coupler parked between the qubits: rejected
    if (root == wq || root == wq2) continue;
    const double err = std::abs(effective_coupling(t, root * 1e-3) - g_target_mhz);
    if (err < best_err) {
      best_err = err;
      best_root = root;
    }
  }
  if (best_err > 1e-9 * std::max(1.0, std::abs(g_target_mhz)))
    throw std::invalid_argument("coupler_freq_for_coupling: unreachable coupling");
  return best_root * 1e-3;
}

inline double zpa_from_target_coupling(const CouplerTriple& t, double g_target_mhz, Branch branch = Branch::positive) {
  const double omega_c = coupler_freq_for_coupling(t, g_target_mhz);
  return zpa_from_freq(t.coupler, omega_c, branch);
}

// ------------------------------ two-body spectra -------------------------------

// Avoided-crossing branches of one qubit and one coupler,
// omega_pm = (wq + wc)/2 +- sqrt(g^2 + (wq - wc)^2/4), in GHz.
inline std::pair<double, double> anticrossing_branches(double g_mhz, double omega_q_ghz, double omega_c_ghz) {
  if (g_mhz <= 0) throw std::invalid_argument("anticrossing_branches: coupling must be positive");
  const double g = g_mhz * 1e-3;
  const double mid = 0.5 * (omega_q_ghz + omega_c_ghz);
  const double gap = std::sqrt(g * g + 0.25 * (omega_q_ghz - omega_c_ghz) * (omega_q_ghz - omega_c_ghz));
  return {mid + gap, mid - gap};
}

// Joint probability of |01> staying put under exchange,
// P01(t) = cos(sqrt(4 g^2 + Delta^2) t)/2 + 1/2 with angular arguments.
inline double swap_probability(double g_eff_mhz, double detuning_mhz, double t_ns) {
  const double g = mhz_to_rad_ns(g_eff_mhz);
  const double delta = mhz_to_rad_ns(detuning_mhz);
  return 0.5 * std::cos(std::sqrt(4.0 * g * g + delta * delta) * t_ns) + 0.5;
}

// Recover |g_eff| from a sampled resonant P01 trace: coarse DFT peak, then a
// golden-section refinement of the least-squares cosine fit.  The Fourier
// frequency of P01 is 2 g_eff.
inline double coupling_from_swap_trace(const std::vector<double>& t_ns, const std::vector<double>& p01) {
  if (t_ns.size() != p01.size() || t_ns.size() < 8)
    throw std::invalid_argument("coupling_from_swap_trace: need matching samples, at least 8");
  const std::size_t n = t_ns.size();
  const double span = t_ns.back() - t_ns.front();
  if (span <= 0) throw std::invalid_argument("coupling_from_swap_trace: time samples must increase");

  double mean = 0.0;
  for (double p : p01) mean += p;
  mean /= static_cast<double>(n);

  // least-squares residual of p ~ A cos(w t) + B sin(w t) + C at fixed w
  auto residual = [&](double w) {
    double cc = 0, cs = 0, ss = 0, pc = 0, ps = 0, psum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = std::cos(w * t_ns[i]), s = std::sin(w * t_ns[i]);
      cc += c * c;
      cs += c * s;
      ss += s * s;
      pc += p01[i] * c;
      ps += p01[i] * s;
      psum += p01[i];
    }
    Eigen::Matrix3d m;
    m << cc, cs, 0, cs, ss, 0, 0, 0, static_cast<double>(n);
    Eigen::Vector3d rhs(pc, ps, psum);
    double csum = 0, ssum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      csum += std::cos(w * t_ns[i]);
      ssum += std::sin(w * t_ns[i]);
    }
    m(0, 2) = m(2, 0) = csum;
    m(1, 2) = m(2, 1) = ssum;
    const Eigen::Vector3d coef = m.ldlt().solve(rhs);
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fit = coef(0) * std::cos(w * t_ns[i]) + coef(1) * std::sin(w * t_ns[i]) + coef(2);
      r += (p01[i] - fit) * (p01[i] - fit);
    }
    return r;
  };

  // coarse scan over DFT bins
  double best_w = 0.0, best_amp = -1.0;
  const std::size_t bins = 4 * n;
  for (std::size_t kbin = 1; kbin <= bins / 2; ++kbin) {
    const double w = two_pi * static_cast<double>(kbin) / (4.0 * span);
    double re = 0, im = 0;
    for (std::size_t i = 0; i < n; ++i) {
      re += (p01[i] - mean) * std::cos(w * t_ns[i]);
      im += (p01[i] - mean) * std::sin(w * t_ns[i]);
    }
    const double amp = re * re + im * im;
    if (amp > best_amp) {
      best_amp = amp;
      best_w = w;
    }
  }

  // golden-section around the coarse peak
  double lo = best_w * 0.8, hi = best_w * 1.2;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = residual(x1), f2 = residual(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-12 * best_w; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = residual(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = residual(x2);
    }
  }
  const double w_star = 0.5 * (lo + hi);
  return rad_ns_to_mhz(w_star / 2.0);  // g = half the Fourier frequency
}

// ------------------------------ three-body model -------------------------------

// Ascending single-excitation eigenvalues of the (q, c, q2) exchange triangle.
inline Eigen::Vector3d three_body_spectrum(const CouplerTriple& t, double omega_c_ghz) {
  Eigen::Matrix3d h;
  h << t.omega_q_ghz, t.g_qc_mhz * 1e-3, t.g_qq_mhz * 1e-3,
       t.g_qc_mhz * 1e-3, omega_c_ghz, t.g_q2c_mhz * 1e-3,
       t.g_qq_mhz * 1e-3, t.g_q2c_mhz * 1e-3, t.omega_q2_ghz;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// ------------------------------ spectroscopy fit -------------------------------

struct SpectrumPoint {
  double zpa;
  double freq_ghz;
};

struct SpectroscopyData {
  std::vector<SpectrumPoint> three_body;    // peaks of the q-c-q2 spectrum vs coupler Zpa
  std::vector<SpectrumPoint> anticross_q;   // (q, c) avoided crossing branches
  std::vector<SpectrumPoint> anticross_q2;  // (q2, c) avoided crossing branches
};

struct SpectroscopyFit {
  double g_qc_mhz = 0.0;
  double g_q2c_mhz = 0.0;
  double e_jj_ghz = 0.0;
  double zpa_slope = 0.0;
  double flux_offset = 0.0;
  double residual = 0.0;  // summed squared residuals, GHz^2
  double rss_three_body = 0.0;
  double rss_anticross_q = 0.0;
  double rss_anticross_q2 = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct SpectroscopyFitOptions {
  int max_iterations = 6000;
  int restarts = 3;
  std::uint64_t seed = 1;
};

namespace detail {

inline void require_varied(const std::vector<SpectrumPoint>& pts, const char* label) {
  if (pts.size() < 5) throw std::invalid_argument(std::string("fit_spectroscopy: need at least 5 points in ") + label);
  double lo = pts.front().freq_ghz, hi = lo;
  for (const auto& p : pts) {
    lo = std::min(lo, p.freq_ghz);
    hi = std::max(hi, p.freq_ghz);
  }
  if (hi - lo < 1e-9) throw std::invalid_argument(std::string("fit_spectroscopy: degenerate (constant) data in ") + label);
}

}  // namespace detail

// Simultaneous least-squares fit of {g_qc, g_q2c, E_JJ, A, phi} against the
// three spectroscopy point sets.  Observed peaks are matched to the nearest
// model branch.  Local search; the initial guess must sit in the basin.
inline SpectroscopyFit fit_spectroscopy(const SpectroscopyData& data, const CouplerTriple& fixed,
                                        const TransmonParams& coupler_init, double g_qc_init_mhz,
                                        double g_q2c_init_mhz, const SpectroscopyFitOptions& opts = {}) {
  detail::require_varied(data.three_body, "three_body");
  detail::require_varied(data.anticross_q, "anticross_q");
  detail::require_varied(data.anticross_q2, "anticross_q2");
  coupler_init.validate();

  auto objective_parts = [&](const Eigen::VectorXd& x, double* parts) {
    CouplerTriple t = fixed;
    t.g_qc_mhz = x(0);
    t.g_q2c_mhz = x(1);
    t.coupler = coupler_init;
    t.coupler.e_jj_ghz = std::abs(x(2));
    t.coupler.zpa_slope = x(3);
    t.coupler.flux_offset = x(4);

    double rss3 = 0.0, rss1 = 0.0, rss2 = 0.0;
    for (const auto& pt : data.three_body) {
      const double wc = freq_from_zpa(t.coupler, pt.zpa);
      const Eigen::Vector3d eig = three_body_spectrum(t, wc);
      double best = std::abs(pt.freq_ghz - eig(0));
      for (int i = 1; i < 3; ++i) best = std::min(best, std::abs(pt.freq_ghz - eig(i)));
      rss3 += best * best;
    }
    auto branch_rss = [&](const std::vector<SpectrumPoint>& pts, double g_mhz, double omega_q) {
      double rss = 0.0;
      for (const auto& pt : pts) {
        const double wc = freq_from_zpa(t.coupler, pt.zpa);
        const auto [up, down] = anticrossing_branches(std::abs(g_mhz) + 1e-12, omega_q, wc);
        const double r = std::min(std::abs(pt.freq_ghz - up), std::abs(pt.freq_ghz - down));
        rss += r * r;
      }
      return rss;
    };
    rss1 = branch_rss(data.anticross_q, x(0), fixed.omega_q_ghz);
    rss2 = branch_rss(data.anticross_q2, x(1), fixed.omega_q2_ghz);
    if (parts) {
      parts[0] = rss3;
      parts[1] = rss1;
      parts[2] = rss2;
    }
    return rss3 + rss1 + rss2;
  };

  Eigen::VectorXd x0(5);
  x0 << g_qc_init_mhz, g_q2c_init_mhz, coupler_init.e_jj_ghz, coupler_init.zpa_slope, coupler_init.flux_offset;
  SimplexOptions sopts;
  sopts.max_iterations = opts.max_iterations;
  sopts.restarts = opts.restarts;
  sopts.seed = opts.seed;
  sopts.step = 0.02;
  auto objective = [&](const Eigen::VectorXd& x) {
    try {
      return objective_parts(x, nullptr);
    } catch (const std::invalid_argument&) {  // simplex wandered out of the model domain
      return 1e30;
    }
  };
  const auto res = nelder_mead(objective, x0, sopts);
  if (!res.converged) throw std::runtime_error("fit_spectroscopy: simplex did not converge");

  SpectroscopyFit fit;
  double parts[3];
  fit.residual = objective_parts(res.x, parts);
  fit.rss_three_body = parts[0];
  fit.rss_anticross_q = parts[1];
  fit.rss_anticross_q2 = parts[2];
  fit.g_qc_mhz = std::abs(res.x(0));
  fit.g_q2c_mhz = std::abs(res.x(1));
  fit.e_jj_ghz = std::abs(res.x(2));
  fit.zpa_slope = res.x(3);
  fit.flux_offset = res.x(4);
  fit.iterations = res.iterations;
  fit.converged = res.converged;
  return fit;
}

}  // namespace bhsim::device
