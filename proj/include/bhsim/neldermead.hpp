// neldermead.hpp — derivative-free simplex minimization with seeded restarts.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "bhsim/rng.hpp"

namespace bhsim {

struct SimplexOptions {
  int max_iterations = 4000;   // per restart
  double f_tol = 1e-14;        // absolute spread of simplex values
  double step = 0.05;          // initial simplex step, relative to coordinate scale
  int restarts = 3;            // random restarts around the best point so far
  std::uint64_t seed = 0;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double fval = 0.0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

inline SimplexResult nelder_mead_once(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x0,
                                      const Eigen::VectorXd& scale, const SimplexOptions& opts) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n) + 1, x0);
  std::vector<double> vals(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) pts[static_cast<std::size_t>(i) + 1](i) += opts.step * scale(i);
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = f(pts[i]);

  auto order = [&] {
    std::vector<std::size_t> idx(pts.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<Eigen::VectorXd> p2;
    std::vector<double> v2;
    for (auto i : idx) {
      p2.push_back(pts[i]);
      v2.push_back(vals[i]);
    }
    pts.swap(p2);
    vals.swap(v2);
  };

  SimplexResult res;
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    order();
    if (vals.back() - vals.front() < opts.f_tol) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += pts[static_cast<std::size_t>(i)];
    centroid /= n;

    const Eigen::VectorXd reflected = centroid + (centroid - pts.back());
    const double fr = f(reflected);
    if (fr < vals.front()) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts.back());
      const double fe = f(expanded);
      if (fe < fr) {
        pts.back() = expanded;
        vals.back() = fe;
      } else {
        pts.back() = reflected;
        vals.back() = fr;
      }
      continue;
    }
    if (fr < vals[vals.size() - 2]) {
      pts.back() = reflected;
      vals.back() = fr;
      continue;
    }
    const Eigen::VectorXd contracted = centroid + 0.5 * (pts.back() - centroid);
    const double fc = f(contracted);
    if (fc < vals.back()) {
      pts.back() = contracted;
      vals.back() = fc;
      continue;
    }
    for (std::size_t i = 1; i < pts.size(); ++i) {  // shrink toward the best
      pts[i] = pts.front() + 0.5 * (pts[i] - pts.front());
      vals[i] = f(pts[i]);
    }
  }
  order();
  res.x = pts.front();
  res.fval = vals.front();
  res.iterations = iter;
  return res;
}

}  // namespace detail

// Local minimization from x0; after the first descent, `restarts` seeded
// perturbations of the incumbent are polished and the best point wins.
// Deterministic for fixed (f, x0, options).
inline SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                                 const SimplexOptions& opts = {}) {
  if (x0.size() == 0) throw std::invalid_argument("nelder_mead: empty initial point");
  Eigen::VectorXd scale = x0.cwiseAbs().cwiseMax(1e-3);

  SimplexResult best = detail::nelder_mead_once(f, x0, scale, opts);
  int total_iter = best.iterations;
  Xoshiro256ss rng(opts.seed);
  for (int r = 0; r < opts.restarts; ++r) {
    Eigen::VectorXd start = best.x;
    for (Eigen::Index i = 0; i < start.size(); ++i) start(i) += rng.uniform_symmetric(opts.step * scale(i));
    SimplexResult trial = detail::nelder_mead_once(f, start, scale, opts);
    total_iter += trial.iterations;
    if (trial.fval < best.fval) best = trial;
  }
  best.iterations = total_iter;
  return best;
}

}  // namespace bhsim
