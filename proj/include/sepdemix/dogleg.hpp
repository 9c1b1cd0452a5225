#pragma once

#include <functional>

#include <Eigen/Dense>

#include "sepdemix/types.hpp"

namespace sepdemix {

struct DoglegOptions {
  double resid_tol = 1e-8;      // converged when ||F(x)||_2 drops below this
  int max_iters = 300;
  double fd_step = 1e-7;        // forward-difference Jacobian step (relative)
  double initial_radius = 1.0;
  double min_radius = 1e-13;    // trust region collapse => give up
  double grad_floor = 1e-14;    // stationary-gradient give-up threshold
};

struct DoglegResult {
  Eigen::VectorXd x;
  double resid_norm = 0.0;
  int iters = 0;
  bool converged = false;
};

/// Trust-region dogleg for square or rectangular nonlinear systems F(x) = 0,
/// minimizing 1/2 ||F||^2. The Gauss-Newton step uses a rank-revealing
/// least-squares solve, so gauge directions in a rank-deficient Jacobian are
/// handled by the minimum-norm step.
inline DoglegResult dogleg_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
                                 Eigen::VectorXd x, const DoglegOptions& opts = {}) {
  DoglegResult res;
  Eigen::VectorXd fx = F(x);
  const Eigen::Index m = fx.size();
  const Eigen::Index n = x.size();
  double radius = opts.initial_radius;

  Eigen::MatrixXd J(m, n);
  bool need_jacobian = true;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    res.iters = iter;
    const double fnorm = fx.norm();
    if (fnorm <= opts.resid_tol) {
      res.converged = true;
      break;
    }
    if (need_jacobian) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double step = opts.fd_step * std::max(1.0, std::abs(x(j)));
        Eigen::VectorXd xs = x;
        xs(j) += step;
        J.col(j) = (F(xs) - fx) / step;
      }
      need_jacobian = false;
    }

    const Eigen::VectorXd g = J.transpose() * fx;  // gradient of 1/2 ||F||^2
    const double gnorm = g.norm();
    if (gnorm <= opts.grad_floor) break;

    // Cauchy point along -g, Gauss-Newton step via min-norm least squares.
    const double jg2 = (J * g).squaredNorm();
    const Eigen::VectorXd p_cauchy = (jg2 > 0) ? (-(gnorm * gnorm) / jg2 * g).eval()
                                               : (-radius / gnorm * g).eval();
    const Eigen::VectorXd p_gn =
        -J.completeOrthogonalDecomposition().solve(fx).eval();

    Eigen::VectorXd p;
    if (std::isfinite(p_gn.norm()) && p_gn.norm() <= radius) {
      p = p_gn;
    } else if (p_cauchy.norm() >= radius) {
      p = (radius / p_cauchy.norm()) * p_cauchy;
    } else {
      // dogleg segment: p_cauchy + t (p_gn - p_cauchy) hitting the radius
      const Eigen::VectorXd d = p_gn - p_cauchy;
      const double a = d.squaredNorm();
      const double b = 2.0 * p_cauchy.dot(d);
      const double c = p_cauchy.squaredNorm() - radius * radius;
      const double disc = std::max(0.0, b * b - 4 * a * c);
      const double t = (a > 0) ? (-b + std::sqrt(disc)) / (2 * a) : 0.0;
      p = p_cauchy + t * d;
    }

    const double predicted =
        0.5 * fnorm * fnorm - 0.5 * (fx + J * p).squaredNorm();
    const Eigen::VectorXd x_try = x + p;
    const Eigen::VectorXd f_try = F(x_try);
    const double actual = 0.5 * fnorm * fnorm - 0.5 * f_try.squaredNorm();
    const double rho = (predicted > 0) ? actual / predicted : -1.0;

    if (rho > 1e-4 && std::isfinite(f_try.norm())) {
      x = x_try;
      fx = f_try;
      need_jacobian = true;
    }
    if (rho < 0.25) {
      radius = 0.25 * p.norm();
    } else if (rho > 0.75 && p.norm() > 0.8 * radius) {
      radius = std::min(2.0 * radius, 1e8);
    }
    if (radius < opts.min_radius) break;
  }
  res.x = std::move(x);
  res.resid_norm = fx.norm();
  if (res.resid_norm <= opts.resid_tol) res.converged = true;
  return res;
}

}  // namespace sepdemix
