#include "sepdemix/matrix_recovery.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace sepdemix {

namespace {

struct FactorPair {
  Eigen::MatrixXcd U;
  Eigen::MatrixXcd V;
};

double real_dot(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return a.cwiseProduct(b.conjugate()).sum().real();
}

/// State of one evaluation: transformed factors, residual, objective.
struct Evaluation {
  Eigen::MatrixXcd P;  // b_rows * U
  Eigen::MatrixXcd Q;  // c_rows * V
  Eigen::VectorXcd r;  // forward(U V^T) - y
  double value = 0.0;

  void compute(const LiftedOperator& op, const FactorPair& x, const Eigen::VectorXcd& y,
               double lambda) {
    P.noalias() = op.b_rows * x.U;
    Q.noalias() = op.c_rows * x.V;
    r = op.convention_constant * P.cwiseProduct(Q).rowwise().sum() - y;
    value = 0.5 * r.squaredNorm() +
            0.5 * lambda * (x.U.squaredNorm() + x.V.squaredNorm());
  }
};

void gradient(const LiftedOperator& op, const FactorPair& x, const Evaluation& ev,
              double lambda, FactorPair& g) {
  const cxd c = op.convention_constant;
  g.U.noalias() = c * (op.b_rows.adjoint() * (ev.r.asDiagonal() * ev.Q.conjugate()));
  g.V.noalias() = c * (op.c_rows.adjoint() * (ev.r.asDiagonal() * ev.P.conjugate()));
  if (lambda != 0.0) {
    g.U += lambda * x.U;
    g.V += lambda * x.V;
  }
}

struct LbfgsMemory {
  std::deque<FactorPair> s, y;
  std::deque<double> rho;
  int cap;

  explicit LbfgsMemory(int capacity) : cap(capacity) {}

  void clear() {
    s.clear();
    y.clear();
    rho.clear();
  }

  void push(FactorPair&& ds, FactorPair&& dy) {
    const double sy = real_dot(ds.U, dy.U) + real_dot(ds.V, dy.V);
    const double ss = ds.U.squaredNorm() + ds.V.squaredNorm();
    const double yy = dy.U.squaredNorm() + dy.V.squaredNorm();
    if (!(sy > 1e-12 * std::sqrt(ss * yy))) return;  // skip non-curvature pairs
    s.push_back(std::move(ds));
    y.push_back(std::move(dy));
    rho.push_back(1.0 / sy);
    if (static_cast<int>(s.size()) > cap) {
      s.pop_front();
      y.pop_front();
      rho.pop_front();
    }
  }

  /// Two-loop recursion; returns the descent direction -H g.
  FactorPair direction(const FactorPair& g) const {
    FactorPair q{g.U, g.V};
    const int n = static_cast<int>(s.size());
    std::vector<double> alpha(n);
    for (int i = n - 1; i >= 0; --i) {
      alpha[i] = rho[i] * (real_dot(s[i].U, q.U) + real_dot(s[i].V, q.V));
      q.U -= alpha[i] * y[i].U;
      q.V -= alpha[i] * y[i].V;
    }
    if (n > 0) {
      const double yy = y[n - 1].U.squaredNorm() + y[n - 1].V.squaredNorm();
      const double gamma = 1.0 / (rho[n - 1] * yy);
      q.U *= gamma;
      q.V *= gamma;
    }
    for (int i = 0; i < n; ++i) {
      const double beta = rho[i] * (real_dot(y[i].U, q.U) + real_dot(y[i].V, q.V));
      q.U += (alpha[i] - beta) * s[i].U;
      q.V += (alpha[i] - beta) * s[i].V;
    }
    q.U = -q.U;
    q.V = -q.V;
    return q;
  }
};

enum class PhaseExit { resid_converged, stationary, iter_cap };

struct PhaseResult {
  PhaseExit exit;
  int iters_used = 0;
};

/// Runs descent at a fixed lambda until a stop fires. x and the bookkeeping
/// evaluation are updated in place.
PhaseResult run_phase(const LiftedOperator& op, const Eigen::VectorXcd& y, FactorPair& x,
                      Evaluation& ev, double lambda, int iter_budget, double stop_resid,
                      double grad_stop, std::vector<double>* trace) {
  LbfgsMemory mem(8);
  FactorPair g, g_next, d;
  gradient(op, x, ev, lambda, g);

  for (int iter = 0; iter < iter_budget; ++iter) {
    if (ev.r.norm() <= stop_resid) return {PhaseExit::resid_converged, iter};
    const double gnorm = std::sqrt(g.U.squaredNorm() + g.V.squaredNorm());
    if (!std::isfinite(gnorm))
      throw SolverDivergedError("recover_matrix: non-finite gradient (iter " +
                                std::to_string(iter) + ")");
    if (gnorm <= grad_stop) return {PhaseExit::stationary, iter};

    d = mem.direction(g);
    double gd = real_dot(g.U, d.U) + real_dot(g.V, d.V);
    if (!(gd < 0)) {  // fall back to steepest descent
      d.U = -g.U;
      d.V = -g.V;
      gd = -gnorm * gnorm;
      mem.clear();
    }

    // The residual is exactly quadratic along the search ray:
    // r(a) = r0 + a*lin + a^2*quad, so candidate objectives cost O(L).
    const Eigen::MatrixXcd dP = op.b_rows * d.U;
    const Eigen::MatrixXcd dQ = op.c_rows * d.V;
    const Eigen::VectorXcd lin =
        op.convention_constant *
        (ev.P.cwiseProduct(dQ) + dP.cwiseProduct(ev.Q)).rowwise().sum();
    const Eigen::VectorXcd quad =
        op.convention_constant * dP.cwiseProduct(dQ).rowwise().sum();
    const double xu_du = real_dot(d.U, x.U) + real_dot(d.V, x.V);
    const double dd = d.U.squaredNorm() + d.V.squaredNorm();

    double alpha = 1.0;
    if (mem.s.empty()) {
      const double xnorm = std::sqrt(x.U.squaredNorm() + x.V.squaredNorm());
      alpha = (gnorm > 0) ? std::max(xnorm, 1e-300) / gnorm : 1.0;
    }
    constexpr double armijo = 1e-4;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      const Eigen::VectorXcd r_try = ev.r + alpha * lin + (alpha * alpha) * quad;
      const double f_try = 0.5 * r_try.squaredNorm() +
                           0.5 * lambda *
                               (x.U.squaredNorm() + x.V.squaredNorm() +
                                2 * alpha * xu_du + alpha * alpha * dd);
      if (std::isfinite(f_try) && f_try <= ev.value + armijo * alpha * gd) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) return {PhaseExit::stationary, iter};

    x.U += alpha * d.U;
    x.V += alpha * d.V;
    ev.P += alpha * dP;
    ev.Q += alpha * dQ;
    ev.r = op.convention_constant * ev.P.cwiseProduct(ev.Q).rowwise().sum() -
           y;  // recompute exactly to avoid drift
    ev.value = 0.5 * ev.r.squaredNorm() +
               0.5 * lambda * (x.U.squaredNorm() + x.V.squaredNorm());
    if (trace) trace->push_back(ev.value);

    gradient(op, x, ev, lambda, g_next);
    mem.push({alpha * d.U, alpha * d.V}, {g_next.U - g.U, g_next.V - g.V});
    g = g_next;
  }
  return {PhaseExit::iter_cap, iter_budget};
}

}  // namespace

ObjectiveValue objective_and_gradient(const LiftedOperator& op, const Eigen::MatrixXcd& U,
                                      const Eigen::MatrixXcd& V, const Eigen::VectorXcd& y_hat,
                                      double lambda) {
  if (U.rows() != op.K() || V.rows() != op.N() || U.cols() != V.cols())
    throw ValidationError("objective_and_gradient: factor shape mismatch");
  if (y_hat.size() != op.L())
    throw ValidationError("objective_and_gradient: measurement length mismatch");
  FactorPair x{U, V};
  Evaluation ev;
  ev.compute(op, x, y_hat, lambda);
  FactorPair g;
  gradient(op, x, ev, lambda, g);
  return {ev.value, std::move(g.U), std::move(g.V)};
}

RecoveredMatrix recover_matrix(const LiftedOperator& op, const Eigen::VectorXcd& y_hat,
                               const SolverOptions& opts, const RngStream& rng) {
  opts.validate();
  if (y_hat.size() != op.L())
    throw ValidationError("recover_matrix: measurement length mismatch");

  const double ynorm = y_hat.norm();
  if (!std::isfinite(ynorm))
    throw SolverDivergedError("recover_matrix: non-finite measurement vector");

  RecoveredMatrix out;
  if (ynorm == 0.0) {
    out.Z_hat = Eigen::MatrixXcd::Zero(op.K(), op.N());
    out.converged = true;
    return out;
  }

  const double lambda = opts.lambda.value_or(1e-8 * ynorm * ynorm);
  const double stop_resid = std::max(opts.resid_tol * ynorm, opts.tau);
  const double grad_stop = opts.grad_tol * std::pow(ynorm, 1.5);
  const double init_scale = std::sqrt(ynorm);

  double best_resid = std::numeric_limits<double>::infinity();
  FactorPair best;
  int best_attempt = 0;

  for (int attempt = 0; attempt < opts.max_restarts; ++attempt) {
    RngStream init_rng = rng.derive("init", static_cast<std::uint64_t>(attempt));
    FactorPair x;
    x.U = detail::complex_gaussian(op.K(), opts.rank, init_rng);
    x.V = detail::complex_gaussian(op.N(), opts.rank, init_rng);
    x.U *= init_scale / x.U.norm();
    x.V *= init_scale / x.V.norm();

    Evaluation ev;
    ev.compute(op, x, y_hat, lambda);
    if (!std::isfinite(ev.value))
      throw SolverDivergedError("recover_matrix: non-finite objective at initialization "
                                "(||y|| = " + std::to_string(ynorm) + ")");

    PhaseResult phase = run_phase(op, y_hat, x, ev, lambda, opts.max_iters, stop_resid,
                                  grad_stop, opts.objective_trace);
    out.iters += phase.iters_used;
    // A zero-penalty polish drives the residual to its floor once the
    // regularized phase has settled.
    if (lambda > 0.0 && phase.exit != PhaseExit::resid_converged &&
        phase.iters_used < opts.max_iters) {
      ev.compute(op, x, y_hat, 0.0);
      PhaseResult polish = run_phase(op, y_hat, x, ev, 0.0, opts.max_iters - phase.iters_used,
                                     stop_resid, grad_stop, opts.objective_trace);
      out.iters += polish.iters_used;
      phase.exit = polish.exit;
    }

    const double resid = ev.r.norm();
    if (resid < best_resid - 1e-14) {
      best_resid = resid;
      best = x;
      best_attempt = attempt;
    }
    if (best_resid <= stop_resid) break;
    const bool stalled =
        phase.exit == PhaseExit::stationary && resid > opts.stall_rel_resid * ynorm;
    if (!stalled) break;
  }

  out.Z_hat = best.U * best.V.transpose();
  out.resid = best_resid;
  out.restarts_used = best_attempt;
  out.converged = best_resid <= std::max(opts.resid_tol * ynorm, opts.tau * (1 + opts.resid_tol));
  return out;
}

}  // namespace sepdemix
