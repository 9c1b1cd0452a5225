#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sepdemix/lifted_operator.hpp"
#include "sepdemix/rng.hpp"
#include "sepdemix/types.hpp"

namespace sepdemix {

struct SolverOptions {
  Index rank = 1;                  // factorization rank; set to the source count S
  std::optional<double> lambda;    // balance regularization; default 1e-8 * ||y||^2
  int max_iters = 2000;            // iteration cap per initialization
  double grad_tol = 1e-10;         // gradient stop, scaled by ||y||^(3/2)
  double resid_tol = 1e-10;        // residual stop, relative to ||y||
  int max_restarts = 5;            // fresh initializations on stall
  double tau = 0.0;                // noise bound; stopping accepts resid <= tau
  int memory = 8;                  // quasi-Newton history length
  double stall_rel_resid = 1e-5;   // stationary above this relative residual => restart
  std::vector<double>* objective_trace = nullptr;  // optional per-step objective log

  void validate() const {
    if (rank < 1) throw ConfigError("SolverOptions: rank must be >= 1");
    if (grad_tol <= 0 || resid_tol <= 0) throw ConfigError("SolverOptions: tolerances must be positive");
    if (max_iters < 1 || max_restarts < 1) throw ConfigError("SolverOptions: iteration/restart caps must be >= 1");
    if (lambda && *lambda < 0) throw ConfigError("SolverOptions: lambda must be nonnegative");
    if (tau < 0) throw ConfigError("SolverOptions: tau must be nonnegative");
  }
};

struct RecoveredMatrix {
  Eigen::MatrixXcd Z_hat;
  double resid = 0.0;       // final ||forward(Z_hat) - y||_2
  int iters = 0;            // total iterations across restarts
  int restarts_used = 0;
  bool converged = false;
};

/// Factored least-squares objective
///   f(U, V) = 1/2 ||forward(U V^T) - y||^2 + lambda/2 (||U||_F^2 + ||V||_F^2)
/// with gradients taken along the real/imaginary coordinates, so that the
/// directional derivative along any complex direction E is Re<E, grad>.
struct ObjectiveValue {
  double value;
  Eigen::MatrixXcd gradU;
  Eigen::MatrixXcd gradV;
};

ObjectiveValue objective_and_gradient(const LiftedOperator& op, const Eigen::MatrixXcd& U,
                                      const Eigen::MatrixXcd& V, const Eigen::VectorXcd& y_hat,
                                      double lambda);

/// Recovers a rank-constrained lifted matrix from its measurements by
/// quasi-Newton descent on the factored objective, with backtracking line
/// search and random restarts on stalls. Deterministic per (inputs, rng).
RecoveredMatrix recover_matrix(const LiftedOperator& op, const Eigen::VectorXcd& y_hat,
                               const SolverOptions& opts, const RngStream& rng);

}  // namespace sepdemix
