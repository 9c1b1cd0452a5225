#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sepdemix/model.hpp"
#include "sepdemix/types.hpp"

namespace sepdemix {

/// Per-vector relative errors after resolving the permutation and per-pair
/// phase ambiguities. success is the strict per-vector criterion: every
/// signal and kernel error below the threshold.
struct ErrorReport {
  std::vector<Index> permutation;  // recovered column matched to true column s
  std::vector<cxd> phases;         // unit-modulus per-pair alignment
  Eigen::VectorXd signal_errors;   // S
  Eigen::MatrixXd kernel_errors;   // R x S
  double max_error = 0.0;
  double avg_error = 0.0;
  bool success = false;
  double threshold = 1e-3;
};

/// Matches recovered signal columns to true ones, maximizing the sum of
/// normalized inner-product magnitudes. Exhaustive for S <= 6, assignment
/// solver beyond.
std::vector<Index> match_pairs(const Eigen::MatrixXcd& M_true, const Eigen::MatrixXcd& M_hat);

/// Aligns each matched pair by the closed-form optimal unit phase (applied
/// conjugately to the kernels so the bilinear products are untouched) and
/// computes relative errors per vector.
ErrorReport aligned_errors(const GroundTruth& truth, const Eigen::MatrixXcd& M_hat,
                           const std::vector<Eigen::MatrixXcd>& H_hat,
                           const std::vector<Index>& perm, double threshold = 1e-3);

inline bool is_success(const ErrorReport& report, double threshold = 1e-3) {
  return report.max_error < threshold;
}

namespace detail {
/// Minimum-cost assignment on a square cost matrix; returns for each row the
/// assigned column. O(n^3) shortest augmenting path.
std::vector<Index> solve_assignment(const Eigen::MatrixXd& cost);
}  // namespace detail

}  // namespace sepdemix
