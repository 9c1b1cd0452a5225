#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sepdemix/dogleg.hpp"
#include "sepdemix/rng.hpp"
#include "sepdemix/types.hpp"

namespace sepdemix {

/// Scaled SVD factors of one receiver's recovered matrix Z = H_tilde M_tilde^T,
/// with M_tilde = conj(V) sqrt(Sigma) and H_tilde = U sqrt(Sigma). M_tilde has
/// orthogonal columns; M_tilde^* M_tilde = diag(sigma).
struct FactoredReceiver {
  Eigen::MatrixXcd M_tilde;  // N x S signal-side factor
  Eigen::MatrixXcd H_tilde;  // K x S kernel-side factor
  Eigen::VectorXd sigma;     // leading singular values, descending
};

struct TransformSolution {
  Eigen::MatrixXcd T;        // S x S basis transform
  double resid_norm = 0.0;
  int restarts_used = 0;
  bool converged = false;
  bool accepted = false;     // converged and passed the caller's acceptance hook
  int converged_count = 0;   // how many starts reached a root
  double condition = 0.0;    // spectral condition number of T
};

struct TransformSolverOptions {
  double resid_tol = 1e-8;
  int max_iters = 300;
  int max_restarts = 20;     // total random starts
  double fd_step = 1e-7;
  double initial_radius = 1.0;
  /// Optional vetting of converged roots (e.g. against ground truth in
  /// harness mode). A converged root failing this hook triggers another
  /// restart; the best converged root is still returned.
  std::function<bool(const TransformSolution&)> accept;
};

using TransformResidualFn = std::function<Eigen::VectorXd(const Eigen::MatrixXcd&)>;

/// Truncated rank-S factorization of a recovered lifted matrix. Throws
/// RankDeficientError when the trailing retained singular value collapses
/// relative to the leading one.
FactoredReceiver factorize_rank_s(const Eigen::MatrixXcd& Z, Index S,
                                  double rank_gap_tol = 1e-6);

/// For each receiver, the signal-side change of basis relative to the
/// reference receiver r0 and the transform-absorbed kernel factor:
///   T_cross[r] = pinv(M_tilde[r0]) * M_tilde[r],
///   G[r]       = H_tilde[r] * T_cross[r]^T.
/// T_cross[r0] is the identity and G[r0] = H_tilde[r0].
std::pair<std::vector<Eigen::MatrixXcd>, std::vector<Eigen::MatrixXcd>> cross_transforms(
    const std::vector<FactoredReceiver>& factored, Index r0);

/// Kernel-normalization residuals, one per (receiver, source):
///   || column_s(G[r] T^{-T}) ||^2 - 1.
/// Near-singular T yields a constant large sentinel so the solver can back off.
Eigen::VectorXd residuals_one_sided(const Eigen::MatrixXcd& T,
                                    const std::vector<Eigen::MatrixXcd>& G);

/// Signal-normalization residuals (S entries, || M_tilde[r0] t_s ||^2 - 1)
/// followed by the kernel residuals of the one-sided system.
Eigen::VectorXd residuals_two_sided(const Eigen::MatrixXcd& T,
                                    const Eigen::MatrixXcd& M_tilde_r0,
                                    const std::vector<Eigen::MatrixXcd>& G);

/// Solves residual_fn(T) = 0 over the 2 S^2 real coordinates of T by
/// trust-region dogleg with a forward-difference Jacobian, restarting from
/// fresh unit-column complex Gaussian initializations until a root converges
/// (and is accepted) or the restart cap is hit.
TransformSolution solve_transform(const TransformResidualFn& residual_fn, Index S,
                                  const TransformSolverOptions& opts, const RngStream& rng);

/// Applies a basis transform: M_hat = M_tilde[r0] T, H_hat[r] = G[r] T^{-T}.
/// The per-receiver bilinear products are invariant in T, so correctness of
/// the transform is entirely the residual system's concern.
std::pair<Eigen::MatrixXcd, std::vector<Eigen::MatrixXcd>> reconstruct_vectors(
    const FactoredReceiver& factored_r0, const std::vector<Eigen::MatrixXcd>& G,
    const Eigen::MatrixXcd& T);

namespace detail {
/// T^{-T} with a condition guard; ok=false means T is numerically singular.
Eigen::MatrixXcd inverse_transpose(const Eigen::MatrixXcd& T, bool& ok);
/// Packs the real/imaginary parts of T into a real vector (column-major).
Eigen::VectorXd pack_transform(const Eigen::MatrixXcd& T);
Eigen::MatrixXcd unpack_transform(const Eigen::VectorXd& x, Index S);
}  // namespace detail

}  // namespace sepdemix
