#include "sepdemix/vector_recovery.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "sepdemix/model.hpp"

namespace sepdemix {

namespace detail {

Eigen::MatrixXcd inverse_transpose(const Eigen::MatrixXcd& T, bool& ok) {
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(T.transpose());
  ok = lu.isInvertible() && std::isfinite(std::abs(lu.rcond())) && lu.rcond() > 1e-14;
  if (!ok) return Eigen::MatrixXcd();
  return lu.solve(Eigen::MatrixXcd::Identity(T.rows(), T.cols()));
}

Eigen::VectorXd pack_transform(const Eigen::MatrixXcd& T) {
  const Index n = T.size();
  Eigen::VectorXd x(2 * n);
  const cxd* data = T.data();
  for (Index i = 0; i < n; ++i) {
    x(2 * i) = data[i].real();
    x(2 * i + 1) = data[i].imag();
  }
  return x;
}

Eigen::MatrixXcd unpack_transform(const Eigen::VectorXd& x, Index S) {
  Eigen::MatrixXcd T(S, S);
  cxd* data = T.data();
  for (Index i = 0; i < S * S; ++i) data[i] = cxd(x(2 * i), x(2 * i + 1));
  return T;
}

namespace {
constexpr double kSentinel = 1e6;
}

}  // namespace detail

FactoredReceiver factorize_rank_s(const Eigen::MatrixXcd& Z, Index S, double rank_gap_tol) {
  if (!Z.allFinite()) throw ValidationError("factorize_rank_s: non-finite input");
  if (S < 1 || S > std::min(Z.rows(), Z.cols()))
    throw ConfigError("factorize_rank_s: invalid rank");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv(0) <= 0.0 || sv(S - 1) / sv(0) <= rank_gap_tol)
    throw RankDeficientError("factorize_rank_s: singular value " + std::to_string(S) +
                             " collapsed (ratio " +
                             std::to_string(sv(0) > 0 ? sv(S - 1) / sv(0) : 0.0) + ")");
  FactoredReceiver f;
  f.sigma = sv.head(S);
  const Eigen::VectorXd scale = f.sigma.cwiseSqrt();
  f.H_tilde = svd.matrixU().leftCols(S) * scale.asDiagonal();
  f.M_tilde = svd.matrixV().leftCols(S).conjugate() * scale.asDiagonal();
  return f;
}

std::pair<std::vector<Eigen::MatrixXcd>, std::vector<Eigen::MatrixXcd>> cross_transforms(
    const std::vector<FactoredReceiver>& factored, Index r0) {
  if (factored.empty()) throw ConfigError("cross_transforms: no receivers");
  if (r0 < 0 || r0 >= static_cast<Index>(factored.size()))
    throw ConfigError("cross_transforms: reference receiver out of range");
  const Index S = factored[r0].M_tilde.cols();
  for (const auto& f : factored)
    if (f.M_tilde.cols() != S)
      throw ConfigError("cross_transforms: inconsistent factorization ranks");

  // pinv(M_tilde[r0]) = sigma^{-1} M_tilde[r0]^*, using the orthogonality of
  // the SVD columns.
  const Eigen::VectorXd& sigma = factored[r0].sigma;
  if (!(sigma.minCoeff() > 0) || !sigma.allFinite())
    throw DegenerateFactorizationError("cross_transforms: reference receiver factor is singular");
  const Eigen::MatrixXcd pinv =
      sigma.cwiseInverse().asDiagonal() * factored[r0].M_tilde.adjoint();

  std::vector<Eigen::MatrixXcd> T_cross, G;
  T_cross.reserve(factored.size());
  G.reserve(factored.size());
  for (std::size_t r = 0; r < factored.size(); ++r) {
    Eigen::MatrixXcd t = pinv * factored[r].M_tilde;
    if (static_cast<Index>(r) == r0) t = Eigen::MatrixXcd::Identity(S, S);
    G.push_back(factored[r].H_tilde * t.transpose());
    T_cross.push_back(std::move(t));
  }
  return {std::move(T_cross), std::move(G)};
}

namespace {

Eigen::VectorXd kernel_residuals(const Eigen::MatrixXcd& W,
                                 const std::vector<Eigen::MatrixXcd>& G) {
  const Index S = W.cols();
  const Index R = static_cast<Index>(G.size());
  Eigen::VectorXd res(R * S);
  for (Index r = 0; r < R; ++r)
    res.segment(r * S, S) = (G[r] * W).colwise().squaredNorm().array() - 1.0;
  return res;
}

}  // namespace

Eigen::VectorXd residuals_one_sided(const Eigen::MatrixXcd& T,
                                    const std::vector<Eigen::MatrixXcd>& G) {
  bool ok = false;
  const Eigen::MatrixXcd W = detail::inverse_transpose(T, ok);
  if (!ok)
    return Eigen::VectorXd::Constant(static_cast<Index>(G.size()) * T.rows(),
                                     detail::kSentinel);
  return kernel_residuals(W, G);
}

Eigen::VectorXd residuals_two_sided(const Eigen::MatrixXcd& T,
                                    const Eigen::MatrixXcd& M_tilde_r0,
                                    const std::vector<Eigen::MatrixXcd>& G) {
  const Index S = T.rows();
  const Index R = static_cast<Index>(G.size());
  bool ok = false;
  const Eigen::MatrixXcd W = detail::inverse_transpose(T, ok);
  if (!ok) return Eigen::VectorXd::Constant(S + R * S, detail::kSentinel);
  Eigen::VectorXd res(S + R * S);
  res.head(S) = (M_tilde_r0 * T).colwise().squaredNorm().array() - 1.0;
  res.tail(R * S) = kernel_residuals(W, G);
  return res;
}

TransformSolution solve_transform(const TransformResidualFn& residual_fn, Index S,
                                  const TransformSolverOptions& opts, const RngStream& rng) {
  if (S < 1) throw ConfigError("solve_transform: S must be positive");
  if (opts.max_restarts < 1) throw ConfigError("solve_transform: max_restarts must be >= 1");

  const auto real_fn = [&](const Eigen::VectorXd& x) {
    return residual_fn(detail::unpack_transform(x, S));
  };

  DoglegOptions dopts;
  dopts.resid_tol = opts.resid_tol;
  dopts.max_iters = opts.max_iters;
  dopts.fd_step = opts.fd_step;
  dopts.initial_radius = opts.initial_radius;

  TransformSolution best;
  best.resid_norm = std::numeric_limits<double>::infinity();
  bool have_best = false;
  int converged_count = 0;

  for (int attempt = 0; attempt < opts.max_restarts; ++attempt) {
    RngStream init_rng = rng.derive("start", static_cast<std::uint64_t>(attempt));
    Eigen::MatrixXcd T0 = detail::complex_gaussian(S, S, init_rng);
    for (Index s = 0; s < S; ++s) T0.col(s).normalize();

    const DoglegResult dl = dogleg_solve(real_fn, detail::pack_transform(T0), dopts);

    TransformSolution sol;
    sol.T = detail::unpack_transform(dl.x, S);
    sol.resid_norm = dl.resid_norm;
    sol.converged = dl.converged;
    sol.restarts_used = attempt;
    {
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sol.T);
      const Eigen::VectorXd sv = svd.singularValues();
      sol.condition = (sv(S - 1) > 0) ? sv(0) / sv(S - 1)
                                      : std::numeric_limits<double>::infinity();
    }
    if (sol.converged) ++converged_count;

    // First accepted root wins outright.
    if (sol.converged && (!opts.accept || opts.accept(sol))) {
      sol.accepted = true;
      sol.converged_count = converged_count;
      return sol;
    }

    // Otherwise keep the best by (converged, residual); ties keep the earlier.
    const bool better = !have_best ||
                        (sol.converged && !best.converged) ||
                        (sol.converged == best.converged &&
                         sol.resid_norm < best.resid_norm - 1e-16);
    if (better) {
      best = sol;
      have_best = true;
    }
  }
  best.converged_count = converged_count;
  return best;
}

std::pair<Eigen::MatrixXcd, std::vector<Eigen::MatrixXcd>> reconstruct_vectors(
    const FactoredReceiver& factored_r0, const std::vector<Eigen::MatrixXcd>& G,
    const Eigen::MatrixXcd& T) {
  bool ok = false;
  const Eigen::MatrixXcd W = detail::inverse_transpose(T, ok);
  if (!ok) throw ReconstructionError("reconstruct_vectors: transform is numerically singular");
  Eigen::MatrixXcd M_hat = factored_r0.M_tilde * T;
  std::vector<Eigen::MatrixXcd> H_hat;
  H_hat.reserve(G.size());
  for (const auto& g : G) H_hat.push_back(g * W);
  return {std::move(M_hat), std::move(H_hat)};
}

}  // namespace sepdemix
