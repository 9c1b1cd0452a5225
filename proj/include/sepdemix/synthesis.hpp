#pragma once

#include <Eigen/Dense>

#include "sepdemix/lifted_operator.hpp"
#include "sepdemix/model.hpp"

namespace sepdemix {

/// Builds the measurements through the time domain: per receiver,
/// y_r = sum_s (C m_s) (*) (B h_rs) + e, then the unitary DFT. Noise is drawn
/// complex Gaussian and rescaled so its Fourier-domain norm equals tau
/// exactly; tau = 0 means no noise term at all.
inline MeasurementSet synthesize_measurements(const CodingMatrices& coding,
                                              const GroundTruth& truth,
                                              const ProblemConfig& cfg,
                                              const RngStream& rng) {
  cfg.validate();
  if (truth.M.rows() != cfg.N || truth.M.cols() != cfg.S ||
      static_cast<Index>(truth.H.size()) != cfg.R)
    throw ValidationError("synthesize_measurements: ground truth shape mismatch");

  MeasurementSet set;
  set.y_hat.reserve(cfg.R);
  set.y_time.emplace();
  set.y_time->reserve(cfg.R);
  set.noise_norm = Eigen::VectorXd::Zero(cfg.R);

  for (Index r = 0; r < cfg.R; ++r) {
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(cfg.L);
    for (Index s = 0; s < cfg.S; ++s) {
      const Eigen::VectorXcd x = coding.C * truth.M.col(s);
      const Eigen::VectorXcd w = coding.B * truth.H[r].col(s);
      y += circular_convolve(x, w);
    }
    if (cfg.tau > 0.0) {
      RngStream rn = rng.derive("noise", static_cast<std::uint64_t>(r));
      Eigen::VectorXcd e(cfg.L);
      for (Index l = 0; l < cfg.L; ++l) e(l) = rn.cnormal();
      e *= cfg.tau / e.norm();  // unitary DFT preserves the norm
      y += e;
      set.noise_norm(r) = e.norm();
    }
    set.y_time->push_back(y);
    set.y_hat.push_back(dft_unitary(y));
  }
  return set;
}

/// Kernel-side coherence: (L/K) times the largest squared row norm of the
/// unitary-DFT image of B. Always in [1, L/K] for orthonormal B; equals 1
/// for the standard-basis kernel subspace.
inline double compute_coherence(const CodingMatrices& coding) {
  const Index L = coding.B.rows();
  const Index K = coding.B.cols();
  const double ortho_defect =
      (coding.B.adjoint() * coding.B - Eigen::MatrixXcd::Identity(K, K))
          .cwiseAbs()
          .maxCoeff();
  if (ortho_defect > 1e-10)
    throw ValidationError("compute_coherence: kernel basis columns not orthonormal");
  Eigen::MatrixXcd transformed(L, K);
  for (Index j = 0; j < K; ++j) transformed.col(j) = dft_unitary(coding.B.col(j));
  const double max_row_sq = transformed.rowwise().squaredNorm().maxCoeff();
  return static_cast<double>(L) / static_cast<double>(K) * max_row_sq;
}

}  // namespace sepdemix
