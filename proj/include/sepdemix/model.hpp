#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "sepdemix/rng.hpp"
#include "sepdemix/types.hpp"

namespace sepdemix {

enum class ConstraintMode { one_sided, two_sided };

inline std::string to_string(ConstraintMode mode) {
  return mode == ConstraintMode::one_sided ? "one_sided" : "two_sided";
}

inline ConstraintMode constraint_mode_from_string(const std::string& s) {
  if (s == "one_sided") return ConstraintMode::one_sided;
  if (s == "two_sided") return ConstraintMode::two_sided;
  throw ConfigError("unknown constraint mode: " + s);
}

/// One experiment cell: signal length L, kernel/signal subspace dimensions
/// K and N, source count S, receiver count R, noise bound tau, constraint
/// mode and RNG seed.
struct ProblemConfig {
  Index L = 0;
  Index K = 0;
  Index N = 0;
  Index S = 0;
  Index R = 0;
  double tau = 0.0;
  ConstraintMode mode = ConstraintMode::two_sided;
  std::uint64_t seed = 0;
  /// Kernel basis: first-K standard basis columns by default; Haar-random
  /// orthonormal columns when set (for coherence studies).
  bool random_kernel_basis = false;

  /// Throws ConfigError on hard violations; returns human-readable warnings
  /// for accepted-but-fragile setups.
  std::vector<std::string> validate() const {
    if (L < 1) throw ConfigError("L must be positive");
    if (K < 1 || K > L) throw ConfigError("require 1 <= K <= L");
    if (N < 1 || N > L) throw ConfigError("require 1 <= N <= L");
    if (S < 1 || S > std::min(K, N)) throw ConfigError("require 1 <= S <= min(K, N)");
    if (R < 1) throw ConfigError("R must be positive");
    if (tau < 0.0) throw ConfigError("tau must be nonnegative");
    if (mode == ConstraintMode::two_sided && R < S)
      throw ConfigError("two-sided constraints need R >= S");
    std::vector<std::string> warnings;
    if (mode == ConstraintMode::one_sided && R < S + 1)
      warnings.push_back("one-sided constraints with R < S+1: transform system is "
                         "under-constrained; expect ambiguous solutions");
    return warnings;
  }

  bool low_receiver_count() const {
    return mode == ConstraintMode::one_sided && R < S + 1;
  }
};

/// Shared subspace bases: B spans the kernels (orthonormal columns),
/// C spans the signals (i.i.d. circular complex Gaussian entries).
struct CodingMatrices {
  Eigen::MatrixXcd B;  // L x K
  Eigen::MatrixXcd C;  // L x N
};

/// Coefficients behind the measurements: signal matrix M (N x S, shared by
/// all receivers) and per-receiver kernel matrices H[r] (K x S).
struct GroundTruth {
  Eigen::MatrixXcd M;
  std::vector<Eigen::MatrixXcd> H;
};

/// Per-receiver Fourier-domain measurements, with the time-domain vectors
/// retained so they can serve as an independent oracle.
struct MeasurementSet {
  std::vector<Eigen::VectorXcd> y_hat;
  std::optional<std::vector<Eigen::VectorXcd>> y_time;
  Eigen::VectorXd noise_norm;  // realized Fourier-domain noise norm per receiver
};

namespace detail {

inline Eigen::MatrixXcd complex_gaussian(Index rows, Index cols, RngStream& rng) {
  Eigen::MatrixXcd out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = rng.cnormal();
  return out;
}

/// Haar-distributed orthonormal columns: QR of a Gaussian matrix with the
/// R-diagonal phases absorbed into Q.
inline Eigen::MatrixXcd haar_orthonormal(Index rows, Index cols, RngStream& rng) {
  Eigen::MatrixXcd g = complex_gaussian(rows, cols, rng);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(rows, cols);
  Eigen::MatrixXcd r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Index j = 0; j < cols; ++j) {
    const cxd d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0) q.col(j) *= std::conj(d) / mag;
  }
  return q;
}

}  // namespace detail

/// Draws the shared coding matrices. Deterministic given (cfg, rng).
inline CodingMatrices generate_coding(const ProblemConfig& cfg, const RngStream& rng) {
  cfg.validate();
  CodingMatrices coding;
  if (cfg.random_kernel_basis) {
    RngStream rb = rng.derive("coding.B");
    coding.B = detail::haar_orthonormal(cfg.L, cfg.K, rb);
  } else {
    coding.B = Eigen::MatrixXcd::Zero(cfg.L, cfg.K);
    for (Index k = 0; k < cfg.K; ++k) coding.B(k, k) = 1.0;
  }
  RngStream rc = rng.derive("coding.C");
  coding.C = detail::complex_gaussian(cfg.L, cfg.N, rc);
  return coding;
}

/// Draws M and H[r], normalizing kernel columns always and signal columns
/// in two-sided mode.
inline GroundTruth generate_ground_truth(const ProblemConfig& cfg, const RngStream& rng) {
  cfg.validate();
  GroundTruth truth;
  RngStream rm = rng.derive("truth.M");
  truth.M = detail::complex_gaussian(cfg.N, cfg.S, rm);
  if (cfg.mode == ConstraintMode::two_sided)
    for (Index s = 0; s < cfg.S; ++s) truth.M.col(s).normalize();
  truth.H.reserve(cfg.R);
  for (Index r = 0; r < cfg.R; ++r) {
    RngStream rh = rng.derive("truth.H", static_cast<std::uint64_t>(r));
    Eigen::MatrixXcd h = detail::complex_gaussian(cfg.K, cfg.S, rh);
    for (Index s = 0; s < cfg.S; ++s) h.col(s).normalize();
    truth.H.push_back(std::move(h));
  }
  return truth;
}

}  // namespace sepdemix
