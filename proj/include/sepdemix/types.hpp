#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace sepdemix {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;
using cxd = std::complex<double>;

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid problem dimensions or options.
struct ConfigError : Error {
  using Error::Error;
};

/// An input violated a documented precondition (e.g. non-orthonormal basis).
struct ValidationError : Error {
  using Error::Error;
};

/// The factored least-squares solver produced a non-finite objective.
struct SolverDivergedError : Error {
  using Error::Error;
};

/// A recovered matrix has numerical rank below the requested factorization rank.
struct RankDeficientError : Error {
  using Error::Error;
};

/// Cross-receiver factor alignment hit a singular signal-side Gram matrix.
struct DegenerateFactorizationError : Error {
  using Error::Error;
};

/// Vector reconstruction was asked to apply a singular transform.
struct ReconstructionError : Error {
  using Error::Error;
};

template <typename DerivedA, typename DerivedB>
double relative_error(const Eigen::MatrixBase<DerivedA>& estimate,
                      const Eigen::MatrixBase<DerivedB>& reference) {
  const double ref = reference.norm();
  if (ref == 0.0) return estimate.norm() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return (estimate - reference).norm() / ref;
}

}  // namespace sepdemix
