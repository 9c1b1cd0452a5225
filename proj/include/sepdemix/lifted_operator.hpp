#pragma once

#include <Eigen/Dense>

#include "sepdemix/fft.hpp"
#include "sepdemix/model.hpp"
#include "sepdemix/types.hpp"

namespace sepdemix {

/// Cyclic convolution (x (*) w)(n) = sum_k x(k) w((n-k) mod L).
/// Direct sum for short vectors, FFT above the threshold; the two paths agree
/// to roundoff and the direct path doubles as the oracle in tests.
template <typename DerivedX, typename DerivedW>
Vector<typename DerivedX::Scalar> circular_convolve(const Eigen::MatrixBase<DerivedX>& x,
                                                    const Eigen::MatrixBase<DerivedW>& w,
                                                    Index direct_threshold = 32) {
  using C = typename DerivedX::Scalar;
  using Real = typename C::value_type;
  const Index n = x.size();
  if (w.size() != n) throw ValidationError("circular_convolve: length mismatch");
  if (n == 0) return Vector<C>();
  if (n <= direct_threshold) {
    Vector<C> out = Vector<C>::Zero(n);
    for (Index i = 0; i < n; ++i) {
      const C xi = x(i);
      for (Index k = 0; k < n; ++k) {
        Index j = i + k;
        if (j >= n) j -= n;
        out(j) += xi * w(k);
      }
    }
    return out;
  }
  Vector<C> fx = x;
  Vector<C> fw = w;
  fft_unscaled(fx.data(), static_cast<std::size_t>(n), false);
  fft_unscaled(fw.data(), static_cast<std::size_t>(n), false);
  fx.array() *= fw.array();
  fft_unscaled(fx.data(), static_cast<std::size_t>(n), true);
  fx *= Real(1) / Real(n);
  return fx;
}

/// The linear map taking a K x N lifted matrix to its L Fourier-domain
/// measurements. Row l pairs the kernel-side row b(l) with the signal-side
/// row c(l): forward(Z)(l) = convention_constant * b(l)^T Z c(l).
///
/// The rows are the unitary-DFT images of the coding matrices and the
/// constant is sqrt(L); with this convention forward(lift(m, h)) equals
/// the unitary DFT of the cyclic convolution of Cm and Bh exactly.
template <typename Real>
struct LiftedOperatorT {
  using C = std::complex<Real>;
  Matrix<C> b_rows;        // L x K, row l = transformed kernel basis row
  Matrix<C> c_rows;        // L x N, row l = transformed signal basis row
  C convention_constant;   // scale folding the DFT normalization, sqrt(L)

  Index L() const { return b_rows.rows(); }
  Index K() const { return b_rows.cols(); }
  Index N() const { return c_rows.cols(); }
};

using LiftedOperator = LiftedOperatorT<double>;

inline LiftedOperator build_lifted_operator(const CodingMatrices& coding) {
  LiftedOperator op;
  const Index L = coding.B.rows();
  op.b_rows.resize(L, coding.B.cols());
  op.c_rows.resize(L, coding.C.cols());
  for (Index j = 0; j < coding.B.cols(); ++j) op.b_rows.col(j) = dft_unitary(coding.B.col(j));
  for (Index j = 0; j < coding.C.cols(); ++j) op.c_rows.col(j) = dft_unitary(coding.C.col(j));
  op.convention_constant = std::sqrt(static_cast<double>(L));
  return op;
}

/// Rank-1 lifting of a signal/kernel coefficient pair: h m^T (K x N).
template <typename DerivedM, typename DerivedH>
Matrix<typename DerivedM::Scalar> lift(const Eigen::MatrixBase<DerivedM>& m,
                                       const Eigen::MatrixBase<DerivedH>& h) {
  return h * m.transpose();
}

/// Rank-S lifting of column-paired coefficients: H M^T = sum_s h_s m_s^T.
template <typename DerivedM, typename DerivedH>
Matrix<typename DerivedM::Scalar> lift_pairs(const Eigen::MatrixBase<DerivedM>& M,
                                             const Eigen::MatrixBase<DerivedH>& H) {
  if (M.cols() != H.cols()) throw ValidationError("lift_pairs: column count mismatch");
  return H * M.transpose();
}

/// forward(Z)(l) = c * b(l)^T Z c(l), evaluated as one matrix product plus
/// row-wise contractions.
template <typename Real, typename Derived>
Vector<std::complex<Real>> forward(const LiftedOperatorT<Real>& op,
                                   const Eigen::MatrixBase<Derived>& Z) {
  if (Z.rows() != op.K() || Z.cols() != op.N())
    throw ValidationError("forward: lifted matrix has wrong shape");
  return op.convention_constant *
         ((op.b_rows * Z).cwiseProduct(op.c_rows)).rowwise().sum();
}

/// forward(U V^T) without materializing the K x N product; O(L S (K + N)).
template <typename Real, typename DerivedU, typename DerivedV>
Vector<std::complex<Real>> forward_factored(const LiftedOperatorT<Real>& op,
                                            const Eigen::MatrixBase<DerivedU>& U,
                                            const Eigen::MatrixBase<DerivedV>& V) {
  if (U.rows() != op.K() || V.rows() != op.N() || U.cols() != V.cols())
    throw ValidationError("forward_factored: factor shape mismatch");
  return op.convention_constant *
         ((op.b_rows * U).cwiseProduct(op.c_rows * V)).rowwise().sum();
}

/// Adjoint under the standard inner products: <forward(Z), y> = <Z, adjoint(y)>.
template <typename Real, typename Derived>
Matrix<std::complex<Real>> adjoint(const LiftedOperatorT<Real>& op,
                                   const Eigen::MatrixBase<Derived>& y) {
  if (y.size() != op.L()) throw ValidationError("adjoint: measurement length mismatch");
  return std::conj(op.convention_constant) *
         (op.b_rows.adjoint() * (y.asDiagonal() * op.c_rows.conjugate()));
}

}  // namespace sepdemix
