#include "sepdemix/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace sepdemix {

namespace detail {

std::vector<Index> solve_assignment(const Eigen::MatrixXd& cost) {
  const Index n = cost.rows();
  if (cost.cols() != n) throw ConfigError("solve_assignment: cost matrix must be square");
  // Shortest-augmenting-path assignment with potentials (1-based internals).
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Index> way(n + 1, 0), matched_col_to_row(n + 1, 0);
  for (Index i = 1; i <= n; ++i) {
    matched_col_to_row[0] = i;
    Index j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const Index i0 = matched_col_to_row[j0];
      double delta = std::numeric_limits<double>::infinity();
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[matched_col_to_row[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (matched_col_to_row[j0] != 0);
    do {
      const Index j1 = way[j0];
      matched_col_to_row[j0] = matched_col_to_row[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> row_to_col(n);
  for (Index j = 1; j <= n; ++j)
    if (matched_col_to_row[j] != 0) row_to_col[matched_col_to_row[j] - 1] = j - 1;
  return row_to_col;
}

namespace {

double similarity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(a.dot(b)) / (na * nb);
}

}  // namespace

}  // namespace detail

std::vector<Index> match_pairs(const Eigen::MatrixXcd& M_true, const Eigen::MatrixXcd& M_hat) {
  if (M_true.rows() != M_hat.rows() || M_true.cols() != M_hat.cols())
    throw ValidationError("match_pairs: shape mismatch");
  const Index S = M_true.cols();
  Eigen::MatrixXd sim(S, S);
  for (Index s = 0; s < S; ++s)
    for (Index t = 0; t < S; ++t)
      sim(s, t) = detail::similarity(M_true.col(s), M_hat.col(t));

  if (S <= 6) {
    std::vector<Index> perm(S), best(S);
    std::iota(perm.begin(), perm.end(), Index{0});
    best = perm;
    double best_score = -1.0;
    do {
      double score = 0.0;
      for (Index s = 0; s < S; ++s) score += sim(s, perm[s]);
      if (score > best_score) {
        best_score = score;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  return detail::solve_assignment(-sim);
}

ErrorReport aligned_errors(const GroundTruth& truth, const Eigen::MatrixXcd& M_hat,
                           const std::vector<Eigen::MatrixXcd>& H_hat,
                           const std::vector<Index>& perm, double threshold) {
  const Index S = truth.M.cols();
  const Index R = static_cast<Index>(truth.H.size());
  if (static_cast<Index>(perm.size()) != S)
    throw ValidationError("aligned_errors: permutation size mismatch");
  if (static_cast<Index>(H_hat.size()) != R)
    throw ValidationError("aligned_errors: receiver count mismatch");

  ErrorReport report;
  report.threshold = threshold;
  report.permutation = perm;
  report.phases.resize(S);
  report.signal_errors.resize(S);
  report.kernel_errors.resize(R, S);

  for (Index s = 0; s < S; ++s) {
    const Eigen::VectorXcd m_true = truth.M.col(s);
    const Eigen::VectorXcd m_hat = M_hat.col(perm[s]);
    const double ref = m_true.norm();
    if (ref == 0.0) throw ValidationError("aligned_errors: zero-norm true signal column");

    // alpha minimizing ||m_true - alpha m_hat|| over unit-modulus alpha
    const cxd inner = m_hat.dot(m_true);
    const cxd alpha = (std::abs(inner) > 0) ? inner / std::abs(inner) : cxd(1.0, 0.0);
    report.phases[s] = alpha;
    report.signal_errors(s) = (m_true - alpha * m_hat).norm() / ref;

    // the compatible kernel phase keeps every bilinear product invariant
    const cxd alpha_conj = std::conj(alpha);
    for (Index r = 0; r < R; ++r) {
      const Eigen::VectorXcd h_true = truth.H[r].col(s);
      const double href = h_true.norm();
      if (href == 0.0) throw ValidationError("aligned_errors: zero-norm true kernel column");
      report.kernel_errors(r, s) = (h_true - alpha_conj * H_hat[r].col(perm[s])).norm() / href;
    }
  }

  report.max_error = std::max(report.signal_errors.maxCoeff(), report.kernel_errors.maxCoeff());
  report.avg_error = (report.signal_errors.sum() + report.kernel_errors.sum()) /
                     static_cast<double>(S + R * S);
  report.success = report.max_error < threshold;
  return report;
}

}  // namespace sepdemix
