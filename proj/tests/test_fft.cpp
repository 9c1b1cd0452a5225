#include <doctest.h>

#include <Eigen/Dense>

#include "sepdemix/fft.hpp"
#include "sepdemix/lifted_operator.hpp"
#include "sepdemix/rng.hpp"

using namespace sepdemix;

namespace {

Eigen::VectorXcd random_vector(Index n, RngStream& rng) {
  Eigen::VectorXcd v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.cnormal();
  return v;
}

}  // namespace

TEST_CASE("fast transform matches the quadratic-time oracle") {
  RngStream rng(101);
  for (Index n : {2, 8, 12, 31, 64, 100, 257, 330}) {
    const Eigen::VectorXcd x = random_vector(n, rng);
    const Eigen::VectorXcd fast = dft_unitary(x);
    const Eigen::VectorXcd slow = naive_dft_unitary(x);
    CHECK((fast - slow).norm() / slow.norm() < 1e-12);

    const Eigen::VectorXcd back = idft_unitary(fast);
    CHECK((back - x).norm() / x.norm() < 1e-12);
  }
}

TEST_CASE("unitary transform preserves norms") {
  RngStream rng(55);
  for (Index n : {16, 60, 257}) {
    const Eigen::VectorXcd x = random_vector(n, rng);
    CHECK(std::abs(dft_unitary(x).norm() - x.norm()) < 1e-12 * x.norm());
  }
}

TEST_CASE("convolution identity and shift") {
  RngStream rng(7);
  const Index n = 24;
  const Eigen::VectorXcd x = random_vector(n, rng);

  Eigen::VectorXcd delta = Eigen::VectorXcd::Zero(n);
  delta(0) = 1.0;
  CHECK((circular_convolve(x, delta) - x).norm() < 1e-14);

  Eigen::VectorXcd shifted_delta = Eigen::VectorXcd::Zero(n);
  const Index j = 5;
  shifted_delta(j) = 1.0;
  const Eigen::VectorXcd shifted = circular_convolve(x, shifted_delta);
  for (Index i = 0; i < n; ++i) CHECK(std::abs(shifted((i + j) % n) - x(i)) < 1e-14);
}

TEST_CASE("fft path equals the direct sum") {
  RngStream rng(13);
  for (Index n : {16, 45, 128}) {
    const Eigen::VectorXcd x = random_vector(n, rng);
    const Eigen::VectorXcd w = random_vector(n, rng);
    // direct_threshold above/below n exercises both paths
    const Eigen::VectorXcd direct = circular_convolve(x, w, /*direct_threshold=*/1024);
    const Eigen::VectorXcd fast = circular_convolve(x, w, /*direct_threshold=*/0);
    CHECK((direct - fast).norm() / direct.norm() < 1e-12);
  }
}

TEST_CASE("convolution theorem under the unitary scaling") {
  // dft(x conv w) = sqrt(L) dft(x) .* dft(w)
  RngStream rng(99);
  const Index n = 40;
  const Eigen::VectorXcd x = random_vector(n, rng);
  const Eigen::VectorXcd w = random_vector(n, rng);
  const Eigen::VectorXcd lhs = dft_unitary(circular_convolve(x, w));
  const Eigen::VectorXcd rhs =
      std::sqrt(double(n)) * dft_unitary(x).cwiseProduct(dft_unitary(w));
  CHECK((lhs - rhs).norm() / rhs.norm() < 1e-12);
}

TEST_CASE("length mismatch is rejected") {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(4), b = Eigen::VectorXcd::Zero(5);
  CHECK_THROWS_AS(circular_convolve(a, b), ValidationError);
}
