#include <doctest.h>

#include <Eigen/Dense>

#include "mr/errors.hpp"
#include "mr/linalg.hpp"
#include "mr/random.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("jacobi diagonalizes a known 2x2") {
  MatrixXd A(2, 2);
  A << 2, 1, 1, 2;  // eigenvalues 1 and 3
  const auto eig = mr::jacobi_eigendecomposition(A);
  CHECK(eig.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("jacobi reconstruction and orthogonality on random symmetric matrices") {
  mr::Rng rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = static_cast<int>(rng.integer(2, 24));
    MatrixXd G(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) G(i, j) = rng.normal();
    const MatrixXd A = 0.5 * (G + G.transpose());
    const auto eig = mr::jacobi_eigendecomposition(A);
    const MatrixXd& V = eig.eigenvectors;
    CHECK((V.transpose() * V - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    const MatrixXd R = V * eig.eigenvalues.asDiagonal() * V.transpose();
    CHECK((R - A).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, A.cwiseAbs().maxCoeff()));
    for (int i = 0; i + 1 < n; ++i) CHECK(eig.eigenvalues[i] <= eig.eigenvalues[i + 1]);
  }
}

TEST_CASE("jacobi rejects asymmetric input") {
  MatrixXd A(2, 2);
  A << 1, 2, 0, 1;
  CHECK_THROWS_AS(mr::jacobi_eigendecomposition(A), mr::NotSymmetric);
}

TEST_CASE("spectral least squares solves and min-norms") {
  MatrixXd A(3, 3);
  A.setZero();
  A(0, 0) = 2.0;
  A(1, 1) = 5.0;  // third direction singular
  const auto eig = mr::jacobi_eigendecomposition(A);
  VectorXd rhs(3);
  rhs << 4.0, 10.0, 0.0;
  const VectorXd x = mr::spectral_least_squares(eig, rhs);
  CHECK((A * x - rhs).norm() < 1e-12);
  CHECK(std::abs(x[2]) < 1e-14);  // no component in the null space
}
