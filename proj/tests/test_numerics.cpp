#include <gtest/gtest.h>

#include <cmath>

#include "rotland/graph.hpp"
#include "rotland/numerics.hpp"
#include "rotland/so3.hpp"

namespace {

using rotland::RandomSource;
using rotland::Rotation;

TEST(Numerics, DiagonalEigenvalues) {
  Eigen::MatrixXd m = Eigen::Vector3d(3, 1, 2).asDiagonal();
  const rotland::SymEig e = rotland::sym_eig(m);
  EXPECT_NEAR(e.eigenvalues(0), 1.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues(1), 2.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues(2), 3.0, 1e-14);
}

// C5 Laplacian spectrum from the circulant closed form 2 - 2cos(2 pi k/5).
TEST(Numerics, CycleFiveLaplacianSpectrum) {
  rotland::Topology c5;
  c5.n = 5;
  c5.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}};
  const rotland::SymEig e = rotland::sym_eig(rotland::laplacian(c5));
  std::vector<double> expected;
  for (int k = 0; k < 5; ++k) expected.push_back(2.0 - 2.0 * std::cos(2.0 * M_PI * k / 5.0));
  std::sort(expected.begin(), expected.end());
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(e.eigenvalues(k), expected[k], 1e-9);
}

TEST(Numerics, LargeRandomSymmetricReconstruction) {
  RandomSource rng(21);
  const int n = 120;
  Eigen::MatrixXd m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c <= r; ++c) {
      m(r, c) = rng.normal(1.0);
      m(c, r) = m(r, c);
    }
  }
  const rotland::SymEig e = rotland::sym_eig(m);
  const Eigen::MatrixXd recon =
      e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.transpose();
  EXPECT_LT((recon - m).norm(), 1e-8 * m.norm());
  EXPECT_LT((e.eigenvectors.transpose() * e.eigenvectors -
             Eigen::MatrixXd::Identity(n, n)).norm(),
            1e-10);
}

TEST(Numerics, PsdEigenvaluesNonNegative) {
  RandomSource rng(22);
  Eigen::MatrixXd a(40, 10);
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) a(r, c) = rng.normal(1.0);
  }
  const rotland::SymEig e = rotland::sym_eig(a * a.transpose());
  EXPECT_GT(e.eigenvalues(0), -1e-9);
}

TEST(Numerics, ProjectRotationToItself) {
  RandomSource rng(23);
  const Rotation r = rotland::random_uniform(rng);
  EXPECT_LT((rotland::project_to_so3(r.matrix()).matrix() - r.matrix()).norm(), 1e-12);
  EXPECT_LT((rotland::project_to_so3(2.0 * r.matrix()).matrix() - r.matrix()).norm(), 1e-12);
}

TEST(Numerics, ProjectDegenerateThrows) {
  EXPECT_THROW(rotland::project_to_so3(Eigen::Matrix3d::Zero()), rotland::DegenerateMatrix);
}

// The polar factor must beat any random rotation in Frobenius distance.
TEST(Numerics, ProjectBeatsMonteCarloCandidates) {
  RandomSource rng(24);
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = rng.normal(1.0);
  }
  const Rotation best = rotland::project_to_so3(m);
  const double best_dist = (m - best.matrix()).norm();
  for (int trial = 0; trial < 10000; ++trial) {
    const Rotation cand = rotland::random_uniform(rng);
    EXPECT_LE(best_dist, (m - cand.matrix()).norm() + 1e-12);
  }
}

TEST(Numerics, OrthonormalComplement) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(9, 3);
  const double a = 1.0 / std::sqrt(3.0);
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) u(3 * i + k, k) = a;
  }
  const Eigen::MatrixXd b = rotland::orthonormal_complement(u);
  ASSERT_EQ(b.cols(), 6);
  EXPECT_LT((b.transpose() * b - Eigen::MatrixXd::Identity(6, 6)).norm(), 1e-12);
  EXPECT_LT((b.transpose() * u).norm(), 1e-12);
}

}  // namespace
