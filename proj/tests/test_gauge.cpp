#include <gtest/gtest.h>

#include <cmath>

#include "rotland/cost.hpp"
#include "rotland/gauge.hpp"
#include "rotland/graph.hpp"

namespace {

using rotland::GaugeBasis;
using rotland::RandomSource;
using rotland::Rotation;
using rotland::Solution;

Solution random_solution(int n, RandomSource& rng) {
  Solution s;
  for (int i = 0; i < n; ++i) s.rotations.push_back(rotland::random_uniform(rng));
  return s;
}

TEST(GaugeBasisType, SingleVertexIsPureGauge) {
  const GaugeBasis b(1);
  EXPECT_LT(b.horizontal_projector().norm(), 1e-14);
}

TEST(GaugeBasisType, ProjectorRankAndIdempotence) {
  const GaugeBasis b(2);
  const Eigen::MatrixXd p = b.horizontal_projector();
  EXPECT_LT((p * p - p).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(p.trace(), 3.0, 1e-12);  // rank 3n - 3 = 3
  EXPECT_LT((p * b.vertical()).norm(), 1e-12);
}

TEST(GaugeBasisType, CostConstantAlongVerticalFlow) {
  RandomSource rng(51);
  const rotland::Topology t = rotland::gen_gnm(6, 10, rng);
  rotland::NoiseSpec noise;
  noise.sigma_n = 0.2;
  const auto inst = rotland::synthesize(t, noise, rng);
  const Solution sol = random_solution(6, rng);
  const double base = rotland::cost(inst.graph, sol, 2.0);
  const GaugeBasis basis(6);
  for (int k = 0; k < 3; ++k) {
    for (double step : {0.1, 0.7, 2.0}) {
      const Eigen::VectorXd dir = basis.vertical().col(k) * step;
      Solution moved;
      for (int i = 0; i < 6; ++i) {
        moved.rotations.push_back(sol.rotations[i] * rotland::exp_map(dir.segment<3>(3 * i)));
      }
      EXPECT_NEAR(rotland::cost(inst.graph, moved, 2.0), base, 1e-10);
    }
  }
}

TEST(GaugeBasisType, ProjectMatrixDropsThreeEigenvalues) {
  RandomSource rng(52);
  const int n = 5;
  Eigen::MatrixXd m(3 * n, 3 * n);
  for (int r = 0; r < 3 * n; ++r) {
    for (int c = 0; c <= r; ++c) {
      m(r, c) = rng.normal(1.0);
      m(c, r) = m(r, c);
    }
  }
  const GaugeBasis basis(n);
  const Eigen::MatrixXd php = basis.project(m);
  const rotland::SymEig e = rotland::sym_eig(php);
  int zeros = 0;
  for (int k = 0; k < e.eigenvalues.size(); ++k) {
    if (std::abs(e.eigenvalues(k)) < 1e-9) ++zeros;
  }
  EXPECT_GE(zeros, 3);
  // agrees with the materialized projector
  const Eigen::MatrixXd p = basis.horizontal_projector();
  EXPECT_LT((php - p * m * p).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Align, RecoversExactGaugeCopy) {
  RandomSource rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const Solution a = random_solution(10, rng);
    const Rotation s0 = rotland::random_uniform(rng);
    Solution b;
    for (const auto& r : a.rotations) b.rotations.push_back(r * s0.transposed());
    const rotland::AlignResult ar = rotland::align(a, b);
    EXPECT_FALSE(ar.ambiguous);
    EXPECT_LT(rotland::geodesic_distance(ar.gauge, s0), 1e-9);
    EXPECT_LT(rotland::quotient_distance(a, b), 1e-8);
  }
}

TEST(Align, IdenticalInputsGiveIdentity) {
  RandomSource rng(54);
  const Solution a = random_solution(8, rng);
  const rotland::AlignResult ar = rotland::align(a, a);
  EXPECT_LT(rotland::geodesic_distance(ar.gauge, Rotation()), 1e-10);
}

TEST(Align, BeatsMonteCarloCandidates) {
  RandomSource rng(55);
  const Solution a = random_solution(6, rng);
  const Solution b = random_solution(6, rng);
  const rotland::AlignResult ar = rotland::align(a, b);
  auto objective = [&](const Rotation& s) {
    double acc = 0.0;
    for (int i = 0; i < 6; ++i) {
      const double d = rotland::geodesic_distance(a.rotations[i], b.rotations[i] * s);
      acc += d * d;
    }
    return acc;
  };
  const double best = objective(ar.gauge);
  for (int trial = 0; trial < 10000; ++trial) {
    EXPECT_LE(best, objective(rotland::random_uniform(rng)) + 1e-9);
  }
}

TEST(Align, LengthMismatchThrows) {
  RandomSource rng(56);
  const Solution a = random_solution(4, rng);
  const Solution b = random_solution(5, rng);
  EXPECT_THROW(rotland::align(a, b), rotland::InvalidParam);
}

TEST(QuotientDistance, UpperBoundedByUnalignedDistance) {
  RandomSource rng(57);
  for (int trial = 0; trial < 50; ++trial) {
    const Solution a = random_solution(8, rng);
    Solution b = a;
    // single-vertex perturbation by 0.1 rad: alignment can only shrink it
    b.rotations[3] = b.rotations[3] * rotland::exp_map({0.1, 0.0, 0.0});
    const double d = rotland::quotient_distance(a, b);
    EXPECT_LE(d, 0.1 + 1e-9);
    EXPECT_LE(d, rotland::solution_distance(a, b) + 1e-12);
  }
}

TEST(QuotientDistance, Symmetric) {
  RandomSource rng(58);
  for (int trial = 0; trial < 100; ++trial) {
    const Solution a = random_solution(5, rng);
    const Solution b = random_solution(5, rng);
    EXPECT_NEAR(rotland::quotient_distance(a, b), rotland::quotient_distance(b, a), 1e-8);
  }
}

TEST(QuotientDistance, InvariantUnderIndependentGaugeChanges) {
  RandomSource rng(59);
  for (int trial = 0; trial < 30; ++trial) {
    const Solution a = random_solution(6, rng);
    const Solution b = random_solution(6, rng);
    const double d = rotland::quotient_distance(a, b);
    const Rotation sa = rotland::random_uniform(rng);
    const Rotation sb = rotland::random_uniform(rng);
    Solution am, bm;
    for (const auto& r : a.rotations) am.rotations.push_back(r * sa);
    for (const auto& r : b.rotations) bm.rotations.push_back(r * sb);
    EXPECT_NEAR(rotland::quotient_distance(am, bm), d, 1e-8);
  }
}

}  // namespace
