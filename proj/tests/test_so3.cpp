#include <gtest/gtest.h>

#include <cmath>

#include "rotland/so3.hpp"

namespace {

using rotland::AngleAxis;
using rotland::RandomSource;
using rotland::Rotation;
using rotland::TangentVector;

TEST(So3, ExpOfZeroIsIdentity) {
  const Rotation r = rotland::exp_map(TangentVector::Zero());
  EXPECT_LT((r.matrix() - Eigen::Matrix3d::Identity()).norm(), 1e-15);
}

TEST(So3, ExpQuarterTurnAboutX) {
  const Rotation r = rotland::exp_map({M_PI / 2.0, 0.0, 0.0});
  const Eigen::Vector3d ey(0, 1, 0), ez(0, 0, 1);
  EXPECT_LT((r * ey - ez).norm(), 1e-14);
}

TEST(So3, LogOfIdentityIsZero) {
  EXPECT_LT(rotland::log_map(Rotation()).norm(), 1e-15);
}

TEST(So3, LogQuarterTurnAboutZ) {
  const Rotation r = rotland::exp_map({0.0, 0.0, M_PI / 2.0});
  const TangentVector t = rotland::log_map(r);
  EXPECT_LT((t - TangentVector(0, 0, M_PI / 2.0)).norm(), 1e-12);
}

TEST(So3, RoundTripRandomTangents) {
  RandomSource rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    TangentVector t = rotland::random_tangent_gaussian(1.0, rng);
    const double target = rng.uniform() * (M_PI - 1e-3);
    if (t.norm() > 0) t = t / t.norm() * target;
    const TangentVector back = rotland::log_map(rotland::exp_map(t));
    EXPECT_LT((back - t).norm(), 1e-9) << "norm " << t.norm();
  }
}

TEST(So3, LogNormEqualsAngleFromTraceOracle) {
  RandomSource rng(8);
  for (int trial = 0; trial < 1000; ++trial) {
    const Rotation r = rotland::random_uniform(rng);
    const double ang = rotland::geodesic_distance(Rotation(), r);
    // independent oracle: acos of trace, valid away from the ends
    const double tr = std::clamp(0.5 * (r.matrix().trace() - 1.0), -1.0, 1.0);
    EXPECT_NEAR(ang, std::acos(tr), 1e-7);
    if (ang < M_PI - 1e-3) {
      EXPECT_NEAR(rotland::log_map(r).norm(), ang, 1e-10);
    }
  }
}

TEST(So3, LogThrowsNearPi) {
  const Rotation r = rotland::exp_map({M_PI - 1e-8, 0.0, 0.0});
  EXPECT_THROW(rotland::log_map(r), rotland::AngleNearPi);
  // the unchecked variant still answers, with the right angle
  const AngleAxis aa = rotland::angle_axis_unchecked(r);
  EXPECT_NEAR(aa.theta, M_PI - 1e-8, 1e-9);
  EXPECT_NEAR(std::abs(aa.axis.x()), 1.0, 1e-9);
}

TEST(So3, UncheckedLogAccurateJustBelowCut) {
  // both extraction branches must round-trip cleanly near pi
  for (double theta : {M_PI - 2e-3, M_PI - 1e-4, M_PI - 1e-5}) {
    const Eigen::Vector3d axis = Eigen::Vector3d(1, -2, 0.5).normalized();
    const Rotation r = rotland::exp_map(theta * axis);
    const AngleAxis aa = rotland::angle_axis_unchecked(r);
    EXPECT_NEAR(aa.theta, theta, 1e-10);
    EXPECT_LT((aa.axis - axis).norm(), 1e-8);
  }
}

TEST(So3, GeodesicIdenticalIsZero) {
  RandomSource rng(9);
  const Rotation r = rotland::random_uniform(rng);
  EXPECT_LT(rotland::geodesic_distance(r, r), 1e-12);
}

TEST(So3, GeodesicThirtyDegrees) {
  const Rotation r = rotland::exp_map(M_PI / 6.0 * Eigen::Vector3d(0, 1, 0));
  EXPECT_NEAR(rotland::geodesic_distance(Rotation(), r), M_PI / 6.0, 1e-12);
}

TEST(So3, ChordalAtPiIsTwoSqrtTwo) {
  const Rotation r = rotland::exp_map({0.0, 0.0, M_PI});
  EXPECT_NEAR(rotland::chordal_distance(Rotation(), r), 2.0 * std::sqrt(2.0), 1e-12);
}

TEST(So3, SineRelationBetweenMetrics) {
  RandomSource rng(10);
  for (int trial = 0; trial < 1000; ++trial) {
    const Rotation r = rotland::random_uniform(rng);
    const Rotation s = rotland::random_uniform(rng);
    const double geo = rotland::geodesic_distance(r, s);
    const double chord = rotland::chordal_distance(r, s);
    EXPECT_NEAR(chord, 2.0 * std::sqrt(2.0) * std::sin(geo / 2.0), 1e-10);
  }
}

TEST(So3, BiInvariance) {
  RandomSource rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Rotation r = rotland::random_uniform(rng);
    const Rotation s = rotland::random_uniform(rng);
    const Rotation q = rotland::random_uniform(rng);
    const double d = rotland::geodesic_distance(r, s);
    EXPECT_NEAR(rotland::geodesic_distance(q * r, q * s), d, 1e-10);
    EXPECT_NEAR(rotland::geodesic_distance(r * q, s * q), d, 1e-10);
  }
}

TEST(So3, TriangleInequality) {
  RandomSource rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const Rotation a = rotland::random_uniform(rng);
    const Rotation b = rotland::random_uniform(rng);
    const Rotation c = rotland::random_uniform(rng);
    EXPECT_LE(rotland::geodesic_distance(a, c),
              rotland::geodesic_distance(a, b) + rotland::geodesic_distance(b, c) + 1e-10);
  }
}

TEST(So3, HaarSamplesSatisfyRotationInvariants) {
  RandomSource rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const Rotation r = rotland::random_uniform(rng);
    EXPECT_LT((r.matrix().transpose() * r.matrix() - Eigen::Matrix3d::Identity()).norm(),
              1e-12);
    EXPECT_NEAR(r.matrix().determinant(), 1.0, 1e-12);
  }
}

// Haar density of the angle is (1 - cos t) / pi on [0, pi]; the mean is
// pi/2 + 2/pi, recomputed here by Simpson quadrature as the oracle.
TEST(So3, HaarAngleMeanMatchesQuadratureOracle) {
  const int intervals = 2000;
  double integral = 0.0;
  auto density_times_t = [](double t) { return t * (1.0 - std::cos(t)) / M_PI; };
  const double h = M_PI / intervals;
  for (int s = 0; s < intervals; ++s) {
    const double a = s * h;
    integral += h / 6.0 *
                (density_times_t(a) + 4.0 * density_times_t(a + h / 2.0) +
                 density_times_t(a + h));
  }
  EXPECT_NEAR(integral, M_PI / 2.0 + 2.0 / M_PI, 1e-8);

  RandomSource rng(14);
  double mean = 0.0;
  const int samples = 100000;
  for (int s = 0; s < samples; ++s) {
    mean += rotland::geodesic_distance(Rotation(), rotland::random_uniform(rng));
  }
  mean /= samples;
  EXPECT_NEAR(mean, integral, 0.01);
}

TEST(So3, HaarMatrixMeanIsZero) {
  RandomSource rng(15);
  Eigen::Matrix3d mean = Eigen::Matrix3d::Zero();
  const int samples = 100000;
  for (int s = 0; s < samples; ++s) mean += rotland::random_uniform(rng).matrix();
  mean /= samples;
  EXPECT_LT(mean.cwiseAbs().maxCoeff(), 0.02);
}

TEST(So3, GaussianTangentSigmaZero) {
  RandomSource rng(16);
  EXPECT_EQ(rotland::random_tangent_gaussian(0.0, rng).norm(), 0.0);
}

TEST(So3, GaussianTangentVariance) {
  RandomSource rng(17);
  const double sigma = 0.1;
  const int samples = 100000;
  Eigen::Vector3d sum = Eigen::Vector3d::Zero(), sumsq = Eigen::Vector3d::Zero();
  double norm_mean = 0.0;
  for (int s = 0; s < samples; ++s) {
    const TangentVector v = rotland::random_tangent_gaussian(sigma, rng);
    sum += v;
    sumsq += v.cwiseProduct(v);
    norm_mean += v.norm();
  }
  for (int k = 0; k < 3; ++k) {
    const double var = sumsq(k) / samples - std::pow(sum(k) / samples, 2);
    EXPECT_NEAR(var, sigma * sigma, 0.05 * sigma * sigma);
  }
  // chi(3) mean: sigma * 2 * sqrt(2/pi)
  norm_mean /= samples;
  EXPECT_NEAR(norm_mean, sigma * 2.0 * std::sqrt(2.0 / M_PI), 0.01 * sigma);
}

TEST(So3, GaussianTangentNegativeSigmaThrows) {
  RandomSource rng(18);
  EXPECT_THROW(rotland::random_tangent_gaussian(-0.1, rng), rotland::InvalidParam);
}

TEST(So3, FromMatrixRejectsGarbage) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 0) = 2.0;
  EXPECT_THROW(Rotation::from_matrix(m), rotland::InvalidParam);
}

TEST(So3, FromMatrixKeepsCleanBits) {
  RandomSource rng(19);
  const Rotation r = rotland::random_uniform(rng);
  const Rotation back = Rotation::from_matrix(r.matrix());
  EXPECT_EQ((back.matrix() - r.matrix()).norm(), 0.0);
}

}  // namespace
