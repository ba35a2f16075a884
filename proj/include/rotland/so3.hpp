#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "rotland/errors.hpp"
#include "rotland/rng.hpp"

namespace rotland {

/// Angle-axis tangent vector theta * v_hat, in radians.
using TangentVector = Eigen::Vector3d;

inline Eigen::Matrix3d hat(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  // clang-format off
  m <<     0.0, -v.z(),  v.y(),
         v.z(),    0.0, -v.x(),
        -v.y(),  v.x(),    0.0;
  // clang-format on
  return m;
}

inline Eigen::Vector3d vee(const Eigen::Matrix3d& m) {
  return {m(2, 1), m(0, 2), m(1, 0)};
}

namespace detail {

// Nearest rotation matrix in Frobenius norm (polar factor with
// determinant correction). Throws DegenerateMatrix when the smallest
// singular value is below 1e-12.
inline Eigen::Matrix3d polar_so3(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(2) < 1e-12) {
    throw DegenerateMatrix("polar projection: matrix is numerically singular");
  }
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return r;
}

}  // namespace detail

/// One element of SO(3), stored as a 3x3 matrix. Orthonormality is an
/// invariant: constructors either produce it exactly (exp_map, sampling,
/// products) or validate/renormalize (from_matrix).
class Rotation {
 public:
  Rotation() : m_(Eigen::Matrix3d::Identity()) {}

  /// Accepts matrices within 1e-6 of SO(3); inputs off by more than
  /// 1e-12 are snapped back by polar projection, closer ones are kept
  /// bit-for-bit so that serialized rotations round-trip exactly.
  static Rotation from_matrix(const Eigen::Matrix3d& m) {
    const double ortho_err = (m.transpose() * m - Eigen::Matrix3d::Identity()).norm();
    const double det_err = std::abs(m.determinant() - 1.0);
    if (ortho_err > 1e-6 || det_err > 1e-6) {
      throw InvalidParam("from_matrix: input is not a rotation matrix");
    }
    if (ortho_err > 1e-12 || det_err > 1e-12) {
      return Rotation(detail::polar_so3(m));
    }
    return Rotation(m);
  }

  /// No validation; for internal construction from known-good products.
  static Rotation from_matrix_unchecked(const Eigen::Matrix3d& m) { return Rotation(m); }

  const Eigen::Matrix3d& matrix() const { return m_; }

  Rotation transposed() const { return Rotation(m_.transpose()); }

  Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_); }

  Eigen::Vector3d operator*(const Eigen::Vector3d& v) const { return m_ * v; }

 private:
  explicit Rotation(const Eigen::Matrix3d& m) : m_(m) {}

  Eigen::Matrix3d m_;
};

/// Rotation angle in [0, pi], extracted as atan2(|skew part|, tr-1 form)
/// which stays well conditioned near both 0 and pi.
inline double angle_of(const Rotation& r) {
  const Eigen::Matrix3d& m = r.matrix();
  const Eigen::Vector3d s = 0.5 * vee(m - m.transpose());  // sin(theta) * axis
  const double c = 0.5 * (m.trace() - 1.0);                // cos(theta)
  return std::atan2(s.norm(), c);
}

struct AngleAxis {
  double theta = 0.0;        // in [0, pi]
  Eigen::Vector3d axis = Eigen::Vector3d::Zero();  // unit when theta > 0, zero otherwise
};

/// Angle-axis decomposition that never throws. Near theta = pi the axis
/// is recovered from the symmetric part; its sign is fixed by the skew
/// part when that is resolvable and by the largest component otherwise,
/// so the result is deterministic.
inline AngleAxis angle_axis_unchecked(const Rotation& r) {
  const Eigen::Matrix3d& m = r.matrix();
  const Eigen::Vector3d s = 0.5 * vee(m - m.transpose());
  const double c = 0.5 * (m.trace() - 1.0);
  const double sn = s.norm();
  const double theta = std::atan2(sn, c);

  if (theta < 1e-12) return {theta, Eigen::Vector3d::Zero()};

  if (theta > M_PI - 1e-3) {
    // axis*axis^T = (sym(m) - c*I) / (1 - c); 1 - c is near 2 here.
    const Eigen::Matrix3d b =
        (0.5 * (m + m.transpose()) - c * Eigen::Matrix3d::Identity()) / (1.0 - c);
    int k = 0;
    b.diagonal().maxCoeff(&k);
    Eigen::Vector3d w = b.col(k) / std::sqrt(b(k, k));
    w.normalize();
    if (sn > 1e-9) {
      if (s.dot(w) < 0.0) w = -w;
    } else {
      int j = 0;
      w.cwiseAbs().maxCoeff(&j);
      if (w(j) < 0.0) w = -w;
    }
    return {theta, w};
  }
  return {theta, s / sn};
}

/// Rodrigues formula with a Taylor branch below theta = 1e-6.
inline Rotation exp_map(const TangentVector& t) {
  const double th2 = t.squaredNorm();
  const double th = std::sqrt(th2);
  double a, b;  // sin(th)/th and (1-cos(th))/th^2
  if (th < 1e-6) {
    a = 1.0 - th2 / 6.0;
    b = 0.5 - th2 / 24.0;
  } else {
    a = std::sin(th) / th;
    b = (1.0 - std::cos(th)) / th2;
  }
  const Eigen::Matrix3d k = hat(t);
  return Rotation::from_matrix_unchecked(Eigen::Matrix3d::Identity() + a * k + b * (k * k));
}

/// Principal logarithm. Throws AngleNearPi when angle >= pi - 1e-6.
inline TangentVector log_map(const Rotation& r) {
  const AngleAxis aa = angle_axis_unchecked(r);
  if (aa.theta >= M_PI - 1e-6) {
    throw AngleNearPi("log_map: rotation angle within 1e-6 of pi, axis ambiguous");
  }
  return aa.theta * aa.axis;
}

/// Non-throwing log for internal residual work; deterministic at the cut
/// locus via angle_axis_unchecked's sign rule.
inline TangentVector log_map_unchecked(const Rotation& r) {
  const AngleAxis aa = angle_axis_unchecked(r);
  return aa.theta * aa.axis;
}

/// Intrinsic metric: the angle of r^T s, in [0, pi].
inline double geodesic_distance(const Rotation& r, const Rotation& s) {
  return angle_of(r.transposed() * s);
}

/// Extrinsic metric: Frobenius norm of r - s, in [0, 2*sqrt(2)].
inline double chordal_distance(const Rotation& r, const Rotation& s) {
  return (r.matrix() - s.matrix()).norm();
}

/// Haar-uniform sample via a normalized 4-component Gaussian quaternion.
inline Rotation random_uniform(RandomSource& rng) {
  double q[4];
  double n2 = 0.0;
  do {
    for (double& x : q) x = rng.normal(1.0);
    n2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3];
  } while (n2 < 1e-12);
  Eigen::Quaterniond quat(q[0], q[1], q[2], q[3]);
  quat.normalize();
  return Rotation::from_matrix_unchecked(quat.toRotationMatrix());
}

/// Three i.i.d. N(0, sigma^2) coordinates.
inline TangentVector random_tangent_gaussian(double sigma, RandomSource& rng) {
  if (sigma < 0.0) throw InvalidParam("random_tangent_gaussian: sigma must be >= 0");
  return {rng.normal(sigma), rng.normal(sigma), rng.normal(sigma)};
}

}  // namespace rotland
