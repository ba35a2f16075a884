#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "rotland/errors.hpp"
#include "rotland/graph.hpp"
#include "rotland/numerics.hpp"
#include "rotland/so3.hpp"

namespace rotland {

/// Vertical/horizontal decomposition of the tangent space of SO(3)^n
/// under the right gauge action. The basis depends only on n and is the
/// same at every point. Vertex-major layout: the k-th vertical vector
/// has 1/sqrt(n) at coordinate 3i+k for every vertex i.
class GaugeBasis {
 public:
  explicit GaugeBasis(int n) : n_(n) {
    if (n < 1) throw InvalidParam("GaugeBasis: need n >= 1");
    u_ = Eigen::MatrixXd::Zero(3 * n, 3);
    const double a = 1.0 / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < 3; ++k) u_(3 * i + k, k) = a;
    }
  }

  int n() const { return n_; }
  int dim() const { return 3 * n_; }

  /// 3n x 3 orthonormal vertical basis.
  const Eigen::MatrixXd& vertical() const { return u_; }

  /// P = I - sum_k u_k u_k^T; symmetric idempotent of rank 3n - 3.
  Eigen::MatrixXd horizontal_projector() const {
    return Eigen::MatrixXd::Identity(dim(), dim()) - u_ * u_.transpose();
  }

  /// P g.
  Eigen::VectorXd project(const Eigen::VectorXd& g) const {
    if (g.size() != dim()) throw InvalidParam("GaugeBasis: vector size mismatch");
    return g - u_ * (u_.transpose() * g);
  }

  /// P M P, via rank-3 updates.
  Eigen::MatrixXd project(const Eigen::MatrixXd& m) const {
    if (m.rows() != dim() || m.cols() != dim()) {
      throw InvalidParam("GaugeBasis: matrix size mismatch");
    }
    const Eigen::MatrixXd mu = m * u_;
    const Eigen::MatrixXd utm = u_.transpose() * m;
    const Eigen::Matrix3d utmu = u_.transpose() * mu;
    return m - u_ * utm - mu * u_.transpose() + u_ * utmu * u_.transpose();
  }

 private:
  int n_;
  Eigen::MatrixXd u_;
};

inline GaugeBasis vertical_basis(int n) { return GaugeBasis(n); }

struct AlignResult {
  Rotation gauge;             // S minimizing sum_i d(a_i, b_i S)^2
  Solution aligned_b;         // b_i S
  double karcher_residual;    // norm of the final mean tangent update
  bool ambiguous;             // Karcher iteration failed to contract
};

/// Gauge alignment: single-rotation averaging of Q_i = b_i^T a_i, with
/// chordal initialization (polar factor of sum Q_i) refined by Karcher
/// iteration. Deterministic and seed-free.
inline AlignResult align(const Solution& a, const Solution& b) {
  if (a.size() != b.size()) throw InvalidParam("align: solutions differ in length");
  const int n = a.size();
  if (n == 0) throw InvalidParam("align: empty solutions");

  std::vector<Rotation> q;
  q.reserve(n);
  Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
  for (int i = 0; i < n; ++i) {
    q.push_back(b.rotations[i].transposed() * a.rotations[i]);
    sum += q.back().matrix();
  }

  Rotation s;
  try {
    s = project_to_so3(sum);
  } catch (const DegenerateMatrix&) {
    s = q.front();  // antipodal spread; start somewhere and let Karcher try
  }

  double resid = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 100; ++iter) {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const Rotation& qi : q) mean += log_map_unchecked(s.transposed() * qi);
    mean /= static_cast<double>(n);
    resid = mean.norm();
    if (resid < 1e-12) break;
    s = s * exp_map(mean);
  }

  AlignResult out;
  out.gauge = s;
  out.aligned_b.rotations.reserve(n);
  for (int i = 0; i < n; ++i) out.aligned_b.rotations.push_back(b.rotations[i] * s);
  out.karcher_residual = resid;
  out.ambiguous = !(resid < 1e-9);
  return out;
}

/// Root-sum-square product metric between two solutions, in radians.
inline double solution_distance(const Solution& a, const Solution& b) {
  if (a.size() != b.size()) throw InvalidParam("solution_distance: length mismatch");
  double acc = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    const double d = geodesic_distance(a.rotations[i], b.rotations[i]);
    acc += d * d;
  }
  return std::sqrt(acc);
}

/// Quotient metric: min over S of the RSS distance between a and b * S.
inline double quotient_distance(const Solution& a, const Solution& b) {
  const AlignResult r = align(a, b);
  return solution_distance(a, r.aligned_b);
}

}  // namespace rotland
