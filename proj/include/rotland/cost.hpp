#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "rotland/errors.hpp"
#include "rotland/graph.hpp"
#include "rotland/so3.hpp"

namespace rotland {

/// Residual angles below this are rejected for p < 2, where theta^(p-2)
/// blows up. Far below any synthetic noise scale, far above the
/// double-precision noise floor of log_map.
inline constexpr double kThetaMin = 1e-8;

/// Per-edge disagreement: [theta * axis]_x = log(R_i^T Rtilde_ij R_j).
/// axis is the zero vector when theta is (numerically) zero.
struct Residual {
  int i = 0;
  int j = 0;
  double theta = 0.0;
  Eigen::Vector3d axis = Eigen::Vector3d::Zero();
};

inline std::vector<Residual> residuals(const ViewGraph& vg, const Solution& sol) {
  if (sol.size() != vg.num_vertices()) {
    throw InvalidParam("residuals: solution length does not match graph");
  }
  std::vector<Residual> out;
  out.reserve(vg.edges().size());
  for (const auto& e : vg.edges()) {
    const Rotation q =
        sol.rotations[e.i].transposed() * e.measurement * sol.rotations[e.j];
    const AngleAxis aa = angle_axis_unchecked(q);
    out.push_back({e.i, e.j, aa.theta, aa.axis});
  }
  return out;
}

/// l_p geodesic cost: sum over edges of theta_ij^p.
inline double cost(const ViewGraph& vg, const Solution& sol, double p) {
  if (p < 1.0) throw InvalidParam("cost: p must be >= 1");
  double acc = 0.0;
  for (const auto& r : residuals(vg, sol)) acc += std::pow(r.theta, p);
  return acc;
}

namespace detail {

inline void require_derivative_regime(const std::vector<Residual>& res, double p) {
  if (p <= 1.0) throw InvalidParam("l_p derivatives require p > 1");
  if (p < 2.0) {
    for (const auto& r : res) {
      if (r.theta < kThetaMin) {
        throw NearZeroResidual("residual angle below theta_min with p < 2");
      }
    }
  }
}

// theta * cot(theta/2); smooth on [0, pi], -> 2 as theta -> 0.
inline double theta_cot_half(double theta) {
  if (theta < 1e-4) {
    const double t2 = theta * theta;
    return 2.0 - t2 / 6.0 - t2 * t2 / 360.0;
  }
  return theta * std::cos(0.5 * theta) / std::sin(0.5 * theta);
}

}  // namespace detail

/// Radial second-derivative coefficient p(p-1)theta^(p-2) along the
/// residual axis. pow(0, 0) = 1 makes the p = 2, theta = 0 limit exact.
inline double edge_radial_coeff(double theta, double p) {
  return p * (p - 1.0) * std::pow(theta, p - 2.0);
}

/// Transverse coefficient (p/2) theta^(p-1) cot(theta/2). The cot factor
/// is the curvature correction that makes the assembled Hessian agree
/// with finite differences of the cost; for p = 2 it gives the smooth
/// limit 2 at theta = 0.
inline double edge_transverse_coeff(double theta, double p) {
  return 0.5 * p * std::pow(theta, p - 2.0) * detail::theta_cot_half(theta);
}

/// Skew coefficient (p/2) theta^(p-1).
inline double edge_skew_coeff(double theta, double p) {
  return 0.5 * p * std::pow(theta, p - 1.0);
}

/// Symmetric 3x3 diagonal block of one edge term.
inline Eigen::Matrix3d edge_hessian_s(double theta, const Eigen::Vector3d& w, double p) {
  const Eigen::Matrix3d wwt = w * w.transpose();
  return edge_radial_coeff(theta, p) * wwt +
         edge_transverse_coeff(theta, p) * (Eigen::Matrix3d::Identity() - wwt);
}

/// Antisymmetric 3x3 off-diagonal part of one edge term.
inline Eigen::Matrix3d edge_hessian_a(double theta, const Eigen::Vector3d& w, double p) {
  return edge_skew_coeff(theta, p) * hat(w);
}

/// Riemannian gradient under the right-perturbation convention
/// R_i -> R_i exp([x_i]_x): each edge contributes -p theta^(p-1) w on
/// vertex i and +p theta^(p-1) w on vertex j. Vertex-major layout
/// (coordinates 3i..3i+2 belong to vertex i).
inline Eigen::VectorXd gradient(const ViewGraph& vg, const Solution& sol, double p) {
  const std::vector<Residual> res = residuals(vg, sol);
  detail::require_derivative_regime(res, p);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(3 * vg.num_vertices());
  for (const auto& r : res) {
    const Eigen::Vector3d term = p * std::pow(r.theta, p - 1.0) * r.axis;
    g.segment<3>(3 * r.i) -= term;
    g.segment<3>(3 * r.j) += term;
  }
  return g;
}

/// Exact dense 3n x 3n Hessian, assembled from per-edge blocks: each
/// edge contributes S on both diagonal blocks, -S + A^T at (i, j) and
/// -S + A at (j, i).
inline Eigen::MatrixXd hessian(const ViewGraph& vg, const Solution& sol, double p) {
  const std::vector<Residual> res = residuals(vg, sol);
  detail::require_derivative_regime(res, p);
  const int dim = 3 * vg.num_vertices();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& r : res) {
    const Eigen::Matrix3d s = edge_hessian_s(r.theta, r.axis, p);
    const Eigen::Matrix3d a = edge_hessian_a(r.theta, r.axis, p);
    h.block<3, 3>(3 * r.i, 3 * r.i) += s;
    h.block<3, 3>(3 * r.j, 3 * r.j) += s;
    h.block<3, 3>(3 * r.i, 3 * r.j) += -s + a.transpose();
    h.block<3, 3>(3 * r.j, 3 * r.i) += -s + a;
  }
  return h;
}

}  // namespace rotland
