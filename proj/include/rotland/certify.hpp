#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rotland/cost.hpp"
#include "rotland/errors.hpp"
#include "rotland/gauge.hpp"
#include "rotland/graph.hpp"
#include "rotland/numerics.hpp"

namespace rotland {

/// Per-edge isotropic lower-bound weight:
/// alpha = min((p/2) theta^(p-1), p(p-1) theta^(p-2) - (p/2) theta^(p-1)).
inline double alpha_weight(double theta, double p) {
  const double skew = 0.5 * p * std::pow(theta, p - 1.0);
  const double radial = p * (p - 1.0) * std::pow(theta, p - 2.0);
  return std::min(skew, radial - skew);
}

struct ConvexityReport {
  double p = 2.0;

  // Exact test: min eigenvalue of the horizontally restricted Hessian.
  double exact_min_eig = std::numeric_limits<double>::quiet_NaN();
  std::string exact_error;

  // Normalized-Laplacian bound: min of x^T L_norm x over x perp 1, |x|=1.
  double lnorm_min = std::numeric_limits<double>::quiet_NaN();
  bool lnorm_pass = false;
  std::string lnorm_error;

  // Separated bound: lambda_2(L) > max weighted degree / min alpha.
  double separated_lhs = std::numeric_limits<double>::quiet_NaN();
  double separated_rhs = std::numeric_limits<double>::quiet_NaN();
  bool separated_pass = false;
  std::string separated_error;

  double alpha_min = std::numeric_limits<double>::quiet_NaN();
  double max_weighted_degree = std::numeric_limits<double>::quiet_NaN();

  // Debug-only alternative reading of the separated bound's left side.
  double lambda2_alpha_weighted = std::numeric_limits<double>::quiet_NaN();

  std::vector<Residual> residual_table;
};

namespace detail {

inline void require_certifiable(const std::vector<Residual>& res, double p) {
  if (p <= 1.0) throw InvalidParam("certification requires p > 1");
  if (p < 2.0) {
    for (const auto& r : res) {
      if (r.theta < kThetaMin) {
        throw NearZeroResidual("residual angle below theta_min with p < 2");
      }
    }
  }
}

inline Eigen::VectorXd weighted_degrees(const ViewGraph& vg, const std::vector<Residual>& res,
                                        double p) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(vg.num_vertices());
  for (const auto& r : res) {
    const double w = 0.5 * p * std::pow(r.theta, p - 1.0);
    d(r.i) += w;
    d(r.j) += w;
  }
  return d;
}

// min Rayleigh quotient of a symmetric n x n matrix over the hyperplane
// orthogonal to 1_n.
inline double min_rayleigh_perp_ones(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::MatrixXd ones = Eigen::MatrixXd::Constant(n, 1, 1.0 / std::sqrt(double(n)));
  const Eigen::MatrixXd c = orthonormal_complement(ones);
  if (c.cols() == 0) return std::numeric_limits<double>::infinity();
  return sym_eig(c.transpose() * m * c).eigenvalues(0);
}

}  // namespace detail

/// Exact quotient-projected test: min eigenvalue of B^T H B where B is
/// an orthonormal basis of the horizontal space. Strictly positive means
/// the problem is locally convex at sol.
inline double exact_projected_test(const ViewGraph& vg, const Solution& sol, double p) {
  const Eigen::MatrixXd h = hessian(vg, sol, p);  // validates the residual regime
  const GaugeBasis basis(vg.num_vertices());
  const Eigen::MatrixXd b = orthonormal_complement(basis.vertical());
  if (b.cols() == 0) return std::numeric_limits<double>::infinity();
  return sym_eig(b.transpose() * h * b).eigenvalues(0);
}

struct LnormBound {
  double lnorm_min = 0.0;
  bool pass = false;
};

/// Sufficient condition via the weighted, normalized Laplacian
/// L_norm = D^{-1/2} L(alpha) D^{-1/2}: local convexity holds when the
/// min Rayleigh quotient over 1^perp exceeds 1.
inline LnormBound lnorm_bound(const ViewGraph& vg, const Solution& sol, double p) {
  const std::vector<Residual> res = residuals(vg, sol);
  detail::require_certifiable(res, p);

  const Eigen::VectorXd deg = detail::weighted_degrees(vg, res, p);
  if (deg.minCoeff() < 1e-15) {
    throw DegenerateDegree("lnorm_bound: vertex with all-zero residual degree");
  }

  std::vector<std::pair<int, int>> edges;
  std::vector<double> alphas;
  edges.reserve(res.size());
  alphas.reserve(res.size());
  for (const auto& r : res) {
    edges.emplace_back(r.i, r.j);
    alphas.push_back(alpha_weight(r.theta, p));
  }
  const Eigen::MatrixXd l = weighted_laplacian(vg.num_vertices(), edges, alphas);
  const Eigen::VectorXd dinv_sqrt = deg.array().rsqrt();
  const Eigen::MatrixXd lnorm =
      dinv_sqrt.asDiagonal() * l * dinv_sqrt.asDiagonal();

  LnormBound out;
  out.lnorm_min = detail::min_rayleigh_perp_ones(lnorm);
  out.pass = out.lnorm_min > 1.0;
  return out;
}

struct SeparatedBound {
  double lhs = 0.0;  // lambda_2 of the unweighted Laplacian ("structure")
  double rhs = 0.0;  // max weighted degree / min alpha ("residuals")
  bool pass = false;
};

/// Fully separated sufficient condition: algebraic connectivity of the
/// bare graph on the left, a pure residual term on the right.
inline SeparatedBound separated_bound(const ViewGraph& vg, const Solution& sol, double p) {
  const std::vector<Residual> res = residuals(vg, sol);
  detail::require_certifiable(res, p);

  const Eigen::VectorXd deg = detail::weighted_degrees(vg, res, p);
  if (deg.minCoeff() < 1e-15) {
    throw DegenerateDegree("separated_bound: vertex with all-zero residual degree");
  }
  double alpha_min = std::numeric_limits<double>::infinity();
  for (const auto& r : res) alpha_min = std::min(alpha_min, alpha_weight(r.theta, p));
  if (alpha_min <= 0.0) {
    throw AlphaNonpositive("separated_bound: min alpha <= 0, residuals too large");
  }

  SeparatedBound out;
  out.lhs = sym_eig(laplacian(vg)).eigenvalues(1);
  out.rhs = deg.maxCoeff() / alpha_min;
  out.pass = out.lhs > out.rhs;
  return out;
}

/// Runs all three tests and reports every field; per-test errors are
/// recorded in the report rather than thrown, and no test result is ever
/// substituted for another.
inline ConvexityReport certify(const ViewGraph& vg, const Solution& sol, double p) {
  ConvexityReport rep;
  rep.p = p;
  rep.residual_table = residuals(vg, sol);

  try {
    rep.exact_min_eig = exact_projected_test(vg, sol, p);
  } catch (const Error& e) {
    rep.exact_error = e.what();
  }
  try {
    const LnormBound b = lnorm_bound(vg, sol, p);
    rep.lnorm_min = b.lnorm_min;
    rep.lnorm_pass = b.pass;
  } catch (const Error& e) {
    rep.lnorm_error = e.what();
  }
  try {
    const SeparatedBound b = separated_bound(vg, sol, p);
    rep.separated_lhs = b.lhs;
    rep.separated_rhs = b.rhs;
    rep.separated_pass = b.pass;
  } catch (const Error& e) {
    rep.separated_error = e.what();
  }

  try {
    detail::require_certifiable(rep.residual_table, p);
    double amin = std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, int>> edges;
    std::vector<double> alphas;
    for (const auto& r : rep.residual_table) {
      const double a = alpha_weight(r.theta, p);
      amin = std::min(amin, a);
      edges.emplace_back(r.i, r.j);
      alphas.push_back(a);
    }
    rep.alpha_min = amin;
    rep.max_weighted_degree = detail::weighted_degrees(vg, rep.residual_table, p).maxCoeff();
    if (vg.num_vertices() >= 2) {
      rep.lambda2_alpha_weighted =
          sym_eig(weighted_laplacian(vg.num_vertices(), edges, alphas)).eigenvalues(1);
    }
  } catch (const Error&) {
    // summary fields stay NaN; the per-test errors above already explain why
  }
  return rep;
}

}  // namespace rotland
