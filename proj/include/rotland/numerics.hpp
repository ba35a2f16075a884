#pragma once

#include <Eigen/Dense>

#include "rotland/errors.hpp"
#include "rotland/so3.hpp"

namespace rotland {

struct SymEig {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns, orthonormal
};

/// Dense symmetric eigendecomposition with a residual check
/// ||M v - lambda v|| <= 1e-8 ||M||. The input is symmetrized first.
inline SymEig sym_eig(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw InvalidParam("sym_eig: matrix must be square");
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw EigenFailure("sym_eig: solver did not converge");
  }
  SymEig out{solver.eigenvalues(), solver.eigenvectors()};
  const double scale = std::max(sym.norm(), 1e-300);
  const double resid =
      (sym * out.eigenvectors - out.eigenvectors * out.eigenvalues.asDiagonal()).norm();
  if (resid > 1e-8 * scale) {
    throw EigenFailure("sym_eig: residual check failed");
  }
  return out;
}

/// Nearest rotation in Frobenius norm (polar factor, det-corrected).
inline Rotation project_to_so3(const Eigen::Matrix3d& m) {
  return Rotation::from_matrix_unchecked(detail::polar_so3(m));
}

/// Orthonormal basis of the orthogonal complement of the (full column
/// rank, orthonormal-ish) columns of u, via the full Householder Q.
inline Eigen::MatrixXd orthonormal_complement(const Eigen::MatrixXd& u) {
  const Eigen::Index rows = u.rows();
  const Eigen::Index cols = u.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(u);
  Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(rows - cols);
}

}  // namespace rotland
