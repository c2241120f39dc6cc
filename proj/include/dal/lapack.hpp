#pragma once

#include <Eigen/Core>

#include "dal/types.hpp"

namespace dal::detail {

/// Full symmetric eigendecomposition (divide and conquer). A holds the
/// symmetric input and, when vectors is true, the eigenvectors afterwards.
void sym_eig(Eigen::MatrixXd& A, Eigen::VectorXd& w, bool vectors);

/// Tridiagonal eigendecomposition; diag/off are destroyed. When z is
/// non-null it receives the eigenvectors.
void tridiag_eig(Eigen::VectorXd& diag, Eigen::VectorXd& off, Eigen::MatrixXd* z);

/// Eigenvalues only, root-free QL/QR; cheapest path for tridiagonal.
void tridiag_values(Eigen::VectorXd& diag, Eigen::VectorXd& off);

/// Selected eigenpairs (1-based inclusive index range, ascending order)
/// of a tridiagonal matrix via bisection + inverse iteration.
void tridiag_selected(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, int il, int iu,
                      Eigen::VectorXd& w, Eigen::MatrixXd& z);

/// Eigenpairs with eigenvalue in (vl, vu]; counts first, then solves, so
/// memory stays proportional to the number of returned pairs.
void tridiag_selected_range(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double vl,
                            double vu, Eigen::VectorXd& w, Eigen::MatrixXd& z);

}  // namespace dal::detail
