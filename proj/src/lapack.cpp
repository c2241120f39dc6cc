#include "dal/lapack.hpp"

#include <lapacke.h>

#include <string>

namespace dal::detail {

namespace {
[[noreturn]] void fail(const char* routine, int info) {
  throw SolverError(std::string(routine) + " failed with info=" + std::to_string(info));
}
}  // namespace

void sym_eig(Eigen::MatrixXd& A, Eigen::VectorXd& w, bool vectors) {
  const auto n = static_cast<lapack_int>(A.rows());
  w.resize(n);
  int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'L', n, A.data(), n, w.data());
  if (info != 0) fail("dsyevd", info);
}

void tridiag_eig(Eigen::VectorXd& diag, Eigen::VectorXd& off, Eigen::MatrixXd* z) {
  const auto n = static_cast<lapack_int>(diag.size());
  if (off.size() < std::max<Eigen::Index>(1, diag.size() - 1)) off.conservativeResize(1);
  if (z) {
    z->resize(n, n);
    int info = LAPACKE_dstedc(LAPACK_COL_MAJOR, 'I', n, diag.data(), off.data(), z->data(), n);
    if (info != 0) fail("dstedc", info);
  } else {
    int info = LAPACKE_dsterf(n, diag.data(), off.data());
    if (info != 0) fail("dsterf", info);
  }
}

void tridiag_values(Eigen::VectorXd& diag, Eigen::VectorXd& off) {
  const auto n = static_cast<lapack_int>(diag.size());
  if (off.size() < std::max<Eigen::Index>(1, diag.size() - 1)) off.conservativeResize(1);
  int info = LAPACKE_dsterf(n, diag.data(), off.data());
  if (info != 0) fail("dsterf", info);
}

namespace {
// dstevr's workspace reads one entry past the strict n-1 off-diagonal length.
Eigen::VectorXd padded_off(const Eigen::VectorXd& off, Eigen::Index n) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(std::max<Eigen::Index>(n, 1));
  e.head(off.size()) = off;
  return e;
}
}  // namespace

void tridiag_selected(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, int il, int iu,
                      Eigen::VectorXd& w, Eigen::MatrixXd& z) {
  const auto n = static_cast<lapack_int>(diag.size());
  const int m_want = iu - il + 1;
  Eigen::VectorXd d = diag, e = padded_off(off, diag.size());
  w.resize(n);
  z.resize(n, m_want);
  lapack_int m = 0;
  std::vector<lapack_int> isuppz(static_cast<size_t>(2 * std::max(1, m_want)));
  int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, il, iu,
                            0.0, &m, w.data(), z.data(), n, isuppz.data());
  if (info != 0) fail("dstevr", info);
  w.conservativeResize(m);
  z.conservativeResize(n, m);
}

void tridiag_selected_range(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double vl,
                            double vu, Eigen::VectorXd& w, Eigen::MatrixXd& z) {
  const auto n = static_cast<lapack_int>(diag.size());
  // Count pass keeps the eigenvector allocation at n x m.
  Eigen::VectorXd d = diag, e = padded_off(off, diag.size());
  Eigen::VectorXd wcount(n);
  lapack_int m = 0;
  int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'N', 'V', n, d.data(), e.data(), vl, vu, 0, 0, 0.0,
                            &m, wcount.data(), nullptr, 1, nullptr);
  if (info != 0) fail("dstevr(count)", info);
  w.resize(m);
  z.resize(diag.size(), m);
  if (m == 0) return;
  d = diag;
  e = padded_off(off, diag.size());
  Eigen::VectorXd wfull(n);
  std::vector<lapack_int> isuppz(static_cast<size_t>(2 * std::max<lapack_int>(1, m)));
  lapack_int m2 = 0;
  info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'V', n, d.data(), e.data(), vl, vu, 0, 0, 0.0, &m2,
                        wfull.data(), z.data(), n, isuppz.data());
  if (info != 0) fail("dstevr", info);
  if (m2 != m) fail("dstevr(count mismatch)", static_cast<int>(m2 - m));
  w = wfull.head(m);
}

}  // namespace dal::detail
