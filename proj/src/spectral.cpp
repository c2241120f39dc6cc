#include "dal/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dal/lapack.hpp"
#include "dal/parallel.hpp"
#include "dal/rng.hpp"

namespace dal {

namespace {

double spectral_span(const std::vector<double>& w) {
  if (w.empty()) return 1.0;
  return std::max(w.back() - w.front(), 1e-300);
}

// Extract tridiagonal storage when the pattern allows it.
bool extract_tridiagonal(const SparseSymmetricOperator& H, Eigen::VectorXd& diag, Eigen::VectorXd& off) {
  if (H.bandwidth() > 1) return false;
  const Index n = H.dimension();
  diag.setZero(n);
  off.setZero(std::max<Index>(n - 1, 0));
  const auto& row_ptr = H.row_ptr();
  for (Index r = 0; r < n; ++r) {
    for (Index k = row_ptr[static_cast<size_t>(r)]; k < row_ptr[static_cast<size_t>(r) + 1]; ++k) {
      Index c = H.cols()[static_cast<size_t>(k)];
      double v = H.values()[static_cast<size_t>(k)];
      if (c == r)
        diag[r] = v;
      else if (c == r + 1)
        off[r] = v;
    }
  }
  return true;
}

std::vector<double> compute_residuals(const SparseSymmetricOperator& H, const SpectralResult& res) {
  const Index n = H.dimension();
  std::vector<double> r(res.eigenvalues.size());
  std::vector<double> hx(static_cast<size_t>(n));
  for (Index j = 0; j < static_cast<Index>(res.eigenvalues.size()); ++j) {
    Eigen::VectorXd v = res.eigenvectors.col(j);
    H.matvec(std::span<const double>(v.data(), static_cast<size_t>(n)),
             std::span<double>(hx.data(), static_cast<size_t>(n)));
    double s = 0.0;
    for (Index i = 0; i < n; ++i) {
      double d = hx[static_cast<size_t>(i)] - res.eigenvalues[static_cast<size_t>(j)] * v[i];
      s += d * d;
    }
    r[static_cast<size_t>(j)] = std::sqrt(s);
  }
  return r;
}

void check_contracts(const SparseSymmetricOperator& H, SpectralResult& res, bool full_spectrum) {
  res.tolerance = 1e-10 * spectral_span(res.eigenvalues);
  if (res.has_vectors()) {
    res.residuals = compute_residuals(H, res);
    for (double r : res.residuals)
      if (!(r <= std::max(res.tolerance, 1e-12))) {
        std::ostringstream os;
        os << "eigensolver residual contract violated: " << r << " > " << res.tolerance;
        throw SolverError(os.str());
      }
  }
  if (H.has_bounds() && full_spectrum && !res.eigenvalues.empty()) {
    const double slack = 1e-9 * std::max(1.0, H.bound_hi() - H.bound_lo());
    if (res.eigenvalues.front() < H.bound_lo() - slack ||
        res.eigenvalues.back() > H.bound_hi() + slack) {
      std::ostringstream os;
      os << "spectrum escapes bound hints [" << H.bound_lo() << ", " << H.bound_hi()
         << "]: lambda_min=" << res.eigenvalues.front() << " lambda_max=" << res.eigenvalues.back();
      throw SolverError(os.str());
    }
  }
}

}  // namespace

SpectralResult eig_full(const SparseSymmetricOperator& H, bool want_vectors, Index dense_threshold) {
  const Index n = H.dimension();
  if (n > dense_threshold)
    throw std::invalid_argument("eig_full: dimension " + std::to_string(n) +
                                " exceeds dense threshold " + std::to_string(dense_threshold));
  SpectralResult res;
  Eigen::VectorXd diag, off;
  if (extract_tridiagonal(H, diag, off)) {
    Eigen::MatrixXd z;
    detail::tridiag_eig(diag, off, want_vectors ? &z : nullptr);
    res.eigenvalues.assign(diag.data(), diag.data() + n);
    if (want_vectors) res.eigenvectors = std::move(z);
  } else {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    const auto& row_ptr = H.row_ptr();
    for (Index r = 0; r < n; ++r)
      for (Index k = row_ptr[static_cast<size_t>(r)]; k < row_ptr[static_cast<size_t>(r) + 1]; ++k)
        A(r, H.cols()[static_cast<size_t>(k)]) = H.values()[static_cast<size_t>(k)];
    Eigen::VectorXd w;
    detail::sym_eig(A, w, want_vectors);
    res.eigenvalues.assign(w.data(), w.data() + n);
    if (want_vectors) res.eigenvectors = std::move(A);
  }
  check_contracts(H, res, true);
  return res;
}

namespace {

SpectralResult lanczos_extremal(const SparseSymmetricOperator& H, int k, Side side, double tol) {
  const Index n = H.dimension();
  const Index max_m = std::min<Index>(n, std::max<Index>(60 * k, 1000));
  Eigen::MatrixXd V(n, max_m);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(max_m);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(max_m);

  // Deterministic start vector; keyed by the dimension so repeated solves
  // of the same operator reproduce bit-identical iterations.
  RandomStream rng = make_stream(0x1a2c05ULL, StreamPurpose::TestVectors, 0,
                                 static_cast<std::uint64_t>(n));
  Eigen::VectorXd v(n), w(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.uniform01() - 0.5;
  v.normalize();
  V.col(0) = v;

  Index m = 0;
  bool exhausted = false;
  Eigen::VectorXd ritz_vals;
  Eigen::MatrixXd ritz_small;

  auto ritz_converged = [&](Index steps, double b) {
    Eigen::VectorXd d = alpha.head(steps), e = beta.head(std::max<Index>(steps - 1, 0));
    Eigen::MatrixXd s;
    detail::tridiag_eig(d, e, &s);
    ritz_vals = d;
    ritz_small = s;
    if (steps < k) return false;
    for (int j = 0; j < k; ++j) {
      Index col = (side == Side::Low) ? j : steps - 1 - j;
      // |beta_m * s(last, col)| bounds the Ritz residual.
      if (std::abs(b * s(steps - 1, col)) > 0.5 * tol) return false;
    }
    return true;
  };

  double b = 0.0;
  while (m < max_m) {
    H.matvec(std::span<const double>(V.col(m).data(), static_cast<size_t>(n)),
             std::span<double>(w.data(), static_cast<size_t>(n)));
    alpha[m] = V.col(m).dot(w);
    w -= alpha[m] * V.col(m);
    if (m > 0) w -= beta[m - 1] * V.col(m - 1);
    for (int sweep = 0; sweep < 2; ++sweep)  // full reorthogonalization
      for (Index j = 0; j <= m; ++j) w -= (V.col(j).dot(w)) * V.col(j);
    b = w.norm();
    ++m;

    const Index stride = m > 200 ? 25 : 8;  // Ritz solves get cubic in m
    const bool check_now = (m % stride == 0) || m == max_m || m == n || b < 1e-13;
    if (check_now && ritz_converged(m, b)) break;
    if (m == max_m || m == n) {
      if (m == n) exhausted = true;
      break;
    }

    if (b < 1e-13 * std::max(1.0, std::abs(alpha[m - 1]))) {
      // Invariant subspace hit; continue in its orthogonal complement with
      // a decoupled block (beta = 0).
      for (Index i = 0; i < n; ++i) w[i] = rng.uniform01() - 0.5;
      for (int sweep = 0; sweep < 2; ++sweep)
        for (Index j = 0; j < m; ++j) w -= (V.col(j).dot(w)) * V.col(j);
      double nb = w.norm();
      if (nb < 1e-12) {
        exhausted = true;
        ritz_converged(m, 0.0);
        break;
      }
      beta[m - 1] = 0.0;
      V.col(m) = w / nb;
    } else {
      beta[m - 1] = b;
      V.col(m) = w / b;
    }
  }

  if (ritz_vals.size() == 0) ritz_converged(m, b);
  const Index got = std::min<Index>(k, ritz_vals.size());
  SpectralResult res;
  res.iterations = static_cast<int>(m);
  res.eigenvalues.resize(static_cast<size_t>(got));
  res.eigenvectors.resize(n, got);
  for (Index j = 0; j < got; ++j) {
    Index col = (side == Side::Low) ? j : ritz_vals.size() - got + j;
    res.eigenvalues[static_cast<size_t>(j)] = ritz_vals[col];
    res.eigenvectors.col(j) = V.leftCols(m) * ritz_small.col(col);
    res.eigenvectors.col(j).normalize();
  }
  if (side == Side::High)
    std::sort(res.eigenvalues.begin(), res.eigenvalues.end());  // already ascending; keep contract

  res.residuals = compute_residuals(H, res);
  res.tolerance = tol;
  double worst = 0.0;
  for (double r : res.residuals) worst = std::max(worst, r);
  if (worst > tol && !exhausted) {
    std::ostringstream os;
    os << "lanczos: not converged after " << m << " iterations; best residual " << worst
       << " exceeds tol " << tol;
    throw SolverError(os.str());
  }
  if (worst > tol) {
    std::ostringstream os;
    os << "lanczos: residual " << worst << " exceeds tol " << tol << " after exhausting the space";
    throw SolverError(os.str());
  }
  return res;
}

}  // namespace

SpectralResult eig_extremal(const SparseSymmetricOperator& H, int k, Side side, double tol) {
  const Index n = H.dimension();
  if (k < 1) throw std::invalid_argument("eig_extremal: k must be >= 1");
  if (k > n) throw std::invalid_argument("eig_extremal: k exceeds dimension");

  Eigen::VectorXd diag, off;
  if (extract_tridiagonal(H, diag, off)) {
    // Exact selected-pair path for banded d=1 operators.
    int il = (side == Side::Low) ? 1 : static_cast<int>(n) - k + 1;
    int iu = (side == Side::Low) ? k : static_cast<int>(n);
    Eigen::VectorXd w;
    Eigen::MatrixXd z;
    detail::tridiag_selected(diag, off, il, iu, w, z);
    SpectralResult res;
    res.eigenvalues.assign(w.data(), w.data() + w.size());
    res.eigenvectors = std::move(z);
    res.iterations = 0;
    res.residuals = compute_residuals(H, res);
    res.tolerance = tol;
    for (double r : res.residuals)
      if (r > tol) throw SolverError("tridiagonal selected solve residual " + std::to_string(r) +
                                     " exceeds tol");
    return res;
  }
  return lanczos_extremal(H, k, side, tol);
}

ProjectionBasis spectral_projection_basis(const SparseSymmetricOperator& H, double lo, double hi,
                                          Index dense_threshold) {
  if (!(lo <= hi)) throw std::invalid_argument("spectral_projection_basis: empty interval");
  ProjectionBasis basis;
  basis.lo = lo;
  basis.hi = hi;
  const Index n = H.dimension();
  const double span_hint = H.has_bounds() ? std::max(H.bound_hi() - H.bound_lo(), 1.0) : 1.0;
  const double member_tol = 1e-12 * span_hint;

  auto select_from = [&](const SpectralResult& res) {
    std::vector<Index> keep;
    for (Index j = 0; j < res.count(); ++j) {
      double l = res.eigenvalues[static_cast<size_t>(j)];
      if (l >= lo - member_tol && l <= hi + member_tol) keep.push_back(j);
    }
    basis.basis.resize(n, static_cast<Index>(keep.size()));
    for (size_t j = 0; j < keep.size(); ++j) {
      basis.basis.col(static_cast<Index>(j)) = res.eigenvectors.col(keep[j]);
      basis.eigenvalues.push_back(res.eigenvalues[static_cast<size_t>(keep[j])]);
    }
  };

  Eigen::VectorXd diag, off;
  if (extract_tridiagonal(H, diag, off)) {
    // Value-range tridiagonal solve; memory stays at n x dim(P).
    Eigen::VectorXd w;
    Eigen::MatrixXd z;
    detail::tridiag_selected_range(diag, off, lo - member_tol, hi + member_tol, w, z);
    basis.basis = std::move(z);
    basis.eigenvalues.assign(w.data(), w.data() + w.size());
    return basis;
  }
  if (n <= dense_threshold) {
    select_from(eig_full(H, true, dense_threshold));
    return basis;
  }
  if (!H.has_bounds())
    throw std::invalid_argument("spectral_projection_basis: large box without spectral bound hints");
  const bool touches_low = lo <= H.bound_lo() + member_tol;
  const bool touches_high = hi >= H.bound_hi() - member_tol;
  if (!touches_low && !touches_high)
    throw std::invalid_argument(
        "spectral_projection_basis: interior intervals require the dense path");
  const Side side = touches_low ? Side::Low : Side::High;
  int k = 8;
  const int cap = static_cast<int>(std::min<Index>(n, 2048));
  for (;;) {
    SpectralResult res = eig_extremal(H, k, side, 1e-9);
    const double edge = (side == Side::Low) ? res.eigenvalues.back() : res.eigenvalues.front();
    const bool covered = (side == Side::Low) ? (edge > hi + member_tol) : (edge < lo - member_tol);
    if (covered || k >= cap) {
      select_from(res);
      return basis;
    }
    k = std::min(cap, 2 * k);
  }
}

double dist_to_spectrum(const SpectralResult& res, double E) {
  if (res.eigenvalues.empty()) throw std::invalid_argument("dist_to_spectrum: empty spectrum");
  auto it = std::lower_bound(res.eigenvalues.begin(), res.eigenvalues.end(), E);
  double best = std::numeric_limits<double>::infinity();
  if (it != res.eigenvalues.end()) best = std::min(best, *it - E);
  if (it != res.eigenvalues.begin()) best = std::min(best, E - *(it - 1));
  return best;
}

IDSCurve estimate_ids(const DeloneSet& D, const DisorderSpec& disorder, Index L,
                      const std::vector<LatticePoint>& centers, int nsamples,
                      const std::vector<double>& energy_grid, std::uint64_t master_seed) {
  if (centers.empty()) throw std::invalid_argument("estimate_ids: need at least one center");
  if (nsamples < 1) throw std::invalid_argument("estimate_ids: nsamples must be >= 1");
  if (!std::is_sorted(energy_grid.begin(), energy_grid.end()))
    throw std::invalid_argument("estimate_ids: energy grid must be sorted");

  IDSCurve curve;
  curve.energies = energy_grid;
  curve.L = L;
  curve.nsamples = nsamples;
  const size_t ne = energy_grid.size();
  std::vector<std::vector<double>> center_mean(centers.size(), std::vector<double>(ne, 0.0));

  for (size_t ci = 0; ci < centers.size(); ++ci) {
    BoxSpec box(centers[ci], L);
    const double vol = static_cast<double>(box.site_count());
    std::vector<std::vector<double>> per_sample(static_cast<size_t>(nsamples));
    parallel_for(nsamples, [&](Index s) {
      auto sample = sample_potential(D, box, disorder, master_seed, static_cast<std::uint64_t>(s));
      auto H = assemble_hamiltonian(box, D, sample, disorder.support_max());
      auto res = eig_full(H, false);
      auto& curve = per_sample[static_cast<size_t>(s)];
      curve.resize(ne);
      for (size_t e = 0; e < ne; ++e) {
        auto it = std::upper_bound(res.eigenvalues.begin(), res.eigenvalues.end(), energy_grid[e]);
        curve[e] = double(it - res.eigenvalues.begin()) / vol;
      }
    });
    for (int s = 0; s < nsamples; ++s)  // fixed-order reduction keeps results bit-stable
      for (size_t e = 0; e < ne; ++e) center_mean[ci][e] += per_sample[static_cast<size_t>(s)][e];
    for (auto& v : center_mean[ci]) v /= nsamples;
  }

  curve.mean.assign(ne, 0.0);
  curve.center_min.assign(ne, std::numeric_limits<double>::infinity());
  curve.center_max.assign(ne, -std::numeric_limits<double>::infinity());
  curve.center_spread.assign(ne, 0.0);
  for (size_t e = 0; e < ne; ++e) {
    for (size_t ci = 0; ci < centers.size(); ++ci) {
      curve.mean[e] += center_mean[ci][e];
      curve.center_min[e] = std::min(curve.center_min[e], center_mean[ci][e]);
      curve.center_max[e] = std::max(curve.center_max[e], center_mean[ci][e]);
    }
    curve.mean[e] /= double(centers.size());
    curve.center_spread[e] = curve.center_max[e] - curve.center_min[e];
    curve.uniformity = std::max(curve.uniformity, curve.center_spread[e]);
  }
  return curve;
}

}  // namespace dal
