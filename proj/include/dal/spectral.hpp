#pragma once

#include <Eigen/Core>
#include <vector>

#include "dal/operators.hpp"
#include "dal/types.hpp"

namespace dal {

inline constexpr Index kDenseThreshold = 4096;

struct SpectralResult {
  std::vector<double> eigenvalues;  // ascending, stable tie order by solver index
  Eigen::MatrixXd eigenvectors;     // orthonormal columns; 0 columns when not requested
  std::vector<double> residuals;    // ||Hv - lambda v|| per pair, when vectors are present
  int iterations = 0;
  double tolerance = 0.0;

  bool has_vectors() const { return eigenvectors.cols() > 0; }
  Index count() const { return static_cast<Index>(eigenvalues.size()); }
  double min() const { return eigenvalues.front(); }
  double max() const { return eigenvalues.back(); }
};

enum class Side { Low, High };

/// All eigenpairs of a small operator. Tridiagonal patterns take the
/// specialized O(n^2) path; anything else is solved densely. Residual
/// contract: ||Hv - lambda v|| <= 1e-10 * spectral span, enforced.
SpectralResult eig_full(const SparseSymmetricOperator& H, bool want_vectors = true,
                        Index dense_threshold = kDenseThreshold);

/// k extremal eigenpairs. Tridiagonal operators use bisection + inverse
/// iteration; general ones a Lanczos iteration with full
/// reorthogonalization. Non-convergence throws SolverError carrying the
/// best residual.
SpectralResult eig_extremal(const SparseSymmetricOperator& H, int k, Side side, double tol = 1e-10);

struct ProjectionBasis {
  double lo = 0.0, hi = 0.0;
  std::vector<double> eigenvalues;  // of the selected eigenvectors
  Eigen::MatrixXd basis;            // orthonormal columns spanning ran P([lo,hi])
  Index dimension() const { return static_cast<Index>(basis.cols()); }
};

/// Orthonormal basis of the span of eigenvectors with eigenvalue in
/// [lo, hi] (membership tolerance 1e-12 * span). Boxes above the dense
/// threshold are served by the extremal solver when the interval touches a
/// spectral bound hint; interior intervals require the dense path.
ProjectionBasis spectral_projection_basis(const SparseSymmetricOperator& H, double lo, double hi,
                                          Index dense_threshold = kDenseThreshold);

/// min over eigenvalues of |lambda - E|; rejects empty spectra.
double dist_to_spectrum(const SpectralResult& res, double E);

struct IDSCurve {
  std::vector<double> energies;
  std::vector<double> mean;         // mean over centers of per-center sample means
  std::vector<double> center_min;   // min over centers of per-center means
  std::vector<double> center_max;
  std::vector<double> center_spread;  // per-energy max - min over center means
  double uniformity = 0.0;            // max over center pairs of sup-norm difference
  Index L = 0;
  int nsamples = 0;
};

/// Empirical IDS: per-center sample-mean eigenvalue counting functions.
/// Disorder draws are keyed by (master_seed, sample) and assigned by site
/// rank, so centers whose patterns are translates see identical samples.
IDSCurve estimate_ids(const DeloneSet& D, const DisorderSpec& disorder, Index L,
                      const std::vector<LatticePoint>& centers, int nsamples,
                      const std::vector<double>& energy_grid, std::uint64_t master_seed);

}  // namespace dal
