#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <tuple>
#include <vector>

#include "dal/disorder.hpp"
#include "dal/geometry.hpp"
#include "dal/types.hpp"

namespace dal {

/// The cube Lambda_L(x): (2L+1)^d sites in frozen lexicographic order
/// (axis 0 slowest), so (seed, sample_index) -> draws is bit-reproducible.
struct BoxSpec {
  LatticePoint center;
  Index half_width = 0;

  BoxSpec() = default;
  BoxSpec(LatticePoint c, Index L) : center(std::move(c)), half_width(L) {
    if (half_width < 0) throw std::invalid_argument("box: half width must be >= 0");
  }
  int dim() const { return center.dim(); }
  Window window() const { return Window::cube(center, half_width); }
  Index site_count() const { return window().site_count(); }
  friend bool operator==(const BoxSpec& a, const BoxSpec& b) {
    return a.center == b.center && a.half_width == b.half_width;
  }
};

/// One disorder realization on D ∩ Lambda_L(x). Values are indexed by the
/// box-local site index; dsite_indices lists the D-sites in box order.
struct PotentialSample {
  BoxSpec box;
  std::vector<Index> dsite_indices;
  std::vector<double> values;
  std::uint64_t master_seed = 0;
  std::uint64_t sample_index = 0;
};

/// Symmetric sparse matrix in compressed row form with optional spectral
/// bound hints. Assembly guarantees exact entrywise symmetry.
class SparseSymmetricOperator {
 public:
  SparseSymmetricOperator(Index n, std::vector<Index> row_ptr, std::vector<Index> cols,
                          std::vector<double> vals);

  Index dimension() const { return n_; }
  const std::vector<Index>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& cols() const { return cols_; }
  const std::vector<double>& values() const { return vals_; }
  Index nnz() const { return static_cast<Index>(vals_.size()); }

  bool has_bounds() const { return has_bounds_; }
  double bound_lo() const { return lo_; }
  double bound_hi() const { return hi_; }
  void set_bounds(double lo, double hi) {
    lo_ = lo;
    hi_ = hi;
    has_bounds_ = true;
  }

  double entry(Index r, Index c) const;
  /// Half-bandwidth of the stored pattern (0 = diagonal, 1 = tridiagonal).
  Index bandwidth() const;

  void matvec(std::span<const double> x, std::span<double> y) const;
  void matvec(std::span<const std::complex<double>> x, std::span<std::complex<double>> y) const;
  double quadratic_form(std::span<const double> x) const;  // <Hx, x>

  bool is_symmetric() const;

 private:
  Index n_;
  std::vector<Index> row_ptr_, cols_;
  std::vector<double> vals_;
  double lo_ = 0.0, hi_ = 0.0;
  bool has_bounds_ = false;
};

/// Builder used by all assembly routines; collects (i, j, v) with i <= j
/// and mirrors on finalize.
class OperatorBuilder {
 public:
  explicit OperatorBuilder(Index n) : n_(n), diag_(static_cast<size_t>(n), 0.0) {}
  void add_diagonal(Index i, double v) { diag_[static_cast<size_t>(i)] += v; }
  void add_offdiag(Index i, Index j, double v);
  SparseSymmetricOperator build() const;

 private:
  Index n_;
  std::vector<double> diag_;
  std::vector<std::tuple<Index, Index, double>> off_;
};

// -- Assembly -----------------------------------------------------------------

/// Simple (Dirichlet) restriction of the graph Laplacian: diagonal 2d,
/// -1 between box-internal nearest neighbors. 0 <= H <= 4d.
SparseSymmetricOperator assemble_laplacian(const BoxSpec& box);

/// I.i.d. draws from the law, one per site of D ∩ Lambda_L(x), assigned in
/// box order and keyed by (master_seed, sample_index) only.
PotentialSample sample_potential(const DeloneSet& D, const BoxSpec& box, const DisorderSpec& disorder,
                                 std::uint64_t master_seed, std::uint64_t sample_index);

/// H_omega = restricted Laplacian + omega on D-sites. Bounds [0, 4d+M].
SparseSymmetricOperator assemble_hamiltonian(const BoxSpec& box, const DeloneSet& D,
                                             const PotentialSample& sample, double support_max);

/// V_{x,L}: indicator of D on the box, as a diagonal vector in box order.
std::vector<double> assemble_deterministic_delone_potential(const BoxSpec& box, const DeloneSet& D);

/// Reflected operator assembled from its defining decomposition:
/// (Delta + 4d) restricted, plus M on complement sites, plus M - omega on
/// D-sites. Spectrum is (4d+M) - spectrum(H_omega), reversed.
SparseSymmetricOperator assemble_reflected(const BoxSpec& box, const DeloneSet& D,
                                           const PotentialSample& sample, double support_max);

/// The affine route -H + shift*I, for cross-checking assemble_reflected.
SparseSymmetricOperator reflect_operator(const SparseSymmetricOperator& H, double shift);

/// W(n) = (4RK+1)^{-d} sum_{|gamma|_inf <= 2RK} V(n - gamma), V extended by
/// zero outside the box. Requires L > R*K.
std::vector<double> averaged_potential(std::span<const double> diagonal, const BoxSpec& box, Index R,
                                       Index K);

/// Coordinate-triplet export, `row col value` with 17 significant digits.
void export_operator(const SparseSymmetricOperator& H, std::ostream& out);
void export_operator_file(const SparseSymmetricOperator& H, const std::string& path);

}  // namespace dal
