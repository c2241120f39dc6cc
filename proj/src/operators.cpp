#include "dal/operators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <tuple>

#include "dal/detail/moving_sum.hpp"

namespace dal {

SparseSymmetricOperator::SparseSymmetricOperator(Index n, std::vector<Index> row_ptr,
                                                 std::vector<Index> cols, std::vector<double> vals)
    : n_(n), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), vals_(std::move(vals)) {
  if (static_cast<Index>(row_ptr_.size()) != n_ + 1)
    throw std::invalid_argument("operator: bad row_ptr size");
  if (cols_.size() != vals_.size()) throw std::invalid_argument("operator: cols/vals size mismatch");
}

double SparseSymmetricOperator::entry(Index r, Index c) const {
  for (Index k = row_ptr_[static_cast<size_t>(r)]; k < row_ptr_[static_cast<size_t>(r) + 1]; ++k)
    if (cols_[static_cast<size_t>(k)] == c) return vals_[static_cast<size_t>(k)];
  return 0.0;
}

Index SparseSymmetricOperator::bandwidth() const {
  Index bw = 0;
  for (Index r = 0; r < n_; ++r)
    for (Index k = row_ptr_[static_cast<size_t>(r)]; k < row_ptr_[static_cast<size_t>(r) + 1]; ++k)
      bw = std::max(bw, std::abs(cols_[static_cast<size_t>(k)] - r));
  return bw;
}

void SparseSymmetricOperator::matvec(std::span<const double> x, std::span<double> y) const {
  for (Index r = 0; r < n_; ++r) {
    double acc = 0.0;
    for (Index k = row_ptr_[static_cast<size_t>(r)]; k < row_ptr_[static_cast<size_t>(r) + 1]; ++k)
      acc += vals_[static_cast<size_t>(k)] * x[static_cast<size_t>(cols_[static_cast<size_t>(k)])];
    y[static_cast<size_t>(r)] = acc;
  }
}

void SparseSymmetricOperator::matvec(std::span<const std::complex<double>> x,
                                     std::span<std::complex<double>> y) const {
  for (Index r = 0; r < n_; ++r) {
    std::complex<double> acc = 0.0;
    for (Index k = row_ptr_[static_cast<size_t>(r)]; k < row_ptr_[static_cast<size_t>(r) + 1]; ++k)
      acc += vals_[static_cast<size_t>(k)] * x[static_cast<size_t>(cols_[static_cast<size_t>(k)])];
    y[static_cast<size_t>(r)] = acc;
  }
}

double SparseSymmetricOperator::quadratic_form(std::span<const double> x) const {
  double acc = 0.0;
  for (Index r = 0; r < n_; ++r) {
    double row = 0.0;
    for (Index k = row_ptr_[static_cast<size_t>(r)]; k < row_ptr_[static_cast<size_t>(r) + 1]; ++k)
      row += vals_[static_cast<size_t>(k)] * x[static_cast<size_t>(cols_[static_cast<size_t>(k)])];
    acc += row * x[static_cast<size_t>(r)];
  }
  return acc;
}

bool SparseSymmetricOperator::is_symmetric() const {
  for (Index r = 0; r < n_; ++r)
    for (Index k = row_ptr_[static_cast<size_t>(r)]; k < row_ptr_[static_cast<size_t>(r) + 1]; ++k) {
      Index c = cols_[static_cast<size_t>(k)];
      if (entry(c, r) != vals_[static_cast<size_t>(k)]) return false;
    }
  return true;
}

void OperatorBuilder::add_offdiag(Index i, Index j, double v) {
  if (i == j) throw std::invalid_argument("builder: use add_diagonal for diagonal entries");
  if (i > j) std::swap(i, j);
  off_.emplace_back(i, j, v);
}

SparseSymmetricOperator OperatorBuilder::build() const {
  // One pass to count entries per row (diagonal always stored), then fill.
  std::vector<Index> counts(static_cast<size_t>(n_), 1);
  for (const auto& [i, j, v] : off_) {
    ++counts[static_cast<size_t>(i)];
    ++counts[static_cast<size_t>(j)];
  }
  std::vector<Index> row_ptr(static_cast<size_t>(n_) + 1, 0);
  for (Index r = 0; r < n_; ++r) row_ptr[static_cast<size_t>(r) + 1] = row_ptr[static_cast<size_t>(r)] + counts[static_cast<size_t>(r)];
  std::vector<Index> cols(static_cast<size_t>(row_ptr.back()));
  std::vector<double> vals(static_cast<size_t>(row_ptr.back()));
  std::vector<Index> cursor(row_ptr.begin(), row_ptr.end() - 1);
  for (Index r = 0; r < n_; ++r) {
    cols[static_cast<size_t>(cursor[static_cast<size_t>(r)])] = r;
    vals[static_cast<size_t>(cursor[static_cast<size_t>(r)])] = diag_[static_cast<size_t>(r)];
    ++cursor[static_cast<size_t>(r)];
  }
  for (const auto& [i, j, v] : off_) {
    cols[static_cast<size_t>(cursor[static_cast<size_t>(i)])] = j;
    vals[static_cast<size_t>(cursor[static_cast<size_t>(i)])] = v;
    ++cursor[static_cast<size_t>(i)];
    cols[static_cast<size_t>(cursor[static_cast<size_t>(j)])] = i;
    vals[static_cast<size_t>(cursor[static_cast<size_t>(j)])] = v;
    ++cursor[static_cast<size_t>(j)];
  }
  // Sort columns within each row for reproducible storage.
  std::vector<std::pair<Index, double>> tmp;
  std::vector<Index> out_cols(cols.size());
  std::vector<double> out_vals(vals.size());
  for (Index r = 0; r < n_; ++r) {
    tmp.clear();
    for (Index k = row_ptr[static_cast<size_t>(r)]; k < row_ptr[static_cast<size_t>(r) + 1]; ++k)
      tmp.emplace_back(cols[static_cast<size_t>(k)], vals[static_cast<size_t>(k)]);
    std::sort(tmp.begin(), tmp.end());
    Index k = row_ptr[static_cast<size_t>(r)];
    for (const auto& [c, v] : tmp) {
      out_cols[static_cast<size_t>(k)] = c;
      out_vals[static_cast<size_t>(k)] = v;
      ++k;
    }
  }
  return SparseSymmetricOperator(n_, std::move(row_ptr), std::move(out_cols), std::move(out_vals));
}

// -- Assembly -------------------------------------------------------------------

SparseSymmetricOperator assemble_laplacian(const BoxSpec& box) {
  const int d = box.dim();
  const Window w = box.window();
  const Index n = w.site_count();
  OperatorBuilder b(n);
  for (Index i = 0; i < n; ++i) {
    b.add_diagonal(i, 2.0 * d);
    LatticePoint p = w.point_at(i);
    for (int a = 0; a < d; ++a) {
      if (p[a] + 1 <= w.hi[a]) {
        LatticePoint q = p;
        ++q[a];
        b.add_offdiag(i, w.linear_index(q), -1.0);
      }
    }
  }
  auto H = b.build();
  H.set_bounds(0.0, 4.0 * d);
  return H;
}

PotentialSample sample_potential(const DeloneSet& D, const BoxSpec& box, const DisorderSpec& disorder,
                                 std::uint64_t master_seed, std::uint64_t sample_index) {
  const Window w = box.window();
  if (!D.window().contains(w))
    throw std::invalid_argument("sample_potential: box exceeds the Delone window");
  PotentialSample s;
  s.box = box;
  s.master_seed = master_seed;
  s.sample_index = sample_index;
  // Draws are consumed in box order (site rank), so boxes whose D-contents
  // are translates of each other receive identical values.
  RandomStream rng = make_stream(master_seed, StreamPurpose::Potential, 0, sample_index);
  for (Index i = 0; i < w.site_count(); ++i) {
    if (D.contains(w.point_at(i))) {
      s.dsite_indices.push_back(i);
      s.values.push_back(disorder.sample(rng));
    }
  }
  return s;
}

namespace {

// The reflected assembly derives complement sites from the sample, so the
// sample's D-site list must be exactly D ∩ box.
void validate_sample(const DeloneSet& D, const BoxSpec& box, const PotentialSample& sample,
                     const char* where) {
  if (!(sample.box == box)) throw std::invalid_argument(std::string(where) + ": box/sample mismatch");
  const Window w = box.window();
  size_t k = 0;
  for (Index i = 0; i < w.site_count(); ++i) {
    bool in_d = D.contains(w.point_at(i));
    bool listed = k < sample.dsite_indices.size() && sample.dsite_indices[k] == i;
    if (in_d != listed)
      throw std::invalid_argument(std::string(where) + ": sample sites do not match D ∩ box");
    if (listed) ++k;
  }
  if (k != sample.dsite_indices.size())
    throw std::invalid_argument(std::string(where) + ": sample sites do not match D ∩ box");
}

}  // namespace

SparseSymmetricOperator assemble_hamiltonian(const BoxSpec& box, const DeloneSet& D,
                                             const PotentialSample& sample, double support_max) {
  validate_sample(D, box, sample, "assemble_hamiltonian");
  const int d = box.dim();
  const Window w = box.window();
  const Index n = w.site_count();
  OperatorBuilder b(n);
  for (Index i = 0; i < n; ++i) {
    b.add_diagonal(i, 2.0 * d);
    LatticePoint p = w.point_at(i);
    for (int a = 0; a < d; ++a) {
      if (p[a] + 1 <= w.hi[a]) {
        LatticePoint q = p;
        ++q[a];
        b.add_offdiag(i, w.linear_index(q), -1.0);
      }
    }
  }
  for (size_t k = 0; k < sample.dsite_indices.size(); ++k)
    b.add_diagonal(sample.dsite_indices[k], sample.values[k]);
  auto H = b.build();
  H.set_bounds(0.0, 4.0 * d + support_max);
  return H;
}

std::vector<double> assemble_deterministic_delone_potential(const BoxSpec& box, const DeloneSet& D) {
  const Window w = box.window();
  if (!D.window().contains(w))
    throw std::invalid_argument("delone_potential: box exceeds the Delone window");
  std::vector<double> v(static_cast<size_t>(w.site_count()), 0.0);
  for (Index i = 0; i < w.site_count(); ++i)
    if (D.contains(w.point_at(i))) v[static_cast<size_t>(i)] = 1.0;
  return v;
}

SparseSymmetricOperator assemble_reflected(const BoxSpec& box, const DeloneSet& D,
                                           const PotentialSample& sample, double support_max) {
  validate_sample(D, box, sample, "assemble_reflected");
  const int d = box.dim();
  const double M = support_max;
  const Window w = box.window();
  const Index n = w.site_count();
  std::vector<std::uint8_t> on_d(static_cast<size_t>(n), 0);
  for (Index i : sample.dsite_indices) on_d[static_cast<size_t>(i)] = 1;

  OperatorBuilder b(n);
  for (Index i = 0; i < n; ++i) {
    // (Delta + 4d) restricted: diagonal -2d + 4d = 2d, off-diagonal +1.
    b.add_diagonal(i, 2.0 * d);
    if (!on_d[static_cast<size_t>(i)]) b.add_diagonal(i, M);  // background on the complement
    LatticePoint p = w.point_at(i);
    for (int a = 0; a < d; ++a) {
      if (p[a] + 1 <= w.hi[a]) {
        LatticePoint q = p;
        ++q[a];
        b.add_offdiag(i, w.linear_index(q), 1.0);
      }
    }
  }
  for (size_t k = 0; k < sample.dsite_indices.size(); ++k)
    b.add_diagonal(sample.dsite_indices[k], M - sample.values[k]);  // reflected couplings
  auto H = b.build();
  H.set_bounds(0.0, 4.0 * d + M);
  return H;
}

SparseSymmetricOperator reflect_operator(const SparseSymmetricOperator& H, double shift) {
  std::vector<double> vals = H.values();
  const auto& row_ptr = H.row_ptr();
  const auto& cols = H.cols();
  for (Index r = 0; r < H.dimension(); ++r) {
    for (Index k = row_ptr[static_cast<size_t>(r)]; k < row_ptr[static_cast<size_t>(r) + 1]; ++k) {
      vals[static_cast<size_t>(k)] = -vals[static_cast<size_t>(k)];
      if (cols[static_cast<size_t>(k)] == r) vals[static_cast<size_t>(k)] += shift;
    }
  }
  auto out = SparseSymmetricOperator(H.dimension(), row_ptr, cols, std::move(vals));
  if (H.has_bounds()) out.set_bounds(shift - H.bound_hi(), shift - H.bound_lo());
  return out;
}

std::vector<double> averaged_potential(std::span<const double> diagonal, const BoxSpec& box, Index R,
                                       Index K) {
  if (R < 1 || K < 1) throw std::invalid_argument("averaged_potential: R and K must be >= 1");
  if (box.half_width <= R * K)
    throw std::invalid_argument("averaged_potential: requires L > R*K");
  const Window w = box.window();
  if (static_cast<Index>(diagonal.size()) != w.site_count())
    throw std::invalid_argument("averaged_potential: diagonal size mismatch");
  std::vector<Index> dims(static_cast<size_t>(box.dim()));
  for (int a = 0; a < box.dim(); ++a) dims[static_cast<size_t>(a)] = w.extent(a);
  std::vector<double> v(diagonal.begin(), diagonal.end());
  auto sums = detail::moving_sum_same(v, dims, 2 * R * K);
  const double scale = std::pow(double(4 * R * K + 1), -box.dim());
  for (auto& s : sums) s *= scale;
  return sums;
}

void export_operator(const SparseSymmetricOperator& H, std::ostream& out) {
  char buf[64];
  const auto& row_ptr = H.row_ptr();
  for (Index r = 0; r < H.dimension(); ++r) {
    for (Index k = row_ptr[static_cast<size_t>(r)]; k < row_ptr[static_cast<size_t>(r) + 1]; ++k) {
      std::snprintf(buf, sizeof(buf), "%lld %lld %.17g", static_cast<long long>(r),
                    static_cast<long long>(H.cols()[static_cast<size_t>(k)]),
                    H.values()[static_cast<size_t>(k)]);
      out << buf << "\n";
    }
  }
}

void export_operator_file(const SparseSymmetricOperator& H, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open for writing: " + path);
  export_operator(H, f);
}

}  // namespace dal
