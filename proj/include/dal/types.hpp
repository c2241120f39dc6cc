#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace dal {

using Index = std::int64_t;

/// Thrown when a point set has no finite relative-denseness parameter
/// within its window (empty set, or an empty window-spanning cube).
class NonDeloneError : public std::runtime_error {
 public:
  explicit NonDeloneError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown by eigensolvers and propagators on residual/drift contract
/// violations or non-convergence. Always carries the best achieved
/// residual in the message; failures are never silent.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on malformed experiment configs and file formats.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A point of Z^d. coords.size() is the ambient dimension.
struct LatticePoint {
  std::vector<Index> coords;

  LatticePoint() = default;
  explicit LatticePoint(std::vector<Index> c) : coords(std::move(c)) {}
  static LatticePoint zero(int d) { return LatticePoint(std::vector<Index>(d, 0)); }
  static LatticePoint constant(int d, Index v) { return LatticePoint(std::vector<Index>(d, v)); }

  int dim() const { return static_cast<int>(coords.size()); }
  Index operator[](int i) const { return coords[static_cast<size_t>(i)]; }
  Index& operator[](int i) { return coords[static_cast<size_t>(i)]; }

  Index norm_inf() const {
    Index m = 0;
    for (Index c : coords) m = std::max(m, c < 0 ? -c : c);
    return m;
  }
  Index norm_1() const {
    Index s = 0;
    for (Index c : coords) s += (c < 0 ? -c : c);
    return s;
  }
  double norm_2_sq() const {
    double s = 0;
    for (Index c : coords) s += double(c) * double(c);
    return s;
  }

  friend LatticePoint operator+(const LatticePoint& a, const LatticePoint& b) {
    LatticePoint r = a;
    for (int i = 0; i < a.dim(); ++i) r[i] += b[i];
    return r;
  }
  friend LatticePoint operator-(const LatticePoint& a, const LatticePoint& b) {
    LatticePoint r = a;
    for (int i = 0; i < a.dim(); ++i) r[i] -= b[i];
    return r;
  }
  friend bool operator==(const LatticePoint& a, const LatticePoint& b) { return a.coords == b.coords; }
  friend auto operator<=>(const LatticePoint& a, const LatticePoint& b) { return a.coords <=> b.coords; }
};

/// Axis-aligned box of Z^d with inclusive integer bounds per axis.
struct Window {
  LatticePoint lo, hi;

  Window() = default;
  Window(LatticePoint l, LatticePoint h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo.dim() != hi.dim()) throw std::invalid_argument("window: lo/hi dimension mismatch");
    for (int i = 0; i < dim(); ++i)
      if (lo[i] > hi[i]) throw std::invalid_argument("window: lo > hi on axis " + std::to_string(i));
  }
  static Window cube(const LatticePoint& center, Index half_width) {
    LatticePoint l = center, h = center;
    for (int i = 0; i < center.dim(); ++i) {
      l[i] -= half_width;
      h[i] += half_width;
    }
    return Window(l, h);
  }

  int dim() const { return lo.dim(); }
  Index extent(int axis) const { return hi[axis] - lo[axis] + 1; }
  Index min_extent() const {
    Index m = extent(0);
    for (int i = 1; i < dim(); ++i) m = std::min(m, extent(i));
    return m;
  }
  Index site_count() const {
    Index n = 1;
    for (int i = 0; i < dim(); ++i) n *= extent(i);
    return n;
  }
  bool contains(const LatticePoint& p) const {
    for (int i = 0; i < dim(); ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }
  bool contains(const Window& w) const { return contains(w.lo) && contains(w.hi); }

  /// Lexicographic rank of a point within the window (axis 0 slowest).
  Index linear_index(const LatticePoint& p) const {
    Index idx = 0;
    for (int i = 0; i < dim(); ++i) idx = idx * extent(i) + (p[i] - lo[i]);
    return idx;
  }
  LatticePoint point_at(Index idx) const {
    LatticePoint p = LatticePoint::zero(dim());
    for (int i = dim() - 1; i >= 0; --i) {
      p[i] = lo[i] + idx % extent(i);
      idx /= extent(i);
    }
    return p;
  }
  friend bool operator==(const Window& a, const Window& b) { return a.lo == b.lo && a.hi == b.hi; }
};

/// Exact rational with int64 terms; used where the certifier demands
/// closed-form arithmetic rather than floating point.
struct Fraction {
  long long num = 0;
  long long den = 1;

  Fraction() = default;
  Fraction(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("fraction: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    reduce();
  }
  void reduce() {
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  double value() const { return double(num) / double(den); }
  friend Fraction operator*(const Fraction& a, const Fraction& b) {
    return Fraction(a.num * b.num, a.den * b.den);
  }
  friend bool operator==(const Fraction& a, const Fraction& b) {
    return a.num * b.den == b.num * a.den;
  }
};

}  // namespace dal
