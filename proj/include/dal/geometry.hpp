#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dal/types.hpp"

namespace dal {

/// Finite window of a relatively dense subset of Z^d.
///
/// Points are stored as an occupancy grid over the window plus the sorted
/// (lexicographic) point list implied by it. declared_R is the relative
/// denseness parameter the producer promises: every integer-anchored cube
/// {x,...,x+R}^d fully inside the window contains at least one point.
class DeloneSet {
 public:
  DeloneSet(Window window, const std::vector<LatticePoint>& points, Index declared_R);
  DeloneSet(Window window, std::vector<std::uint8_t> occupancy, Index declared_R);

  int dim() const { return window_.dim(); }
  const Window& window() const { return window_; }
  Index declared_R() const { return declared_R_; }
  Index size() const { return npoints_; }
  bool empty() const { return npoints_ == 0; }

  bool contains(const LatticePoint& p) const {
    return window_.contains(p) && occ_[static_cast<size_t>(window_.linear_index(p))] != 0;
  }
  bool occupied(Index linear) const { return occ_[static_cast<size_t>(linear)] != 0; }
  const std::vector<std::uint8_t>& occupancy() const { return occ_; }

  /// Points in lexicographic order.
  std::vector<LatticePoint> points() const;

 private:
  Window window_;
  std::vector<std::uint8_t> occ_;
  Index npoints_ = 0;
  Index declared_R_;
};

/// Anchored window content: the occupied subset of {0,...,K}^d. Two window
/// contents are the same pattern iff the point sets are equal after the
/// anchor shift, so offsets within the cube are significant.
class Pattern {
 public:
  /// Normalizes points that do not fit {0,...,K}^d by subtracting the
  /// componentwise minimum; points already inside are kept as-is, which
  /// makes normalization idempotent.
  Pattern(int dim, Index extent, std::vector<LatticePoint> points);

  int dim() const { return dim_; }
  Index extent() const { return extent_; }
  bool empty() const { return local_.empty(); }
  Index size() const { return static_cast<Index>(local_.size()); }

  /// Sorted local linear indices within the (K+1)^d cube.
  const std::vector<Index>& local_indices() const { return local_; }
  std::vector<LatticePoint> points() const;

  friend bool operator==(const Pattern& a, const Pattern& b) {
    return a.dim_ == b.dim_ && a.extent_ == b.extent_ && a.local_ == b.local_;
  }

 private:
  Pattern() = default;
  friend Pattern pattern_at(const DeloneSet&, const LatticePoint&, Index);
  int dim_ = 1;
  Index extent_ = 0;
  std::vector<Index> local_;
};

/// Occurrence table of one pattern over a grid of box centers and scales.
struct FrequencyReport {
  struct Row {
    LatticePoint center;
    Index L = 0;
    long long hits = 0;       // occurrence count within center + Lambda_L
    long long anchors = 0;    // (2L+1)^d
    double eta = 0.0;         // hits / anchors
  };
  std::vector<Row> rows;
  double limit_estimate = 0.0;        // center-mean of eta at the largest L
  double uniformity_deviation = 0.0;  // max over centers of |eta_x - eta_x'| at the largest L
  std::vector<double> per_scale_deviation;  // same quantity per tabulated L
  bool strictly_positive = false;
};

struct RepetitionSearch {
  std::vector<LatticePoint> translations;
  bool exhausted = false;  // true when fewer than `count` disjoint copies exist in the search window
};

// -- Generators --------------------------------------------------------------

/// Lattice k Z^d clipped to the window. declared_R = max(1, k-1).
DeloneSet generate_periodic(int d, Index k, const Window& window);

/// Cut points {n : frac(n*alpha) < beta} per axis; for d > 1 the set is the
/// Cartesian product of the per-axis 1-D sets. declared_R is measured.
DeloneSet generate_sturmian(double alpha, double beta, const Window& window);

/// One uniformly chosen point per aligned cell of side floor((R+2)/2).
/// Every side-R test cube then contains a full cell, so compute_R <= R.
DeloneSet generate_random_cell(int d, Index R, const Window& window, std::uint64_t seed);

// -- Analysis ----------------------------------------------------------------

/// Smallest R (floored at 1) such that every integer-anchored cube
/// {x,...,x+R}^d fully inside the window contains a point. Throws
/// NonDeloneError when no side fits within the window.
Index compute_R(const DeloneSet& D);

/// Window content at `anchor`: D ∩ (anchor + {0,...,K}^d), shifted to the origin.
Pattern pattern_at(const DeloneSet& D, const LatticePoint& anchor, Index K);

/// Distinct window contents over all anchors whose cube lies inside the
/// window, with occurrence counts. Counts sum to the number of anchors.
std::vector<std::pair<Pattern, long long>> enumerate_patterns(const DeloneSet& D, Index K);

/// eta_{x,L}(Q): fraction of anchors y in x + Lambda_L whose window content
/// equals Q. Anchors whose cube pokes out of the window count as misses;
/// the box x + Lambda_L itself must be inside the window.
Fraction pattern_frequency(const DeloneSet& D, const Pattern& Q, const LatticePoint& x, Index L);

FrequencyReport supf_diagnostic(const DeloneSet& D, const Pattern& Q,
                                const std::vector<Index>& Ls,
                                const std::vector<LatticePoint>& centers);

/// Greedy lexicographic search for up to `count` translations v with window
/// content Q at v and pairwise disjoint anchored cubes.
RepetitionSearch find_disjoint_repetitions(const DeloneSet& D, const Pattern& Q, Index count,
                                           const Window& search);

/// window \ D with freshly computed R. Throws NonDeloneError when the
/// complement is empty or fails the denseness test within the window.
DeloneSet complement(const DeloneSet& D);

// -- File format --------------------------------------------------------------
// Header lines `# dim=`, `# R=`, `# window=lo:hi,...`, then one point per
// line as space-separated integers in lexicographic order.

void save_delone(const DeloneSet& D, std::ostream& out);
void save_delone_file(const DeloneSet& D, const std::string& path);
DeloneSet load_delone(std::istream& in);
DeloneSet load_delone_file(const std::string& path);

// Extended-precision evaluation of frac(n * alpha) used by the Sturmian
// generator; exposed for tests. Returns the fractional part and a flag for
// comparisons within 1e-15 of the cut boundary.
struct CutEvaluation {
  double frac;
  bool below;
  bool near_boundary;
};
CutEvaluation sturmian_cut(Index n, double alpha, double beta);

}  // namespace dal
