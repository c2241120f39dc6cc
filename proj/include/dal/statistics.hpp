#pragma once

#include <vector>

#include "dal/operators.hpp"
#include "dal/spectral.hpp"
#include "dal/types.hpp"

namespace dal {

/// Wilson score interval at 95% by default.
struct ConfidenceInterval {
  double lo = 0.0, hi = 1.0;
};
ConfidenceInterval wilson_interval(long long successes, long long trials, double z = 1.959963984540054);

struct WegnerCell {
  double E = 0.0;
  double eta = 0.0;
  Index L = 0;
  int center_index = 0;
  LatticePoint center;
  long long nsamples = 0;
  long long hits = 0;
  double phat = 0.0;
  double ci_lo = 0.0, ci_hi = 1.0;
};

struct WegnerReport {
  std::vector<WegnerCell> cells;
  std::vector<LatticePoint> centers;
  double E = 0.0;
  double threshold_ew = 0.0;  // Lemma threshold for the set's measured R
  bool above_threshold_warning = false;
  std::uint64_t master_seed = 0;
};

/// Empirical P(dist(sigma(H_{omega,x,L}), E) <= eta) on a grid of
/// (eta, L, center) cells; one sample set per (L, center) is shared across
/// the eta column, so eta -> phat is nondecreasing by construction.
/// Disorder streams are keyed by (master_seed, center index, sample index).
WegnerReport wegner_scan(const DeloneSet& D, const DisorderSpec& disorder, double E,
                         const std::vector<double>& etas, const std::vector<Index>& Ls,
                         const std::vector<LatticePoint>& centers, int nsamples,
                         std::uint64_t master_seed);

struct QWFit {
  double q_w = 0.0;        // max over cells of ci_hi / (eta * |Lambda_L|)
  double uniformity = 1.0; // max / min of the per-center Q_W
};

/// The volume factor is the site count (2L+1)^d, so the single-site box
/// (L = 0) stays meaningful. Rejects cells with eta = 0.
QWFit fit_QW(const WegnerReport& report);

struct ILSECell {
  Index L = 0;
  int center_index = 0;
  LatticePoint center;
  std::vector<double> lambda_min;  // per-sample, sample order
};

struct ILSEReport {
  std::vector<ILSECell> cells;
  std::vector<Index> Ls;
  double p = 1.0;
  Index R = 1;
  double c_fit = 0.0;  // largest c passing the gap criterion at every cell
  double trend_slope = 0.0;      // median lambda_min regressed on R^{-2(d+2)} (log L)^{-2/d}
  double trend_intercept = 0.0;
  std::uint64_t master_seed = 0;
  double threshold(Index L, int d) const;  // R^{-2(d+2)} (log L)^{-2/d}
};

/// Finite-volume gap statistics: per (L, center) the empirical distribution
/// of lambda_min(H_{omega,x,L}), the fitted constant of the gap criterion
/// P(lambda_min >= c * R^{-2(d+2)} (log L)^{-2/d}) >= 1 - L^{-pd}, and the
/// scale trend of the median.
ILSEReport ilse_scan(const DeloneSet& D, const DisorderSpec& disorder, const std::vector<Index>& Ls,
                     const std::vector<LatticePoint>& centers, int nsamples, double p,
                     std::uint64_t master_seed);

struct EdgeReport {
  double min_lambda_min = 0.0;
  double max_lambda_max = 0.0;
  double bound_lo = 0.0;
  double bound_hi = 0.0;
  bool contained = false;            // within [0, 4d+M] to 1e-10
  double upper_edge_distance = 0.0;  // (4d+M) - empirical max
  int nsamples = 0;
};

/// Spectral-edge sandwich check across disorder samples.
EdgeReport edge_scan(const DeloneSet& D, const DisorderSpec& disorder, const BoxSpec& box,
                     int nsamples, std::uint64_t master_seed);

/// Sample index used by the scans: center folded into the high bits so each
/// (center, sample) pair owns an independent stream.
inline std::uint64_t scan_sample_index(int center_index, int sample) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(center_index)) << 32) |
         static_cast<std::uint32_t>(sample);
}

}  // namespace dal
