#pragma once

#include <map>
#include <span>
#include <string>

#include "dal/operators.hpp"
#include "dal/types.hpp"

namespace dal {

/// Closed-form energy thresholds of the averaging argument:
///   tilde_E_W = (8 sqrt(2) d R (4R+1)^d)^{-2}
///   E_W       = q^2 tilde_E_W
///   C         = (1-q) (4R+1)^{-d}
struct Thresholds {
  int d = 1;
  Index R = 1;
  double q = 0.5;
  double tilde_ew = 0.0;
  double ew = 0.0;
  double c = 0.0;
  // Exact rationals, populated when q is given as a fraction.
  bool exact = false;
  Fraction tilde_ew_frac, ew_frac, c_frac;
};

Thresholds compute_thresholds(int d, Index R, double q);
Thresholds compute_thresholds(int d, Index R, const Fraction& q);

/// Common result shape for the certifier checks. worst_margin >= -tolerance
/// means pass; a vacuous check has nothing to test (empty projection range).
struct AveragingReport {
  std::string test;
  std::string parameter_set;
  double worst_margin = 0.0;
  bool pass = false;
  bool vacuous = false;
  long long nsamples = 0;
  double tolerance = 0.0;
  std::map<std::string, double> metrics;
};

/// Covering condition: min over box sites of (4R+1)^d W_L(n) >= 1, checked
/// in integer arithmetic (zero tolerance). Requires L > R.
AveragingReport check_covering(const DeloneSet& D, const BoxSpec& box, Index R);

struct ShiftBoundCheck {
  double lhs = 0.0;  // ||phi(.+gamma) - phi||, zero extension
  double rhs = 0.0;  // (2Rd+1) sqrt(2 <H0 phi, phi>)
  bool pass = false;
};

/// Shortest-path telescoping bound for |gamma|_inf <= 2R.
ShiftBoundCheck check_shift_bound(const BoxSpec& box, std::span<const double> phi,
                                  const LatticePoint& gamma, Index R);

/// Eigenfunction lower bound <V_{x,L} phi, phi> >= C ||phi||^2 on
/// ran P_{0,x,L}([0, E_W]): every basis eigenvector plus nsamples random
/// unit combinations. Vacuous when the projection range is empty, in which
/// case metrics["recommended_L"] holds the smallest non-vacuous half-width.
AveragingReport certify_lemma_WE(const DeloneSet& D, const BoxSpec& box, double q, int nsamples,
                                 std::uint64_t master_seed);

/// Random lifting bound: per sample forms W_{omega,L} and reports
/// (a) the frequency of min_n W >= (5R)^{-d} mean/2  (metrics["min_w_frequency"])
/// (b) |<(W - V)phi, phi>| <= 8 d sqrt(2) M R K sqrt(<H0 phi,phi>) on
///     nphi random low-energy phi per sample; worst margin over all tests.
AveragingReport certify_lifting(const DeloneSet& D, const BoxSpec& box, const DisorderSpec& disorder,
                                Index K, int nsamples, int nphi, std::uint64_t master_seed);

/// Smallest half-width L with lambda_min(H_{0,L}) <= E_W (per-axis closed
/// form); the scale the certifier recommends for a non-vacuous test.
Index min_nonvacuous_half_width(int d, double E_W);

}  // namespace dal
