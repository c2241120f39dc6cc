#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "dal/operators.hpp"
#include "dal/spectral.hpp"
#include "dal/types.hpp"

namespace dal {

struct WavePacket {
  BoxSpec box;
  Eigen::VectorXcd amplitudes;
  double time = 0.0;

  double norm() const { return amplitudes.norm(); }
};

/// Delta packet at the given site (defaults to the box center).
WavePacket delta_packet(const BoxSpec& box);
WavePacket delta_packet(const BoxSpec& box, const LatticePoint& site);

/// psi(t) = sum_k e^{-i t lambda_k} <v_k, psi0> v_k from the dense
/// eigendecomposition; one solve serves all requested times.
std::vector<WavePacket> evolve_exact(const SparseSymmetricOperator& H, const WavePacket& psi0,
                                     const std::vector<double>& times,
                                     Index dense_threshold = kDenseThreshold);

struct ChebyshevEvolveResult {
  WavePacket psi;
  int order = 0;              // highest retained polynomial order
  double coeff_tail = 0.0;    // magnitude estimate of the first dropped coefficients
  double norm_drift = 0.0;    // | ||psi_out|| - ||psi_in|| |
};

/// Polynomial propagator for large boxes: expansion of e^{-itH} in
/// rescaled polynomials with Bessel-function coefficients, truncated when
/// three consecutive coefficient magnitudes fall below 1e-14. Requires
/// spectral bound hints on H; throws SolverError when the norm drift
/// exceeds tol.
ChebyshevEvolveResult evolve_chebyshev(const SparseSymmetricOperator& H, const WavePacket& psi0,
                                       double t, double tol = 1e-8);

/// ||<X>^{p/2} psi|| with <X>(n) = (1 + |n - origin|^2)^{1/2}.
double moment(const WavePacket& psi, double p, const LatticePoint& origin);

/// sum |psi|^4 / (sum |psi|^2)^2; rejects the zero vector.
double ipr(const Eigen::VectorXcd& psi);
double ipr(const Eigen::VectorXd& psi);

struct MomentTrace {
  std::vector<double> times;
  std::vector<double> mean;  // sample mean of m_p(t)
  std::vector<double> max;   // sample max of m_p(t)
  std::vector<std::vector<double>> sample_values;  // [sample][time]
  double p = 2.0;
  double interval_lo = 0.0, interval_hi = 0.0;
  LatticePoint origin;
  double running_sup = 0.0;        // sup over the grid of the mean trace
  double negligible_fraction = 0.0;  // samples with ||P(I) psi0|| < 1e-8
  int nsamples = 0;

  /// sup/inf of the mean trace over times in [t_lo, t_hi]; NaN when the
  /// window trace vanishes identically.
  double saturation_ratio(double t_lo, double t_hi) const;
};

/// Per sample: project psi0 onto ran P_omega([lo,hi]), evolve over the time
/// grid, record m_p(t); aggregates mean and max over samples.
MomentTrace localization_profile(const DeloneSet& D, const DisorderSpec& disorder, const BoxSpec& box,
                                 double interval_lo, double interval_hi, const WavePacket& psi0,
                                 double p, const std::vector<double>& times, int nsamples,
                                 std::uint64_t master_seed);

/// J_k(z) for k = 0..kmax by downward recurrence with sum normalization;
/// the workhorse behind the propagator coefficients.
std::vector<double> bessel_j_array(double z, int kmax);

}  // namespace dal
