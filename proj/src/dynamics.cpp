#include "dal/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dal/parallel.hpp"

namespace dal {

WavePacket delta_packet(const BoxSpec& box) { return delta_packet(box, box.center); }

WavePacket delta_packet(const BoxSpec& box, const LatticePoint& site) {
  const Window w = box.window();
  if (!w.contains(site)) throw std::invalid_argument("delta_packet: site outside box");
  WavePacket psi;
  psi.box = box;
  psi.amplitudes = Eigen::VectorXcd::Zero(w.site_count());
  psi.amplitudes[w.linear_index(site)] = 1.0;
  return psi;
}

std::vector<WavePacket> evolve_exact(const SparseSymmetricOperator& H, const WavePacket& psi0,
                                     const std::vector<double>& times, Index dense_threshold) {
  if (psi0.amplitudes.size() != H.dimension())
    throw std::invalid_argument("evolve_exact: packet/operator dimension mismatch");
  auto res = eig_full(H, true, dense_threshold);
  Eigen::VectorXcd coeff(res.count());
  coeff.real() = res.eigenvectors.transpose() * psi0.amplitudes.real();
  coeff.imag() = res.eigenvectors.transpose() * psi0.amplitudes.imag();
  std::vector<WavePacket> out;
  out.reserve(times.size());
  const std::complex<double> mi(0.0, -1.0);
  Eigen::VectorXcd phase(coeff.size());
  for (double t : times) {
    for (Eigen::Index k = 0; k < coeff.size(); ++k)
      phase[k] = std::exp(mi * res.eigenvalues[static_cast<size_t>(k)] * t) * coeff[k];
    WavePacket psi;
    psi.box = psi0.box;
    psi.time = psi0.time + t;
    psi.amplitudes.resize(H.dimension());
    psi.amplitudes.real() = res.eigenvectors * phase.real();
    psi.amplitudes.imag() = res.eigenvectors * phase.imag();
    out.push_back(std::move(psi));
  }
  return out;
}

std::vector<double> bessel_j_array(double z, int kmax) {
  std::vector<double> J(static_cast<size_t>(kmax) + 1, 0.0);
  if (z == 0.0) {
    J[0] = 1.0;
    return J;
  }
  const double az = std::abs(z);
  // Start the backward recurrence well above both kmax and the turning
  // point k ~ |z|, where J_k decays superexponentially.
  int start = kmax + 16 + static_cast<int>(az + 20.0 * std::cbrt(az + 1.0));
  std::vector<double> tmp(static_cast<size_t>(start) + 2, 0.0);
  tmp[static_cast<size_t>(start) + 1] = 0.0;
  tmp[static_cast<size_t>(start)] = 1e-300;
  for (int k = start; k >= 1; --k) {
    tmp[static_cast<size_t>(k) - 1] =
        (2.0 * k / z) * tmp[static_cast<size_t>(k)] - tmp[static_cast<size_t>(k) + 1];
    if (std::abs(tmp[static_cast<size_t>(k) - 1]) > 1e250) {
      for (int j = k - 1; j <= start + 1; ++j) tmp[static_cast<size_t>(j)] *= 1e-250;
    }
  }
  // Normalize with J_0 + 2 sum_{k>=1} J_{2k} = 1.
  double norm = tmp[0];
  for (int k = 2; k <= start; k += 2) norm += 2.0 * tmp[static_cast<size_t>(k)];
  for (int k = 0; k <= kmax; ++k) J[static_cast<size_t>(k)] = tmp[static_cast<size_t>(k)] / norm;
  return J;
}

ChebyshevEvolveResult evolve_chebyshev(const SparseSymmetricOperator& H, const WavePacket& psi0,
                                       double t, double tol) {
  if (!H.has_bounds())
    throw std::invalid_argument("evolve_chebyshev: spectral bound hints required");
  if (psi0.amplitudes.size() != H.dimension())
    throw std::invalid_argument("evolve_chebyshev: packet/operator dimension mismatch");
  const Index n = H.dimension();
  const double lo = H.bound_lo(), hi = H.bound_hi();
  const double center = 0.5 * (hi + lo);
  double half = 0.5 * (hi - lo);
  if (half <= 0.0) half = 1.0;
  half *= 1.0 + 1e-12;  // keep rescaled eigenvalues strictly within [-1, 1]
  const double z = t * half;

  // Coefficients c_k = (2 - delta_{k0}) (-i)^k J_k(z); find the truncation
  // order where three consecutive magnitudes drop below 1e-14.
  int kmax = 32 + static_cast<int>(std::abs(z) + 20.0 * std::cbrt(std::abs(z) + 1.0));
  std::vector<double> J = bessel_j_array(z, kmax);
  int order = kmax;
  int quiet = 0;
  for (int k = 0; k <= kmax; ++k) {
    if (std::abs(J[static_cast<size_t>(k)]) < 1e-14) {
      if (++quiet == 3) {
        order = k;
        break;
      }
    } else {
      quiet = 0;
    }
  }

  const std::complex<double> phase = std::exp(std::complex<double>(0.0, -1.0) * center * t);
  const std::complex<double> mi(0.0, -1.0);

  Eigen::VectorXcd tk_prev = psi0.amplitudes;  // T_0 psi
  Eigen::VectorXcd tk(n), tmp(n);
  // X = (H - center)/half
  auto apply_x = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    H.matvec(std::span<const std::complex<double>>(in.data(), static_cast<size_t>(n)),
             std::span<std::complex<double>>(out.data(), static_cast<size_t>(n)));
    out -= center * in;
    out /= half;
  };

  Eigen::VectorXcd acc = J[0] * tk_prev;
  std::complex<double> ipow = 1.0;
  for (int k = 1; k <= order; ++k) {
    if (k == 1) {
      apply_x(tk_prev, tk);
    } else {
      apply_x(tk, tmp);
      tmp = 2.0 * tmp - tk_prev;
      tk_prev.swap(tk);
      tk.swap(tmp);
    }
    ipow *= mi;
    acc += (2.0 * ipow * J[static_cast<size_t>(k)]) * tk;
  }

  ChebyshevEvolveResult out;
  out.psi.box = psi0.box;
  out.psi.time = psi0.time + t;
  out.psi.amplitudes = phase * acc;
  out.order = order;
  out.coeff_tail = std::abs(J[static_cast<size_t>(std::min(order, kmax))]);
  out.norm_drift = std::abs(out.psi.norm() - psi0.norm());
  if (out.norm_drift > tol) {
    std::ostringstream os;
    os << "evolve_chebyshev: norm drift " << out.norm_drift << " exceeds tol " << tol
       << " (order " << out.order << ", tail " << out.coeff_tail << ")";
    throw SolverError(os.str());
  }
  return out;
}

double moment(const WavePacket& psi, double p, const LatticePoint& origin) {
  if (p < 0.0) throw std::invalid_argument("moment: p must be >= 0");
  const Window w = psi.box.window();
  if (origin.dim() != w.dim()) throw std::invalid_argument("moment: origin dimension mismatch");
  double acc = 0.0;
  for (Index i = 0; i < w.site_count(); ++i) {
    const LatticePoint n = w.point_at(i);
    double r2 = 0.0;
    for (int a = 0; a < w.dim(); ++a) {
      const double dx = double(n[a] - origin[a]);
      r2 += dx * dx;
    }
    const double weight = std::pow(1.0 + r2, p / 2.0);  // <X>^p = (1+|n|^2)^{p/2}
    acc += weight * std::norm(psi.amplitudes[i]);
  }
  return std::sqrt(acc);
}

double ipr(const Eigen::VectorXcd& psi) {
  double s2 = 0.0, s4 = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double a2 = std::norm(psi[i]);
    s2 += a2;
    s4 += a2 * a2;
  }
  if (s2 == 0.0) throw std::invalid_argument("ipr: zero vector");
  return s4 / (s2 * s2);
}

double ipr(const Eigen::VectorXd& psi) {
  Eigen::VectorXcd c = psi.cast<std::complex<double>>();
  return ipr(c);
}

double MomentTrace::saturation_ratio(double t_lo, double t_hi) const {
  double sup = -std::numeric_limits<double>::infinity();
  double inf = std::numeric_limits<double>::infinity();
  bool any = false;
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi) continue;
    any = true;
    sup = std::max(sup, mean[i]);
    inf = std::min(inf, mean[i]);
  }
  if (!any) return std::numeric_limits<double>::quiet_NaN();
  if (sup == 0.0 && inf == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sup / inf;
}

MomentTrace localization_profile(const DeloneSet& D, const DisorderSpec& disorder, const BoxSpec& box,
                                 double interval_lo, double interval_hi, const WavePacket& psi0,
                                 double p, const std::vector<double>& times, int nsamples,
                                 std::uint64_t master_seed) {
  if (!(interval_lo <= interval_hi))
    throw std::invalid_argument("localization_profile: empty interval");
  const double band_hi = 4.0 * box.dim() + disorder.support_max();
  if (interval_hi < 0.0 || interval_lo > band_hi)
    throw std::invalid_argument("localization_profile: interval misses [0, 4d+M]");
  if (nsamples < 1) throw std::invalid_argument("localization_profile: nsamples must be >= 1");

  MomentTrace trace;
  trace.times = times;
  trace.p = p;
  trace.interval_lo = interval_lo;
  trace.interval_hi = interval_hi;
  trace.origin = box.center;
  trace.nsamples = nsamples;
  trace.mean.assign(times.size(), 0.0);
  trace.max.assign(times.size(), 0.0);

  std::vector<std::vector<double>> per_sample(static_cast<size_t>(nsamples));
  std::vector<std::uint8_t> negligible_flag(static_cast<size_t>(nsamples), 0);
  const std::complex<double> mi(0.0, -1.0);
  parallel_for(nsamples, [&](Index s) {
    auto sample = sample_potential(D, box, disorder, master_seed, static_cast<std::uint64_t>(s));
    auto H = assemble_hamiltonian(box, D, sample, disorder.support_max());
    auto res = eig_full(H, true);

    // Project onto the eigenvalues inside [lo, hi].
    const double span = std::max(res.max() - res.min(), 1e-300);
    const double tol = 1e-12 * span;
    std::vector<Index> keep;
    for (Index k = 0; k < res.count(); ++k) {
      double l = res.eigenvalues[static_cast<size_t>(k)];
      if (l >= interval_lo - tol && l <= interval_hi + tol) keep.push_back(k);
    }
    const auto m_kept = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd basis(H.dimension(), m_kept);
    Eigen::VectorXd lambdas(m_kept);
    for (Eigen::Index j = 0; j < m_kept; ++j) {
      basis.col(j) = res.eigenvectors.col(keep[static_cast<size_t>(j)]);
      lambdas[j] = res.eigenvalues[static_cast<size_t>(keep[static_cast<size_t>(j)])];
    }
    Eigen::VectorXcd coeff(m_kept);
    coeff.real() = basis.transpose() * psi0.amplitudes.real();
    coeff.imag() = basis.transpose() * psi0.amplitudes.imag();
    if (coeff.norm() < 1e-8) negligible_flag[static_cast<size_t>(s)] = 1;

    auto& values = per_sample[static_cast<size_t>(s)];
    values.resize(times.size());
    WavePacket psi;
    psi.box = box;
    Eigen::VectorXcd rotated(m_kept);
    for (size_t ti = 0; ti < times.size(); ++ti) {
      for (Eigen::Index j = 0; j < m_kept; ++j)
        rotated[j] = std::exp(mi * lambdas[j] * times[ti]) * coeff[j];
      const Eigen::VectorXd re = basis * rotated.real();
      const Eigen::VectorXd im = basis * rotated.imag();
      psi.amplitudes.resize(re.size());
      psi.amplitudes.real() = re;
      psi.amplitudes.imag() = im;
      psi.time = times[ti];
      values[ti] = moment(psi, p, box.center);
    }
  });

  for (int s = 0; s < nsamples; ++s) {
    for (size_t ti = 0; ti < times.size(); ++ti) {
      trace.mean[ti] += per_sample[static_cast<size_t>(s)][ti];
      trace.max[ti] = std::max(trace.max[ti], per_sample[static_cast<size_t>(s)][ti]);
    }
  }
  for (auto& v : trace.mean) v /= double(nsamples);
  trace.sample_values = std::move(per_sample);
  trace.running_sup = *std::max_element(trace.mean.begin(), trace.mean.end());
  int negligible = 0;
  for (auto f : negligible_flag) negligible += f;
  trace.negligible_fraction = double(negligible) / double(nsamples);
  return trace;
}

}  // namespace dal
