#include "dal/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dal/detail/moving_sum.hpp"
#include "dal/parallel.hpp"
#include "dal/rng.hpp"
#include "dal/spectral.hpp"

namespace dal {

namespace {

long long checked_pow(long long base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<long long>::max() / base)
      throw std::overflow_error("thresholds: exact denominator overflows int64");
    r *= base;
  }
  return r;
}

void fill_double_thresholds(Thresholds& t) {
  const double cell = std::pow(double(4 * t.R + 1), t.d);
  const double root = 8.0 * std::sqrt(2.0) * t.d * double(t.R) * cell;
  t.tilde_ew = 1.0 / (root * root);
  t.ew = t.q * t.q * t.tilde_ew;
  t.c = (1.0 - t.q) / cell;
}

}  // namespace

Thresholds compute_thresholds(int d, Index R, double q) {
  if (d < 1 || R < 1) throw std::invalid_argument("thresholds: d and R must be >= 1");
  if (!(q > 0.0) || !(q < 1.0)) throw std::invalid_argument("thresholds: q must lie in (0,1)");
  Thresholds t;
  t.d = d;
  t.R = R;
  t.q = q;
  fill_double_thresholds(t);
  return t;
}

Thresholds compute_thresholds(int d, Index R, const Fraction& q) {
  if (q.num <= 0 || q.num >= q.den)
    throw std::invalid_argument("thresholds: q must lie in (0,1)");
  Thresholds t = compute_thresholds(d, R, q.value());
  // (8 sqrt(2) d R (4R+1)^d)^2 = 128 d^2 R^2 (4R+1)^{2d}, an integer.
  long long cell = checked_pow(4 * static_cast<long long>(R) + 1, d);
  long long den = 128LL * d * d * static_cast<long long>(R) * static_cast<long long>(R);
  if (den > std::numeric_limits<long long>::max() / cell)
    throw std::overflow_error("thresholds: exact denominator overflows int64");
  den *= cell;
  if (den > std::numeric_limits<long long>::max() / cell)
    throw std::overflow_error("thresholds: exact denominator overflows int64");
  den *= cell;
  t.tilde_ew_frac = Fraction(1, den);
  t.ew_frac = Fraction(q.num * q.num, q.den * q.den) * t.tilde_ew_frac;
  t.c_frac = Fraction(q.den - q.num, q.den * cell);
  t.exact = true;
  // Keep the doubles consistent with the exact values.
  t.tilde_ew = t.tilde_ew_frac.value();
  t.ew = t.ew_frac.value();
  t.c = t.c_frac.value();
  return t;
}

AveragingReport check_covering(const DeloneSet& D, const BoxSpec& box, Index R) {
  if (R < 1) throw std::invalid_argument("check_covering: R must be >= 1");
  if (box.half_width <= R) throw std::invalid_argument("check_covering: requires L > R");
  const Window w = box.window();
  if (!D.window().contains(w)) throw std::invalid_argument("check_covering: box exceeds window");

  // Integer convolution: (4R+1)^d W_L(n) = #(D ∩ Lambda_2R(n) ∩ Lambda_L).
  std::vector<long long> v(static_cast<size_t>(w.site_count()), 0);
  for (Index i = 0; i < w.site_count(); ++i)
    if (D.contains(w.point_at(i))) v[static_cast<size_t>(i)] = 1;
  std::vector<Index> dims(static_cast<size_t>(box.dim()));
  for (int a = 0; a < box.dim(); ++a) dims[static_cast<size_t>(a)] = w.extent(a);
  auto counts = detail::moving_sum_same(v, dims, 2 * R);

  long long min_count = std::numeric_limits<long long>::max();
  Index argmin = 0;
  for (Index i = 0; i < static_cast<Index>(counts.size()); ++i)
    if (counts[static_cast<size_t>(i)] < min_count) {
      min_count = counts[static_cast<size_t>(i)];
      argmin = i;
    }

  AveragingReport rep;
  rep.test = "covering";
  std::ostringstream ps;
  ps << "d=" << box.dim() << " R=" << R << " L=" << box.half_width;
  rep.parameter_set = ps.str();
  rep.worst_margin = double(min_count - 1);
  rep.pass = min_count >= 1;
  rep.vacuous = false;
  rep.nsamples = static_cast<long long>(counts.size());
  rep.tolerance = 0.0;
  rep.metrics["min_ratio"] = double(min_count);
  rep.metrics["argmin_site"] = double(argmin);
  return rep;
}

ShiftBoundCheck check_shift_bound(const BoxSpec& box, std::span<const double> phi,
                                  const LatticePoint& gamma, Index R) {
  if (R < 1) throw std::invalid_argument("check_shift_bound: R must be >= 1");
  if (gamma.norm_inf() > 2 * R)
    throw std::invalid_argument("check_shift_bound: |gamma|_inf exceeds 2R");
  const Window w = box.window();
  if (static_cast<Index>(phi.size()) != w.site_count())
    throw std::invalid_argument("check_shift_bound: phi size mismatch");

  // ||phi(.+gamma) - phi||^2 over Z^d with zero extension: iterate the
  // union of the box and its shift.
  LatticePoint lo = w.lo, hi = w.hi;
  for (int a = 0; a < box.dim(); ++a) {
    lo[a] = std::min(lo[a], w.lo[a] - gamma[a]);
    hi[a] = std::max(hi[a], w.hi[a] - gamma[a]);
  }
  Window u(lo, hi);
  auto value_at = [&](const LatticePoint& p) -> double {
    return w.contains(p) ? phi[static_cast<size_t>(w.linear_index(p))] : 0.0;
  };
  double lhs_sq = 0.0;
  for (Index i = 0; i < u.site_count(); ++i) {
    LatticePoint n = u.point_at(i);
    double diff = value_at(n + gamma) - value_at(n);
    lhs_sq += diff * diff;
  }

  auto H0 = assemble_laplacian(box);
  double quad = H0.quadratic_form(phi);
  ShiftBoundCheck chk;
  chk.lhs = std::sqrt(lhs_sq);
  chk.rhs = double(2 * R * box.dim() + 1) * std::sqrt(2.0 * std::max(quad, 0.0));
  chk.pass = chk.lhs <= chk.rhs + 1e-10;
  return chk;
}

namespace {

// Random unit vector in the span of the given orthonormal columns.
Eigen::VectorXd random_span_unit(const Eigen::MatrixXd& basis, RandomStream& rng) {
  Eigen::VectorXd c(basis.cols());
  for (Eigen::Index j = 0; j < c.size(); ++j) c[j] = rng.normal();
  if (c.norm() == 0.0) c.setOnes();
  c.normalize();
  return basis * c;
}

}  // namespace

AveragingReport certify_lemma_WE(const DeloneSet& D, const BoxSpec& box, double q, int nsamples,
                                 std::uint64_t master_seed) {
  const Index R = compute_R(D);
  if (box.half_width <= R)
    throw std::invalid_argument("certify_lemma_WE: requires L > compute_R(D)");
  const Thresholds thr = compute_thresholds(box.dim(), R, q);

  AveragingReport rep;
  rep.test = "lemma-we";
  std::ostringstream ps;
  ps << "d=" << box.dim() << " R=" << R << " L=" << box.half_width << " q=" << q;
  rep.parameter_set = ps.str();
  rep.tolerance = 1e-10;
  rep.metrics["E_W"] = thr.ew;
  rep.metrics["C"] = thr.c;
  rep.metrics["R"] = double(R);

  auto H0 = assemble_laplacian(box);
  auto P = spectral_projection_basis(H0, 0.0, thr.ew);
  rep.metrics["projection_dim"] = double(P.dimension());
  if (P.dimension() == 0) {
    rep.vacuous = true;
    rep.pass = false;
    rep.metrics["recommended_L"] = double(min_nonvacuous_half_width(box.dim(), thr.ew));
    return rep;
  }

  const auto V = assemble_deterministic_delone_potential(box, D);
  auto ratio_of = [&](const Eigen::VectorXd& phi) {
    double num = 0.0, den = 0.0;
    for (Index i = 0; i < static_cast<Index>(V.size()); ++i) {
      double a = phi[i] * phi[i];
      num += V[static_cast<size_t>(i)] * a;
      den += a;
    }
    return num / den;
  };

  double worst = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < P.dimension(); ++j)
    worst = std::min(worst, ratio_of(P.basis.col(j)));
  std::vector<double> ratios(static_cast<size_t>(nsamples));
  parallel_for(nsamples, [&](Index s) {
    RandomStream rng = make_stream(master_seed, StreamPurpose::CertifierVectors, 0,
                                   static_cast<std::uint64_t>(s));
    ratios[static_cast<size_t>(s)] = ratio_of(random_span_unit(P.basis, rng));
  });
  for (double r : ratios) worst = std::min(worst, r);

  rep.nsamples = nsamples + P.dimension();
  rep.worst_margin = worst - thr.c;
  rep.metrics["worst_ratio"] = worst;
  rep.pass = rep.worst_margin >= -rep.tolerance;
  return rep;
}

namespace {

// Orthonormal low-energy modes of the restricted Laplacian: products of
// per-axis sine modes, lowest `per_axis` indices each.
Eigen::MatrixXd low_free_modes(const BoxSpec& box, int per_axis) {
  const Window w = box.window();
  const int d = box.dim();
  const Index n = w.site_count();
  int total = 1;
  for (int a = 0; a < d; ++a) total *= per_axis;
  Eigen::MatrixXd modes(n, total);
  std::vector<int> k(static_cast<size_t>(d), 1);
  for (int col = 0; col < total; ++col) {
    int rem = col;
    for (int a = d - 1; a >= 0; --a) {
      k[static_cast<size_t>(a)] = 1 + rem % per_axis;
      rem /= per_axis;
    }
    for (Index i = 0; i < n; ++i) {
      LatticePoint p = w.point_at(i);
      double v = 1.0;
      for (int a = 0; a < d; ++a) {
        const double na = double(w.extent(a));
        v *= std::sin(double(k[static_cast<size_t>(a)]) * M_PI * double(p[a] - w.lo[a] + 1) /
                      (na + 1.0));
      }
      modes(i, col) = v;
    }
    modes.col(col).normalize();
  }
  return modes;
}

}  // namespace

AveragingReport certify_lifting(const DeloneSet& D, const BoxSpec& box, const DisorderSpec& disorder,
                                Index K, int nsamples, int nphi, std::uint64_t master_seed) {
  const Index R = compute_R(D);
  if (K < 1) throw std::invalid_argument("certify_lifting: K must be >= 1");
  if (box.half_width <= R * K) throw std::invalid_argument("certify_lifting: requires L > R*K");

  AveragingReport rep;
  rep.test = "lifting";
  std::ostringstream ps;
  ps << "d=" << box.dim() << " R=" << R << " K=" << K << " L=" << box.half_width << " law="
     << disorder.describe();
  rep.parameter_set = ps.str();
  rep.tolerance = 1e-10;

  const int d = box.dim();
  const double M = disorder.support_max();
  const double mean = disorder.mean();
  const double w_floor = std::pow(5.0 * double(R), -d) * mean / 2.0;
  const double chain_const = 8.0 * d * std::sqrt(2.0) * M * double(R) * double(K);
  const Window w = box.window();
  auto H0 = assemble_laplacian(box);
  Eigen::MatrixXd modes = low_free_modes(box, 3);

  std::vector<std::uint8_t> floor_ok(static_cast<size_t>(nsamples), 0);
  std::vector<double> sample_worst(static_cast<size_t>(nsamples));
  parallel_for(nsamples, [&](Index s) {
    auto sample = sample_potential(D, box, disorder, master_seed, static_cast<std::uint64_t>(s));
    std::vector<double> vpot(static_cast<size_t>(w.site_count()), 0.0);
    for (size_t i = 0; i < sample.dsite_indices.size(); ++i)
      vpot[static_cast<size_t>(sample.dsite_indices[i])] = sample.values[i];
    auto W = averaged_potential(vpot, box, R, K);
    double wmin = *std::min_element(W.begin(), W.end());
    floor_ok[static_cast<size_t>(s)] = wmin >= w_floor;

    RandomStream vec_rng =
        make_stream(master_seed, StreamPurpose::CertifierVectors, 1, static_cast<std::uint64_t>(s));
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < nphi; ++t) {
      Eigen::VectorXd phi = random_span_unit(modes, vec_rng);
      double lhs = 0.0;
      for (Index i = 0; i < static_cast<Index>(W.size()); ++i)
        lhs += (W[static_cast<size_t>(i)] - vpot[static_cast<size_t>(i)]) * phi[i] * phi[i];
      double quad = H0.quadratic_form(std::span<const double>(phi.data(), phi.size()));
      double rhs = chain_const * std::sqrt(std::max(quad, 0.0));
      worst = std::min(worst, rhs - std::abs(lhs));
    }
    sample_worst[static_cast<size_t>(s)] = worst;
  });
  long long floor_hits = 0;
  for (auto f : floor_ok) floor_hits += f;
  double worst = std::numeric_limits<double>::infinity();
  for (double v : sample_worst) worst = std::min(worst, v);

  rep.nsamples = static_cast<long long>(nsamples) * nphi;
  rep.worst_margin = worst;
  rep.metrics["min_w_frequency"] = double(floor_hits) / double(nsamples);
  rep.metrics["w_floor"] = w_floor;
  rep.metrics["chain_constant"] = chain_const;
  rep.pass = worst >= -rep.tolerance;
  return rep;
}

Index min_nonvacuous_half_width(int d, double E_W) {
  auto lambda_min = [&](Index L) {
    const double theta = M_PI / double(2 * L + 2);
    return double(d) * (2.0 - 2.0 * std::cos(theta));
  };
  Index lo = 1, hi = 1;
  while (lambda_min(hi) > E_W) {
    hi *= 2;
    if (hi > (Index(1) << 40)) throw std::invalid_argument("min_nonvacuous_half_width: E_W too small");
  }
  while (lo < hi) {
    Index mid = lo + (hi - lo) / 2;
    if (lambda_min(mid) <= E_W)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

}  // namespace dal
