#include "dal/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dal/averaging.hpp"
#include "dal/parallel.hpp"

namespace dal {

ConfidenceInterval wilson_interval(long long successes, long long trials, double z) {
  if (trials <= 0) throw std::invalid_argument("wilson_interval: trials must be > 0");
  const double n = double(trials);
  const double p = double(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  ConfidenceInterval ci;
  ci.lo = std::max(0.0, center - half);
  ci.hi = std::min(1.0, center + half);
  return ci;
}

WegnerReport wegner_scan(const DeloneSet& D, const DisorderSpec& disorder, double E,
                         const std::vector<double>& etas, const std::vector<Index>& Ls,
                         const std::vector<LatticePoint>& centers, int nsamples,
                         std::uint64_t master_seed) {
  if (etas.empty() || Ls.empty() || centers.empty())
    throw std::invalid_argument("wegner_scan: empty grid");
  if (nsamples < 1) throw std::invalid_argument("wegner_scan: nsamples must be >= 1");
  for (double eta : etas)
    if (eta < 0.0) throw std::invalid_argument("wegner_scan: eta must be >= 0");

  WegnerReport rep;
  rep.centers = centers;
  rep.E = E;
  rep.master_seed = master_seed;
  const Index R = compute_R(D);
  rep.threshold_ew = compute_thresholds(D.dim(), R, 0.5).ew;
  rep.above_threshold_warning = E > rep.threshold_ew;

  for (Index L : Ls) {
    for (int ci = 0; ci < static_cast<int>(centers.size()); ++ci) {
      BoxSpec box(centers[static_cast<size_t>(ci)], L);
      std::vector<double> dist(static_cast<size_t>(nsamples));
      parallel_for(nsamples, [&](Index s) {
        auto sample = sample_potential(D, box, disorder, master_seed,
                                       scan_sample_index(ci, static_cast<int>(s)));
        auto H = assemble_hamiltonian(box, D, sample, disorder.support_max());
        auto res = eig_full(H, false);
        dist[static_cast<size_t>(s)] = dist_to_spectrum(res, E);
      });
      std::vector<long long> hits(etas.size(), 0);
      for (int s = 0; s < nsamples; ++s)
        for (size_t e = 0; e < etas.size(); ++e)
          if (dist[static_cast<size_t>(s)] <= etas[e]) ++hits[e];
      for (size_t e = 0; e < etas.size(); ++e) {
        WegnerCell cell;
        cell.E = E;
        cell.eta = etas[e];
        cell.L = L;
        cell.center_index = ci;
        cell.center = centers[static_cast<size_t>(ci)];
        cell.nsamples = nsamples;
        cell.hits = hits[e];
        cell.phat = double(hits[e]) / double(nsamples);
        auto w = wilson_interval(hits[e], nsamples);
        cell.ci_lo = w.lo;
        cell.ci_hi = w.hi;
        rep.cells.push_back(cell);
      }
    }
  }
  return rep;
}

QWFit fit_QW(const WegnerReport& report) {
  if (report.cells.empty()) throw std::invalid_argument("fit_QW: empty report");
  QWFit fit;
  std::vector<double> per_center_max(report.centers.size(), 0.0);
  for (const auto& cell : report.cells) {
    if (cell.eta == 0.0) throw std::invalid_argument("fit_QW: cells with eta = 0 are not fittable");
    BoxSpec box(cell.center, cell.L);
    const double vol = double(box.site_count());
    const double q = cell.ci_hi / (cell.eta * vol);
    fit.q_w = std::max(fit.q_w, q);
    auto& pc = per_center_max[static_cast<size_t>(cell.center_index)];
    pc = std::max(pc, q);
  }
  double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
  for (double v : per_center_max) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  fit.uniformity = (mn > 0.0) ? mx / mn : 1.0;
  return fit;
}

double ILSEReport::threshold(Index L, int d) const {
  return std::pow(double(R), -2.0 * (d + 2)) * std::pow(std::log(double(L)), -2.0 / double(d));
}

ILSEReport ilse_scan(const DeloneSet& D, const DisorderSpec& disorder, const std::vector<Index>& Ls,
                     const std::vector<LatticePoint>& centers, int nsamples, double p,
                     std::uint64_t master_seed) {
  if (Ls.empty() || centers.empty()) throw std::invalid_argument("ilse_scan: empty grid");
  for (Index L : Ls)
    if (L < 3) throw std::invalid_argument("ilse_scan: scales must be >= 3");
  if (!(p > 0.0)) throw std::invalid_argument("ilse_scan: p must be > 0");

  ILSEReport rep;
  rep.Ls = Ls;
  rep.p = p;
  rep.master_seed = master_seed;
  rep.R = compute_R(D);
  const int d = D.dim();

  for (Index L : Ls) {
    for (int ci = 0; ci < static_cast<int>(centers.size()); ++ci) {
      ILSECell cell;
      cell.L = L;
      cell.center_index = ci;
      cell.center = centers[static_cast<size_t>(ci)];
      cell.lambda_min.assign(static_cast<size_t>(nsamples), 0.0);
      BoxSpec box(cell.center, L);
      parallel_for(nsamples, [&](Index s) {
        auto sample = sample_potential(D, box, disorder, master_seed,
                                       scan_sample_index(ci, static_cast<int>(s)));
        auto H = assemble_hamiltonian(box, D, sample, disorder.support_max());
        auto res = eig_extremal(H, 1, Side::Low);
        cell.lambda_min[static_cast<size_t>(s)] = res.eigenvalues.front();
      });
      rep.cells.push_back(std::move(cell));
    }
  }

  // Largest c such that #(lambda_min < c * thr) <= floor(n L^{-pd}) at every cell.
  double c_fit = std::numeric_limits<double>::infinity();
  for (const auto& cell : rep.cells) {
    std::vector<double> sorted = cell.lambda_min;
    std::sort(sorted.begin(), sorted.end());
    const double allowed_f = double(nsamples) * std::pow(double(cell.L), -p * d);
    const auto f = static_cast<size_t>(std::min(allowed_f, double(nsamples - 1)));
    const double thr = rep.threshold(cell.L, d);
    c_fit = std::min(c_fit, sorted[f] / thr);
  }
  rep.c_fit = c_fit;

  // Trend: per-L median regressed on the gap threshold shape.
  std::vector<double> xs, ys;
  for (Index L : Ls) {
    std::vector<double> pool;
    for (const auto& cell : rep.cells)
      if (cell.L == L) pool.insert(pool.end(), cell.lambda_min.begin(), cell.lambda_min.end());
    std::sort(pool.begin(), pool.end());
    ys.push_back(pool[pool.size() / 2]);
    xs.push_back(rep.threshold(L, d));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  rep.trend_slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  rep.trend_intercept = (sy - rep.trend_slope * sx) / n;
  return rep;
}

EdgeReport edge_scan(const DeloneSet& D, const DisorderSpec& disorder, const BoxSpec& box,
                     int nsamples, std::uint64_t master_seed) {
  if (nsamples < 1) throw std::invalid_argument("edge_scan: nsamples must be >= 1");
  EdgeReport rep;
  rep.nsamples = nsamples;
  rep.bound_lo = 0.0;
  rep.bound_hi = 4.0 * box.dim() + disorder.support_max();
  rep.min_lambda_min = std::numeric_limits<double>::infinity();
  rep.max_lambda_max = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> extremes(static_cast<size_t>(nsamples));
  parallel_for(nsamples, [&](Index s) {
    auto sample = sample_potential(D, box, disorder, master_seed, static_cast<std::uint64_t>(s));
    auto H = assemble_hamiltonian(box, D, sample, disorder.support_max());
    auto res = eig_full(H, false);
    extremes[static_cast<size_t>(s)] = {res.min(), res.max()};
  });
  for (const auto& [mn, mx] : extremes) {
    rep.min_lambda_min = std::min(rep.min_lambda_min, mn);
    rep.max_lambda_max = std::max(rep.max_lambda_max, mx);
  }
  rep.contained = rep.min_lambda_min >= -1e-10 && rep.max_lambda_max <= rep.bound_hi + 1e-10;
  rep.upper_edge_distance = rep.bound_hi - rep.max_lambda_max;
  return rep;
}

}  // namespace dal
