#include "dal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "dal/detail/moving_sum.hpp"
#include "dal/rng.hpp"

namespace dal {

namespace {

std::vector<Index> window_dims(const Window& w) {
  std::vector<Index> dims(static_cast<size_t>(w.dim()));
  for (int i = 0; i < w.dim(); ++i) dims[static_cast<size_t>(i)] = w.extent(i);
  return dims;
}

// Iterate the anchor grid of cubes {x,...,x+K}^d inside `w`; calls f with
// the anchor. Returns the number of anchors, 0 if no cube fits.
template <typename F>
long long for_each_anchor(const Window& w, Index K, F&& f) {
  for (int i = 0; i < w.dim(); ++i)
    if (w.extent(i) < K + 1) return 0;
  LatticePoint a = w.lo;
  long long n = 0;
  for (;;) {
    f(a);
    ++n;
    int axis = w.dim() - 1;
    for (; axis >= 0; --axis) {
      if (a[axis] + 1 + K <= w.hi[axis]) {
        ++a[axis];
        for (int j = axis + 1; j < w.dim(); ++j) a[j] = w.lo[j];
        break;
      }
    }
    if (axis < 0) break;
  }
  return n;
}

}  // namespace

DeloneSet::DeloneSet(Window window, const std::vector<LatticePoint>& points, Index declared_R)
    : window_(std::move(window)), declared_R_(declared_R) {
  if (declared_R_ < 1) throw std::invalid_argument("delone: declared_R must be >= 1");
  occ_.assign(static_cast<size_t>(window_.site_count()), 0);
  for (const auto& p : points) {
    if (p.dim() != window_.dim()) throw std::invalid_argument("delone: point dimension mismatch");
    if (!window_.contains(p)) throw std::invalid_argument("delone: point outside window");
    auto idx = static_cast<size_t>(window_.linear_index(p));
    if (occ_[idx]) throw std::invalid_argument("delone: duplicate point");
    occ_[idx] = 1;
  }
  npoints_ = static_cast<Index>(points.size());
}

DeloneSet::DeloneSet(Window window, std::vector<std::uint8_t> occupancy, Index declared_R)
    : window_(std::move(window)), occ_(std::move(occupancy)), declared_R_(declared_R) {
  if (declared_R_ < 1) throw std::invalid_argument("delone: declared_R must be >= 1");
  if (static_cast<Index>(occ_.size()) != window_.site_count())
    throw std::invalid_argument("delone: occupancy size mismatch");
  npoints_ = 0;
  for (auto b : occ_) npoints_ += (b != 0);
}

std::vector<LatticePoint> DeloneSet::points() const {
  std::vector<LatticePoint> out;
  out.reserve(static_cast<size_t>(npoints_));
  for (Index i = 0; i < static_cast<Index>(occ_.size()); ++i)
    if (occ_[static_cast<size_t>(i)]) out.push_back(window_.point_at(i));
  return out;
}

// -- Generators ---------------------------------------------------------------

DeloneSet generate_periodic(int d, Index k, const Window& window) {
  if (k < 1) throw std::invalid_argument("generate_periodic: k must be >= 1");
  if (window.dim() != d) throw std::invalid_argument("generate_periodic: window dimension mismatch");
  std::vector<std::uint8_t> occ(static_cast<size_t>(window.site_count()), 0);
  for (Index i = 0; i < window.site_count(); ++i) {
    LatticePoint p = window.point_at(i);
    bool on = true;
    for (int a = 0; a < d && on; ++a) on = (p[a] % k) == 0;
    occ[static_cast<size_t>(i)] = on ? 1 : 0;
  }
  return DeloneSet(window, std::move(occ), std::max<Index>(1, k - 1));
}

CutEvaluation sturmian_cut(Index n, double alpha, double beta) {
  // Exact product n * alpha via fma splitting, then one rounding in the
  // fractional reduction; accurate to ~1 ulp of 1 for |n| < 2^53.
  double nd = static_cast<double>(n);
  double hi = nd * alpha;
  double lo = std::fma(nd, alpha, -hi);
  double fl = std::floor(hi);
  double frac = (hi - fl) + lo;
  if (frac >= 1.0) frac -= 1.0;
  if (frac < 0.0) frac += 1.0;
  CutEvaluation ev;
  ev.frac = frac;
  ev.below = frac < beta;
  ev.near_boundary = std::abs(frac - beta) < 1e-15 * std::max(1.0, std::abs(beta));
  return ev;
}

DeloneSet generate_sturmian(double alpha, double beta, const Window& window) {
  if (!(beta > 0.0) || beta > 1.0) throw std::invalid_argument("generate_sturmian: beta must be in (0,1]");
  const int d = window.dim();
  // Per-axis membership tables; d > 1 takes the Cartesian product.
  std::vector<std::vector<std::uint8_t>> axis_member(static_cast<size_t>(d));
  for (int a = 0; a < d; ++a) {
    auto& tab = axis_member[static_cast<size_t>(a)];
    tab.resize(static_cast<size_t>(window.extent(a)));
    for (Index j = 0; j < window.extent(a); ++j) {
      Index n = window.lo[a] + j;
      tab[static_cast<size_t>(j)] = (beta >= 1.0) ? 1 : (sturmian_cut(n, alpha, beta).below ? 1 : 0);
    }
  }
  std::vector<std::uint8_t> occ(static_cast<size_t>(window.site_count()), 0);
  for (Index i = 0; i < window.site_count(); ++i) {
    LatticePoint p = window.point_at(i);
    bool on = true;
    for (int a = 0; a < d && on; ++a)
      on = axis_member[static_cast<size_t>(a)][static_cast<size_t>(p[a] - window.lo[a])] != 0;
    occ[static_cast<size_t>(i)] = on ? 1 : 0;
  }
  DeloneSet tmp(window, std::move(occ), 1);
  Index r = compute_R(tmp);
  return DeloneSet(window, tmp.occupancy(), r);
}

DeloneSet generate_random_cell(int d, Index R, const Window& window, std::uint64_t seed) {
  if (R < 1) throw std::invalid_argument("generate_random_cell: R must be >= 1");
  if (window.dim() != d) throw std::invalid_argument("generate_random_cell: window dimension mismatch");
  const Index cell = (R + 2) / 2;  // every side-R cube contains a full cell
  for (int a = 0; a < d; ++a)
    if (window.extent(a) < cell)
      throw std::invalid_argument("generate_random_cell: window smaller than cell side");
  // Cells are aligned from window.lo; the trailing cell per axis may be
  // truncated but still receives one point.
  std::vector<Index> ncells(static_cast<size_t>(d));
  for (int a = 0; a < d; ++a) ncells[static_cast<size_t>(a)] = (window.extent(a) + cell - 1) / cell;
  Index total_cells = 1;
  for (int a = 0; a < d; ++a) total_cells *= ncells[static_cast<size_t>(a)];

  RandomStream rng = make_stream(seed, StreamPurpose::RandomCellGeometry);
  std::vector<std::uint8_t> occ(static_cast<size_t>(window.site_count()), 0);
  std::vector<Index> cidx(static_cast<size_t>(d), 0);
  for (Index c = 0; c < total_cells; ++c) {
    Index rem = c;
    for (int a = d - 1; a >= 0; --a) {
      cidx[static_cast<size_t>(a)] = rem % ncells[static_cast<size_t>(a)];
      rem /= ncells[static_cast<size_t>(a)];
    }
    LatticePoint p = LatticePoint::zero(d);
    for (int a = 0; a < d; ++a) {
      Index start = window.lo[a] + cidx[static_cast<size_t>(a)] * cell;
      Index len = std::min(cell, window.hi[a] - start + 1);
      p[a] = start + static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(len)));
    }
    occ[static_cast<size_t>(window.linear_index(p))] = 1;
  }
  return DeloneSet(window, std::move(occ), R);
}

// -- Analysis -----------------------------------------------------------------

namespace {

// True iff every cube {x,...,x+R}^d inside the window holds a point.
bool covers_at(const DeloneSet& D, Index R) {
  std::vector<long long> counts(D.occupancy().begin(), D.occupancy().end());
  auto sums = detail::moving_sum_valid(counts, window_dims(D.window()), R + 1);
  for (long long s : sums)
    if (s == 0) return false;
  return true;
}

}  // namespace

Index compute_R(const DeloneSet& D) {
  if (D.empty()) throw NonDeloneError("compute_R: empty point set");
  const Index max_side = D.window().min_extent() - 1;  // cube side R needs R+1 sites per axis
  if (max_side < 1) return 1;                          // no cube of side >= 1 fits; floor at 1
  if (!covers_at(D, max_side))
    throw NonDeloneError("compute_R: an empty window-spanning cube exists (not relatively dense)");
  Index lo = 1, hi = max_side;
  while (lo < hi) {
    Index mid = lo + (hi - lo) / 2;
    if (covers_at(D, mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

Pattern::Pattern(int dim, Index extent, std::vector<LatticePoint> points) : dim_(dim), extent_(extent) {
  if (dim_ < 1) throw std::invalid_argument("pattern: dimension must be >= 1");
  if (extent_ < 0) throw std::invalid_argument("pattern: extent must be >= 0");
  bool inside = true;
  for (const auto& p : points) {
    if (p.dim() != dim_) throw std::invalid_argument("pattern: point dimension mismatch");
    for (int a = 0; a < dim_; ++a) inside = inside && p[a] >= 0 && p[a] <= extent_;
  }
  std::vector<LatticePoint> pts = std::move(points);
  if (!inside && !pts.empty()) {
    LatticePoint mn = pts.front();
    for (const auto& p : pts)
      for (int a = 0; a < dim_; ++a) mn[a] = std::min(mn[a], p[a]);
    for (auto& p : pts) p = p - mn;
    for (const auto& p : pts)
      for (int a = 0; a < dim_; ++a)
        if (p[a] < 0 || p[a] > extent_)
          throw std::invalid_argument("pattern: points do not fit the K-cube after normalization");
  }
  Window cube(LatticePoint::zero(dim_), LatticePoint::constant(dim_, extent_));
  local_.reserve(pts.size());
  for (const auto& p : pts) local_.push_back(cube.linear_index(p));
  std::sort(local_.begin(), local_.end());
  if (std::adjacent_find(local_.begin(), local_.end()) != local_.end())
    throw std::invalid_argument("pattern: duplicate point");
}

std::vector<LatticePoint> Pattern::points() const {
  Window cube(LatticePoint::zero(dim_), LatticePoint::constant(dim_, extent_));
  std::vector<LatticePoint> out;
  out.reserve(local_.size());
  for (Index i : local_) out.push_back(cube.point_at(i));
  return out;
}

Pattern pattern_at(const DeloneSet& D, const LatticePoint& anchor, Index K) {
  Window cube(anchor, anchor + LatticePoint::constant(D.dim(), K));
  if (!D.window().contains(cube))
    throw std::invalid_argument("pattern_at: anchored cube outside window");
  Pattern q;
  q.dim_ = D.dim();
  q.extent_ = K;
  Window local(LatticePoint::zero(D.dim()), LatticePoint::constant(D.dim(), K));
  for (Index i = 0; i < local.site_count(); ++i) {
    LatticePoint p = anchor + local.point_at(i);
    if (D.contains(p)) q.local_.push_back(i);
  }
  return q;
}

std::vector<std::pair<Pattern, long long>> enumerate_patterns(const DeloneSet& D, Index K) {
  if (K + 1 > D.window().min_extent())
    throw std::invalid_argument("enumerate_patterns: K not smaller than window side");
  std::map<std::vector<Index>, long long> census;
  std::map<std::vector<Index>, Pattern> reps;
  for_each_anchor(D.window(), K, [&](const LatticePoint& a) {
    Pattern q = pattern_at(D, a, K);
    auto it = census.find(q.local_indices());
    if (it == census.end()) {
      census.emplace(q.local_indices(), 1);
      reps.emplace(q.local_indices(), q);
    } else {
      ++it->second;
    }
  });
  std::vector<std::pair<Pattern, long long>> out;
  out.reserve(census.size());
  for (auto& [key, count] : census) out.emplace_back(reps.at(key), count);
  return out;
}

namespace {

std::pair<long long, long long> occurrence_count(const DeloneSet& D, const Pattern& Q,
                                                 const LatticePoint& x, Index L) {
  if (Q.dim() != D.dim()) throw std::invalid_argument("pattern_frequency: dimension mismatch");
  Window box = Window::cube(x, L);
  if (!D.window().contains(box))
    throw std::invalid_argument("pattern_frequency: box exceeds window margins");
  const Index K = Q.extent();
  long long hits = 0;
  LatticePoint kvec = LatticePoint::constant(D.dim(), K);
  for (Index i = 0; i < box.site_count(); ++i) {
    LatticePoint y = box.point_at(i);
    Window cube(y, y + kvec);
    if (!D.window().contains(cube)) continue;  // boundary anchors count as misses
    if (pattern_at(D, y, K) == Q) ++hits;
  }
  return {hits, box.site_count()};
}

}  // namespace

Fraction pattern_frequency(const DeloneSet& D, const Pattern& Q, const LatticePoint& x, Index L) {
  auto [hits, anchors] = occurrence_count(D, Q, x, L);
  return Fraction(hits, anchors);
}

FrequencyReport supf_diagnostic(const DeloneSet& D, const Pattern& Q, const std::vector<Index>& Ls,
                                const std::vector<LatticePoint>& centers) {
  if (Ls.empty() || centers.empty())
    throw std::invalid_argument("supf_diagnostic: need at least one scale and one center");
  FrequencyReport rep;
  std::vector<Index> sorted_L = Ls;
  std::sort(sorted_L.begin(), sorted_L.end());
  for (Index L : sorted_L) {
    double mn = 2.0, mx = -1.0;
    for (const auto& x : centers) {
      auto [hits, anchors] = occurrence_count(D, Q, x, L);
      FrequencyReport::Row row;
      row.center = x;
      row.L = L;
      row.hits = hits;
      row.anchors = anchors;
      row.eta = double(hits) / double(anchors);
      rep.rows.push_back(row);
      mn = std::min(mn, row.eta);
      mx = std::max(mx, row.eta);
    }
    rep.per_scale_deviation.push_back(mx - mn);
  }
  const Index largest = sorted_L.back();
  double sum = 0.0;
  long long cnt = 0;
  for (const auto& row : rep.rows)
    if (row.L == largest) {
      sum += row.eta;
      ++cnt;
    }
  rep.limit_estimate = sum / double(cnt);
  rep.uniformity_deviation = rep.per_scale_deviation.back();
  rep.strictly_positive = rep.limit_estimate > 0.0;
  return rep;
}

RepetitionSearch find_disjoint_repetitions(const DeloneSet& D, const Pattern& Q, Index count,
                                           const Window& search) {
  if (count < 1) throw std::invalid_argument("find_disjoint_repetitions: count must be >= 1");
  const Index K = Q.extent();
  RepetitionSearch out;
  LatticePoint kvec = LatticePoint::constant(D.dim(), K);
  for (Index i = 0; i < search.site_count(); ++i) {
    if (static_cast<Index>(out.translations.size()) == count) return out;
    LatticePoint v = search.point_at(i);
    Window cube(v, v + kvec);
    if (!D.window().contains(cube)) continue;
    bool disjoint = true;
    for (const auto& u : out.translations) {
      bool overlap = true;
      for (int a = 0; a < D.dim() && overlap; ++a)
        overlap = !(v[a] > u[a] + K || u[a] > v[a] + K);
      if (overlap) {
        disjoint = false;
        break;
      }
    }
    if (!disjoint) continue;
    if (pattern_at(D, v, K) == Q) out.translations.push_back(v);
  }
  out.exhausted = static_cast<Index>(out.translations.size()) < count;
  return out;
}

DeloneSet complement(const DeloneSet& D) {
  std::vector<std::uint8_t> occ(D.occupancy().size());
  for (size_t i = 0; i < occ.size(); ++i) occ[i] = D.occupancy()[i] ? 0 : 1;
  DeloneSet tmp(D.window(), std::move(occ), 1);
  if (tmp.empty()) throw NonDeloneError("complement: empty complement");
  Index r = compute_R(tmp);  // throws NonDeloneError on unbounded gaps
  return DeloneSet(D.window(), tmp.occupancy(), r);
}

// -- File format ----------------------------------------------------------------

void save_delone(const DeloneSet& D, std::ostream& out) {
  out << "# dim=" << D.dim() << "\n";
  out << "# R=" << D.declared_R() << "\n";
  out << "# window=";
  for (int a = 0; a < D.dim(); ++a) {
    if (a) out << ",";
    out << D.window().lo[a] << ":" << D.window().hi[a];
  }
  out << "\n";
  for (const auto& p : D.points()) {
    for (int a = 0; a < D.dim(); ++a) {
      if (a) out << " ";
      out << p[a];
    }
    out << "\n";
  }
}

void save_delone_file(const DeloneSet& D, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open for writing: " + path);
  save_delone(D, f);
}

DeloneSet load_delone(std::istream& in) {
  std::string line;
  int dim = -1;
  Index R = -1;
  std::optional<Window> window;
  std::vector<LatticePoint> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      std::string key = body.substr(0, eq);
      key.erase(0, key.find_first_not_of(" \t"));
      key.erase(key.find_last_not_of(" \t") + 1);
      std::string val = body.substr(eq + 1);
      if (key == "dim") {
        dim = std::stoi(val);
      } else if (key == "R") {
        R = std::stoll(val);
      } else if (key == "window") {
        if (dim <= 0) throw ConfigError("delone file: window header before dim");
        LatticePoint lo = LatticePoint::zero(dim), hi = LatticePoint::zero(dim);
        std::stringstream ss(val);
        std::string piece;
        int axis = 0;
        while (std::getline(ss, piece, ',')) {
          auto colon = piece.find(':');
          if (colon == std::string::npos || axis >= dim)
            throw ConfigError("delone file: malformed window header");
          lo[axis] = std::stoll(piece.substr(0, colon));
          hi[axis] = std::stoll(piece.substr(colon + 1));
          ++axis;
        }
        if (axis != dim) throw ConfigError("delone file: window axis count mismatch");
        window.emplace(lo, hi);
      }
      continue;
    }
    if (dim <= 0 || !window) throw ConfigError("delone file: point before complete header");
    std::stringstream ss(line);
    LatticePoint p = LatticePoint::zero(dim);
    for (int a = 0; a < dim; ++a)
      if (!(ss >> p[a])) throw ConfigError("delone file: malformed point line: " + line);
    Index trailing;
    if (ss >> trailing) throw ConfigError("delone file: too many coordinates: " + line);
    if (!window->contains(p)) throw ConfigError("delone file: point outside window: " + line);
    points.push_back(p);
  }
  if (dim <= 0 || R < 1 || !window) throw ConfigError("delone file: missing header");
  // The DeloneSet constructor rejects duplicates.
  return DeloneSet(*window, points, R);
}

DeloneSet load_delone_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open: " + path);
  return load_delone(f);
}

}  // namespace dal
