#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dal/geometry.hpp"

using namespace dal;

namespace {

Window win1(Index lo, Index hi) { return Window(LatticePoint({lo}), LatticePoint({hi})); }

LatticePoint pt(std::initializer_list<Index> c) { return LatticePoint(std::vector<Index>(c)); }

// Independent oracle: smallest R such that every anchored side-R cube inside
// the window holds a point, by direct scan.
Index brute_force_R(const DeloneSet& D) {
  const Window& w = D.window();
  for (Index R = 1;; ++R) {
    bool fits_somewhere = false;
    bool all_hit = true;
    std::vector<Index> lo(w.dim()), hi(w.dim());
    // iterate anchors of {x,...,x+R}^d inside the window
    std::vector<Index> anchor(w.dim());
    for (int a = 0; a < w.dim(); ++a) anchor[a] = w.lo[a];
    bool any_anchor = true;
    for (int a = 0; a < w.dim(); ++a)
      if (w.lo[a] + R > w.hi[a]) any_anchor = false;
    if (!any_anchor) return 1;  // no cube fits; floored
    while (true) {
      fits_somewhere = true;
      bool hit = false;
      // scan the cube
      std::vector<Index> ofs(w.dim(), 0);
      while (true) {
        LatticePoint p = LatticePoint::zero(w.dim());
        for (int a = 0; a < w.dim(); ++a) p[a] = anchor[a] + ofs[a];
        if (D.contains(p)) {
          hit = true;
          break;
        }
        int ax = w.dim() - 1;
        for (; ax >= 0; --ax) {
          if (ofs[ax] < R) {
            ++ofs[ax];
            for (int j = ax + 1; j < w.dim(); ++j) ofs[j] = 0;
            break;
          }
        }
        if (ax < 0) break;
      }
      if (!hit) {
        all_hit = false;
        break;
      }
      int ax = w.dim() - 1;
      for (; ax >= 0; --ax) {
        if (anchor[ax] + 1 + R <= w.hi[ax]) {
          ++anchor[ax];
          for (int j = ax + 1; j < w.dim(); ++j) anchor[j] = w.lo[j];
          break;
        }
      }
      if (ax < 0) break;
    }
    if (fits_somewhere && all_hit) return R;
  }
}

}  // namespace

TEST_CASE("generate_periodic basics") {
  auto D = generate_periodic(1, 3, win1(0, 9));
  auto pts = D.points();
  REQUIRE(pts.size() == 4);
  CHECK(pts[0][0] == 0);
  CHECK(pts[1][0] == 3);
  CHECK(pts[2][0] == 6);
  CHECK(pts[3][0] == 9);
  CHECK(D.declared_R() == 2);
  CHECK(compute_R(D) == 2);
  CHECK(compute_R(D) == brute_force_R(D));

  auto full = generate_periodic(1, 1, win1(0, 9));
  CHECK(full.size() == 10);
  CHECK(full.declared_R() == 1);
  CHECK(compute_R(full) == 1);

  auto grid = generate_periodic(2, 2, Window(pt({0, 0}), pt({4, 4})));
  CHECK(grid.size() == 9);

  CHECK_THROWS_AS(generate_periodic(1, 0, win1(0, 9)), std::invalid_argument);
}

TEST_CASE("compute_R spec examples and oracle") {
  auto D = DeloneSet(win1(0, 9), {pt({0}), pt({9})}, 8);
  CHECK(compute_R(D) == 8);
  CHECK(brute_force_R(D) == 8);

  auto full = generate_periodic(1, 1, win1(0, 9));
  CHECK(compute_R(full) == 1);

  // negative-coordinate window, d=2
  auto D2 = generate_periodic(2, 3, Window(pt({-6, -6}), pt({6, 6})));
  CHECK(compute_R(D2) == brute_force_R(D2));
}

TEST_CASE("sturmian golden cut") {
  const double alpha = (std::sqrt(5.0) - 1.0) / 2.0;
  auto D = generate_sturmian(alpha, 0.5, win1(0, 9));
  auto pts = D.points();
  std::vector<Index> got;
  for (auto& p : pts) got.push_back(p[0]);
  CHECK(got == std::vector<Index>{0, 2, 4, 5, 7});

  auto full = generate_sturmian(alpha, 1.0, win1(0, 9));
  CHECK(full.size() == 10);

  CHECK_THROWS_AS(generate_sturmian(alpha, 0.0, win1(0, 9)), std::invalid_argument);

  // Long-window singleton frequency tracks beta (equidistribution).
  const Index N = 100000;
  auto big = generate_sturmian(alpha, 0.5, win1(0, N));
  const double density = double(big.size()) / double(N + 1);
  CHECK(std::abs(density - 0.5) < 1e-2);
}

TEST_CASE("sturmian cut evaluation flags near-boundary comparisons") {
  auto ev = sturmian_cut(2, 0.25, 0.5);  // frac = 0.5 exactly, on the cut
  CHECK(ev.near_boundary);
  auto far = sturmian_cut(3, (std::sqrt(5.0) - 1.0) / 2.0, 0.5);
  CHECK(!far.near_boundary);
}

TEST_CASE("random cell generator") {
  auto full = generate_random_cell(1, 1, win1(0, 9), 123);
  CHECK(full.size() == 10);  // c = 1 forces every site

  auto D = generate_random_cell(1, 3, win1(0, 99), 7);
  CHECK(compute_R(D) <= 3);
  CHECK(brute_force_R(D) <= 3);

  auto again = generate_random_cell(1, 3, win1(0, 99), 7);
  CHECK(D.points() == again.points());
  auto other = generate_random_cell(1, 3, win1(0, 99), 8);
  CHECK(D.points() != other.points());

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto G = generate_random_cell(2, 2, Window(pt({-10, -10}), pt({10, 10})), seed);
    CHECK(compute_R(G) <= 2);
    for (const auto& p : G.points()) CHECK(G.window().contains(p));
  }

  CHECK_THROWS_AS(generate_random_cell(1, 0, win1(0, 9), 1), std::invalid_argument);
}

TEST_CASE("generator invariant: compute_R within declared_R") {
  auto p3 = generate_periodic(1, 5, win1(-50, 50));
  CHECK(compute_R(p3) <= p3.declared_R());
  auto st = generate_sturmian((std::sqrt(5.0) - 1.0) / 2.0, 0.3, win1(-200, 200));
  CHECK(compute_R(st) <= st.declared_R());
  auto rc = generate_random_cell(1, 4, win1(0, 200), 3);
  CHECK(compute_R(rc) <= rc.declared_R());
}

TEST_CASE("enumerate_patterns censuses") {
  auto D = generate_periodic(1, 2, win1(0, 9));
  auto census = enumerate_patterns(D, 1);
  REQUIRE(census.size() == 2);
  long long total = 0;
  for (auto& [q, c] : census) total += c;
  CHECK(total == 9);  // anchors of side-1 cubes in [0,9]
  // counts 5 ({0} at even anchors) and 4 ({1} at odd anchors)
  std::vector<long long> counts = {census[0].second, census[1].second};
  std::sort(counts.begin(), counts.end());
  CHECK(counts == std::vector<long long>{4, 5});

  auto full = generate_periodic(1, 1, win1(0, 9));
  CHECK(enumerate_patterns(full, 3).size() == 1);

  auto D3 = generate_periodic(1, 3, win1(0, 9));
  CHECK(enumerate_patterns(D3, 2).size() == 3);
}

TEST_CASE("pattern normalization is idempotent and anchored") {
  Pattern at_zero(1, 1, {pt({0})});
  Pattern at_one(1, 1, {pt({1})});
  CHECK(!(at_zero == at_one));  // offsets within the cube are significant
  Pattern shifted(1, 1, {pt({5})});  // outside the cube: normalized to {0}
  CHECK(shifted == at_zero);
  CHECK_THROWS_AS(Pattern(1, 1, {pt({0}), pt({5})}), std::invalid_argument);
}

TEST_CASE("pattern_frequency exact fractions") {
  auto D = generate_periodic(1, 2, win1(-40, 40));
  Pattern singleton(1, 0, {pt({0})});
  auto eta = pattern_frequency(D, singleton, pt({0}), 10);
  CHECK(eta == Fraction(11, 21));

  // larger L approaches the density 1/2
  auto eta2 = pattern_frequency(D, singleton, pt({0}), 30);
  CHECK(std::abs(eta2.value() - 0.5) <= 1.0 / 61.0);

  // full lattice, full-cube pattern: 1 minus the boundary-anchor fraction
  auto full = generate_periodic(1, 1, win1(-10, 10));
  std::vector<LatticePoint> cube_pts;
  for (Index i = 0; i <= 2; ++i) cube_pts.push_back(pt({i}));
  Pattern full_cube(1, 2, cube_pts);
  auto eta3 = pattern_frequency(full, full_cube, pt({0}), 10);
  CHECK(eta3 == Fraction(19, 21));

  CHECK_THROWS_AS(pattern_frequency(D, singleton, pt({0}), 1000), std::invalid_argument);
}

TEST_CASE("supf diagnostic") {
  auto D = generate_periodic(1, 2, win1(-1200, 1200));
  Pattern singleton(1, 0, {pt({0})});
  std::vector<Index> Ls = {5, 10, 50, 100};
  std::vector<LatticePoint> centers = {pt({0}), pt({7}), pt({-13}), pt({100})};
  auto rep = supf_diagnostic(D, singleton, Ls, centers);
  REQUIRE(rep.per_scale_deviation.size() == 4);
  for (size_t i = 0; i < Ls.size(); ++i)
    CHECK(rep.per_scale_deviation[i] <= 1.0 / double(2 * Ls[i] + 1) + 1e-15);
  CHECK(rep.strictly_positive);
  CHECK(std::abs(rep.limit_estimate - 0.5) < 0.01);

  // absent pattern: all eta zero
  Pattern pair(1, 1, {pt({0}), pt({1})});  // two adjacent points never occur in 2Z
  auto rep0 = supf_diagnostic(D, pair, {10, 20}, {pt({0})});
  CHECK(rep0.limit_estimate == 0.0);
  CHECK(!rep0.strictly_positive);
}

TEST_CASE("supf diagnostic on the golden sturmian set") {
  const double alpha = (std::sqrt(5.0) - 1.0) / 2.0;
  auto D = generate_sturmian(alpha, 0.5, win1(-14000, 14000));
  Pattern singleton(1, 0, {pt({0})});
  auto rep = supf_diagnostic(D, singleton, {100, 1000, 10000}, {pt({-2000}), pt({0}), pt({2000})});
  CHECK(std::abs(rep.limit_estimate - 0.5) < 1e-2);
  CHECK(rep.uniformity_deviation < 1e-2);
  CHECK(rep.strictly_positive);
}

TEST_CASE("find_disjoint_repetitions greedy search") {
  auto D = generate_periodic(1, 2, win1(-10, 120));
  auto Q = pattern_at(D, pt({0}), 3);
  auto out = find_disjoint_repetitions(D, Q, 3, win1(0, 100));
  REQUIRE(out.translations.size() == 3);
  CHECK(out.translations[0][0] == 0);
  CHECK(out.translations[1][0] == 4);
  CHECK(out.translations[2][0] == 8);
  CHECK(!out.exhausted);
  // re-verify window-content equality and disjointness
  for (size_t i = 0; i < out.translations.size(); ++i) {
    CHECK(pattern_at(D, out.translations[i], 3) == Q);
    for (size_t j = i + 1; j < out.translations.size(); ++j)
      CHECK(std::abs(out.translations[i][0] - out.translations[j][0]) > 3);
  }

  auto full = generate_periodic(1, 1, win1(0, 20));
  auto qfull = pattern_at(full, pt({0}), 2);
  auto two = find_disjoint_repetitions(full, qfull, 2, win1(0, 20));
  REQUIRE(two.translations.size() == 2);
  CHECK(two.translations[0][0] == 0);
  CHECK(two.translations[1][0] == 3);

  // insufficiency flag when the window cannot host the requested count
  auto scarce = find_disjoint_repetitions(D, Q, 1000, win1(0, 40));
  CHECK(scarce.exhausted);
  CHECK(scarce.translations.size() < 1000);
}

TEST_CASE("find_disjoint_repetitions on sturmian content") {
  const double alpha = (std::sqrt(5.0) - 1.0) / 2.0;
  auto D = generate_sturmian(alpha, 0.5, win1(0, 100000));
  auto Q = pattern_at(D, pt({10}), 4);
  auto out = find_disjoint_repetitions(D, Q, 5, win1(0, 100000 - 4));
  CHECK(out.translations.size() == 5);
  for (const auto& v : out.translations) CHECK(pattern_at(D, v, 4) == Q);
}

TEST_CASE("complement") {
  auto D = generate_periodic(1, 2, win1(0, 9));
  auto C = complement(D);
  auto pts = C.points();
  std::vector<Index> got;
  for (auto& p : pts) got.push_back(p[0]);
  CHECK(got == std::vector<Index>{1, 3, 5, 7, 9});
  CHECK(C.declared_R() == 1);

  auto D3 = DeloneSet(win1(0, 9), {pt({0}), pt({3}), pt({6}), pt({9})}, 2);
  auto C3 = complement(D3);
  got.clear();
  for (auto& p : C3.points()) got.push_back(p[0]);
  CHECK(got == std::vector<Index>{1, 2, 4, 5, 7, 8});
  CHECK(compute_R(C3) == 1);

  auto full = generate_periodic(1, 1, win1(0, 9));
  CHECK_THROWS_AS(complement(full), NonDeloneError);

  // involution where both sides exist
  auto CC = complement(C3);
  CHECK(CC.points() == D3.points());
}

TEST_CASE("delone file format round trip") {
  auto D = generate_periodic(2, 3, Window(pt({-6, -4}), pt({6, 8})));
  std::ostringstream os;
  save_delone(D, os);
  std::istringstream is(os.str());
  auto back = load_delone(is);
  CHECK(back.dim() == D.dim());
  CHECK(back.declared_R() == D.declared_R());
  CHECK(back.window() == D.window());
  CHECK(back.points() == D.points());

  std::istringstream dup("# dim=1\n# R=1\n# window=0:5\n2\n2\n");
  CHECK_THROWS(load_delone(dup));
  std::istringstream outside("# dim=1\n# R=1\n# window=0:5\n9\n");
  CHECK_THROWS_AS(load_delone(outside), ConfigError);
  std::istringstream noheader("3 4\n");
  CHECK_THROWS_AS(load_delone(noheader), ConfigError);
}
