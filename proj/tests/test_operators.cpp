#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dal/operators.hpp"
#include "dal/rng.hpp"

using namespace dal;

namespace {
Window win1(Index lo, Index hi) { return Window(LatticePoint({lo}), LatticePoint({hi})); }
LatticePoint pt(std::initializer_list<Index> c) { return LatticePoint(std::vector<Index>(c)); }

PotentialSample manual_sample(const DeloneSet& D, const BoxSpec& box, double value) {
  PotentialSample s;
  s.box = box;
  const Window w = box.window();
  for (Index i = 0; i < w.site_count(); ++i)
    if (D.contains(w.point_at(i))) {
      s.dsite_indices.push_back(i);
      s.values.push_back(value);
    }
  return s;
}
}  // namespace

TEST_CASE("laplacian single site and bounds") {
  auto H = assemble_laplacian(BoxSpec(pt({0}), 0));
  CHECK(H.dimension() == 1);
  CHECK(H.entry(0, 0) == 2.0);
  CHECK(H.bound_lo() == 0.0);
  CHECK(H.bound_hi() == 4.0);

  auto H2 = assemble_laplacian(BoxSpec(pt({5, -3}), 2));
  CHECK(H2.dimension() == 25);
  CHECK(H2.entry(0, 0) == 4.0);
  CHECK(H2.is_symmetric());
  CHECK(H2.bound_hi() == 8.0);
}

TEST_CASE("laplacian nearest-neighbor pattern") {
  // d=2, L=1: site (0,0) has neighbors (±1,0),(0,±1) inside the box
  BoxSpec box(pt({0, 0}), 1);
  auto H = assemble_laplacian(box);
  const Window w = box.window();
  Index c = w.linear_index(pt({0, 0}));
  CHECK(H.entry(c, w.linear_index(pt({1, 0}))) == -1.0);
  CHECK(H.entry(c, w.linear_index(pt({0, 1}))) == -1.0);
  CHECK(H.entry(c, w.linear_index(pt({-1, 0}))) == -1.0);
  CHECK(H.entry(c, w.linear_index(pt({0, -1}))) == -1.0);
  CHECK(H.entry(c, w.linear_index(pt({1, 1}))) == 0.0);
}

TEST_CASE("sample_potential determinism, support, and mean") {
  auto D = generate_periodic(1, 2, win1(-200, 200));
  BoxSpec box(pt({0}), 100);
  auto dis = DisorderSpec::uniform(1.0);
  auto s1 = sample_potential(D, box, dis, 42, 3);
  auto s2 = sample_potential(D, box, dis, 42, 3);
  CHECK(s1.values == s2.values);
  CHECK(s1.dsite_indices == s2.dsite_indices);
  auto s3 = sample_potential(D, box, dis, 42, 4);
  CHECK(s1.values != s3.values);
  for (double v : s1.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(s1.dsite_indices.size() == 101);  // evens in [-100, 100]

  // LLN across many samples
  double sum = 0.0, sumsq = 0.0;
  long long n = 0;
  for (int k = 0; k < 1000; ++k) {
    auto s = sample_potential(D, box, dis, 7, static_cast<std::uint64_t>(k));
    for (double v : s.values) {
      sum += v;
      sumsq += v * v;
      ++n;
    }
  }
  const double mean = sum / double(n);
  const double sd = std::sqrt(sumsq / double(n) - mean * mean);
  CHECK(std::abs(mean - dis.mean()) <= 3.0 * sd / std::sqrt(double(n)));

  CHECK_THROWS_AS(sample_potential(D, BoxSpec(pt({0}), 500), dis, 1, 0), std::invalid_argument);
}

TEST_CASE("translation covariance of the draws") {
  // Boxes whose D-contents are translates receive identical values by rank.
  auto D = generate_periodic(1, 3, win1(-300, 300));
  auto dis = DisorderSpec::uniform(1.0);
  auto a = sample_potential(D, BoxSpec(pt({0}), 50), dis, 5, 9);
  auto b = sample_potential(D, BoxSpec(pt({3}), 50), dis, 5, 9);
  CHECK(a.values == b.values);
}

TEST_CASE("hamiltonian assembly") {
  auto D = generate_periodic(1, 2, win1(-30, 30));
  BoxSpec box(pt({0}), 10);
  auto zero = manual_sample(D, box, 0.0);
  auto H = assemble_hamiltonian(box, D, zero, 1.0);
  auto H0 = assemble_laplacian(box);
  CHECK(H.row_ptr() == H0.row_ptr());
  CHECK(H.cols() == H0.cols());
  CHECK(H.values() == H0.values());

  auto full = generate_periodic(1, 1, win1(-30, 30));
  auto shift = manual_sample(full, box, 0.75);
  auto Hc = assemble_hamiltonian(box, full, shift, 1.0);
  for (Index i = 0; i < Hc.dimension(); ++i)
    CHECK(Hc.entry(i, i) == doctest::Approx(2.0 + 0.75));
  CHECK(Hc.is_symmetric());

  BoxSpec other(pt({1}), 10);
  CHECK_THROWS_AS(assemble_hamiltonian(other, D, zero, 1.0), std::invalid_argument);
}

TEST_CASE("deterministic delone potential") {
  auto full = generate_periodic(1, 1, win1(-10, 10));
  BoxSpec box(pt({0}), 2);
  auto ones = assemble_deterministic_delone_potential(box, full);
  CHECK(ones == std::vector<double>{1, 1, 1, 1, 1});

  auto D = generate_periodic(1, 2, win1(-10, 10));
  auto par = assemble_deterministic_delone_potential(box, D);
  CHECK(par == std::vector<double>{1, 0, 1, 0, 1});

  BoxSpec wide(pt({0}), 7);
  auto v = assemble_deterministic_delone_potential(wide, D);
  double s = 0;
  for (double x : v) s += x;
  CHECK(s == 7.0);  // evens in [-7, 7]
}

TEST_CASE("reflected operator routes agree") {
  // 1-site: H~ = [2 + M - v]
  auto D1 = generate_periodic(1, 1, win1(-1, 1));
  BoxSpec site(pt({0}), 0);
  PotentialSample sv;
  sv.box = site;
  sv.dsite_indices = {0};
  sv.values = {0.3};
  auto Ht = assemble_reflected(site, D1, sv, 1.0);
  CHECK(Ht.dimension() == 1);
  CHECK(Ht.entry(0, 0) == doctest::Approx(2.0 + 1.0 - 0.3));
  auto Hv = assemble_hamiltonian(site, D1, sv, 1.0);
  auto Hr = reflect_operator(Hv, 4.0 * 1 + 1.0);
  CHECK(std::abs(Ht.entry(0, 0) - Hr.entry(0, 0)) < 1e-12);

  // structural case: omega = M makes the D-site coupling vanish
  auto D = generate_periodic(1, 2, win1(-20, 20));
  BoxSpec box(pt({0}), 6);
  auto sM = manual_sample(D, box, 2.0);
  auto HtM = assemble_reflected(box, D, sM, 2.0);
  const Window w = box.window();
  for (Index i = 0; i < HtM.dimension(); ++i) {
    const bool on_d = D.contains(w.point_at(i));
    CHECK(HtM.entry(i, i) == doctest::Approx(on_d ? 2.0 : 4.0));
    if (i + 1 < HtM.dimension()) CHECK(HtM.entry(i, i + 1) == 1.0);
  }

  // random instances: entrywise agreement of both routes
  auto dis = DisorderSpec::uniform(1.5);
  for (int inst = 0; inst < 20; ++inst) {
    auto sample = sample_potential(D, box, dis, 11, static_cast<std::uint64_t>(inst));
    auto A = assemble_reflected(box, D, sample, 1.5);
    auto B = reflect_operator(assemble_hamiltonian(box, D, sample, 1.5), 4.0 + 1.5);
    REQUIRE(A.row_ptr() == B.row_ptr());
    REQUIRE(A.cols() == B.cols());
    for (size_t k = 0; k < A.values().size(); ++k)
      CHECK(std::abs(A.values()[k] - B.values()[k]) < 1e-12);
  }
}

TEST_CASE("averaged potential") {
  auto full = generate_periodic(1, 1, win1(-10, 10));
  BoxSpec box(pt({0}), 5);
  auto V = assemble_deterministic_delone_potential(box, full);
  auto W = averaged_potential(V, box, 1, 1);
  const Window w = box.window();
  CHECK(W[static_cast<size_t>(w.linear_index(pt({0})))] == doctest::Approx(1.0));
  // boundary site n = L: only {3,4,5} of the 2R-window survive
  CHECK(W[static_cast<size_t>(w.linear_index(pt({5})))] == doctest::Approx(3.0 / 5.0));

  std::vector<double> c(11, 0.37);
  auto Wc = averaged_potential(c, box, 1, 1);
  CHECK(Wc[static_cast<size_t>(w.linear_index(pt({0})))] == doctest::Approx(0.37));

  CHECK_THROWS_AS(averaged_potential(V, box, 3, 2), std::invalid_argument);  // L <= RK
}

TEST_CASE("operator export format") {
  auto H = assemble_laplacian(BoxSpec(pt({0}), 1));
  std::ostringstream os;
  export_operator(H, os);
  std::istringstream is(os.str());
  long long r, c;
  double v;
  long long count = 0;
  double sum = 0.0;
  while (is >> r >> c >> v) {
    ++count;
    sum += v;
  }
  CHECK(count == H.nnz());
  CHECK(sum == doctest::Approx(2.0 * 3 - 2.0 * 2));  // trace 6, off-diagonals -1 x4
}

TEST_CASE("matvec and quadratic form consistency") {
  auto D = generate_periodic(2, 2, Window(pt({-8, -8}), pt({8, 8})));
  BoxSpec box(pt({0, 0}), 4);
  auto dis = DisorderSpec::uniform(1.0);
  auto sample = sample_potential(D, box, dis, 3, 0);
  auto H = assemble_hamiltonian(box, D, sample, 1.0);
  std::vector<double> x(static_cast<size_t>(H.dimension()));
  RandomStream rng(1, 5);
  for (auto& xi : x) xi = rng.uniform01() - 0.5;
  std::vector<double> y(x.size());
  H.matvec(x, y);
  double xy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) xy += x[i] * y[i];
  CHECK(H.quadratic_form(x) == doctest::Approx(xy).epsilon(1e-12));
}
