#include <doctest.h>

#include <cmath>

#include "dal/spectral.hpp"

using namespace dal;

namespace {
Window win1(Index lo, Index hi) { return Window(LatticePoint({lo}), LatticePoint({hi})); }
LatticePoint pt(std::initializer_list<Index> c) { return LatticePoint(std::vector<Index>(c)); }

// Closed form: restricted 1-D Laplacian on N sites has eigenvalues
// 2 - 2 cos(k pi / (N+1)), k = 1..N.
double chain_eigenvalue(Index N, Index k) { return 2.0 - 2.0 * std::cos(M_PI * double(k) / double(N + 1)); }
}  // namespace

TEST_CASE("eig_full on the free chain matches the closed form") {
  const Index L = 200;  // N = 401
  auto H = assemble_laplacian(BoxSpec(pt({0}), L));
  auto res = eig_full(H);
  const Index N = H.dimension();
  REQUIRE(res.count() == N);
  for (Index k = 1; k <= N; ++k)
    CHECK(std::abs(res.eigenvalues[static_cast<size_t>(k - 1)] - chain_eigenvalue(N, k)) < 1e-10);

  // trace identity
  double tr = 0.0;
  for (double l : res.eigenvalues) tr += l;
  CHECK(tr == doctest::Approx(2.0 * double(N)).epsilon(1e-8));

  // eigenvector orthonormality spot check
  for (Index j : {Index(0), Index(5), Index(77)}) {
    CHECK(std::abs(res.eigenvectors.col(j).norm() - 1.0) < 1e-10);
    CHECK(std::abs(res.eigenvectors.col(j).dot(res.eigenvectors.col((j + 1) % N))) < 1e-10);
  }
  for (double r : res.residuals) CHECK(r <= res.tolerance);
}

TEST_CASE("eig_full 1x1 and threshold") {
  auto H = assemble_laplacian(BoxSpec(pt({0}), 0));
  auto res = eig_full(H);
  CHECK(res.eigenvalues == std::vector<double>{2.0});
  CHECK_THROWS_AS(eig_full(assemble_laplacian(BoxSpec(pt({0}), 3000)), true, 100),
                  std::invalid_argument);
}

TEST_CASE("eig_full dense path (d=2) contracts") {
  auto D = generate_periodic(2, 2, Window(pt({-10, -10}), pt({10, 10})));
  BoxSpec box(pt({0, 0}), 5);
  auto dis = DisorderSpec::uniform(1.0);
  auto sample = sample_potential(D, box, dis, 21, 0);
  auto H = assemble_hamiltonian(box, D, sample, 1.0);
  auto res = eig_full(H);
  CHECK(res.count() == 121);
  CHECK(res.min() >= -1e-10);
  CHECK(res.max() <= 8.0 + 1.0 + 1e-10);
  CHECK(std::is_sorted(res.eigenvalues.begin(), res.eigenvalues.end()));
  for (double r : res.residuals) CHECK(r <= res.tolerance);
}

TEST_CASE("eig_extremal tridiagonal path: large free chain edge") {
  const Index L = 2000;  // N = 4001
  auto H = assemble_laplacian(BoxSpec(pt({0}), L));
  auto res = eig_extremal(H, 1, Side::Low);
  CHECK(std::abs(res.eigenvalues[0] - chain_eigenvalue(4001, 1)) < 1e-10);
  auto high = eig_extremal(H, 2, Side::High);
  REQUIRE(high.count() == 2);
  CHECK(std::abs(high.eigenvalues[1] - chain_eigenvalue(4001, 4001)) < 1e-10);
  CHECK(high.eigenvalues[0] < high.eigenvalues[1]);
}

TEST_CASE("eig_extremal lanczos path agrees with the dense oracle") {
  auto D = generate_periodic(2, 3, Window(pt({-25, -25}), pt({25, 25})));
  BoxSpec box(pt({0, 0}), 10);  // N = 441
  auto dis = DisorderSpec::uniform(2.0);
  auto sample = sample_potential(D, box, dis, 5, 1);
  auto H = assemble_hamiltonian(box, D, sample, 2.0);
  REQUIRE(H.bandwidth() > 1);
  auto dense = eig_full(H);
  auto low = eig_extremal(H, 3, Side::Low, 1e-10);
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(low.eigenvalues[static_cast<size_t>(j)] -
                   dense.eigenvalues[static_cast<size_t>(j)]) < 1e-9);
  auto high = eig_extremal(H, 2, Side::High, 1e-10);
  CHECK(std::abs(high.eigenvalues[1] - dense.eigenvalues.back()) < 1e-9);
  CHECK(std::abs(high.eigenvalues[0] - dense.eigenvalues[dense.eigenvalues.size() - 2]) < 1e-9);
  for (double r : low.residuals) CHECK(r <= 1e-10);
}

TEST_CASE("eig_extremal on a diagonal operator returns the extreme entries") {
  OperatorBuilder b(6);
  const std::vector<double> diag = {3.0, -1.0, 7.5, 0.25, 5.0, -2.5};
  for (Index i = 0; i < 6; ++i) b.add_diagonal(i, diag[static_cast<size_t>(i)]);
  auto H = b.build();
  auto lo = eig_extremal(H, 1, Side::Low);
  CHECK(lo.eigenvalues[0] == doctest::Approx(-2.5));
  auto hi = eig_extremal(H, 1, Side::High);
  CHECK(hi.eigenvalues[0] == doctest::Approx(7.5));
  CHECK_THROWS_AS(eig_extremal(H, 0, Side::Low), std::invalid_argument);
  CHECK_THROWS_AS(eig_extremal(H, 7, Side::Low), std::invalid_argument);
}

TEST_CASE("dist_to_spectrum") {
  SpectralResult res;
  res.eigenvalues = {1.0, 3.0};
  CHECK(dist_to_spectrum(res, 2.0) == doctest::Approx(1.0));
  CHECK(dist_to_spectrum(res, 3.0) == doctest::Approx(0.0));
  CHECK(dist_to_spectrum(res, 2.9) == doctest::Approx(0.1));
  CHECK(dist_to_spectrum(res, -5.0) == doctest::Approx(6.0));
  SpectralResult empty;
  CHECK_THROWS_AS(dist_to_spectrum(empty, 0.0), std::invalid_argument);
}

TEST_CASE("spectral projection basis") {
  const Index L = 200;  // N = 401 > 400 sites
  auto H = assemble_laplacian(BoxSpec(pt({0}), L));
  const Index N = H.dimension();

  auto whole = spectral_projection_basis(H, 0.0, 4.0);
  CHECK(whole.dimension() == N);

  auto none = spectral_projection_basis(H, -2.0, -1e-6);
  CHECK(none.dimension() == 0);

  // closed-form count below 1e-3
  Index expected = 0;
  for (Index k = 1; k <= N; ++k)
    if (chain_eigenvalue(N, k) <= 1e-3) ++expected;
  auto low = spectral_projection_basis(H, 0.0, 1e-3);
  CHECK(low.dimension() == expected);
  CHECK(expected >= 1);

  // Rayleigh quotients inside the interval, orthonormal columns
  for (Index j = 0; j < low.dimension(); ++j) {
    Eigen::VectorXd v = low.basis.col(j);
    std::vector<double> hv(static_cast<size_t>(N));
    H.matvec(std::span<const double>(v.data(), static_cast<size_t>(N)),
             std::span<double>(hv.data(), hv.size()));
    double q = 0.0;
    for (Index i = 0; i < N; ++i) q += v[i] * hv[static_cast<size_t>(i)];
    CHECK(q >= -1e-10);
    CHECK(q <= 1e-3 + 1e-10);
    CHECK(std::abs(v.norm() - 1.0) < 1e-10);
  }

  // monotone in interval inclusion
  auto wider = spectral_projection_basis(H, 0.0, 2e-3);
  CHECK(wider.dimension() >= low.dimension());
}

TEST_CASE("projection basis on a large box via the band-edge path") {
  // d=2 operator above the dense threshold forces the extremal route.
  auto H = assemble_laplacian(BoxSpec(pt({0, 0}), 40));  // N = 6561 > 4096
  REQUIRE(H.dimension() > kDenseThreshold);
  auto low = spectral_projection_basis(H, 0.0, 0.004);
  // closed form: sum over axes of chain eigenvalues on 81 sites
  Index expected = 0;
  for (Index k1 = 1; k1 <= 81; ++k1)
    for (Index k2 = 1; k2 <= 81; ++k2)
      if (chain_eigenvalue(81, k1) + chain_eigenvalue(81, k2) <= 0.004) ++expected;
  CHECK(expected >= 1);
  CHECK(low.dimension() == expected);
  CHECK_THROWS_AS(spectral_projection_basis(H, 2.0, 2.1), std::invalid_argument);
}

TEST_CASE("estimate_ids: near-deterministic case counts H0 eigenvalues") {
  auto full = generate_periodic(1, 1, win1(-60, 60));
  const Index L = 20;  // N = 41
  auto H0 = assemble_laplacian(BoxSpec(pt({0}), L));
  auto free_res = eig_full(H0, false);
  // grid strictly between consecutive eigenvalues; a 1e-14 disorder cannot
  // move any count
  std::vector<double> grid;
  grid.push_back(-0.5);
  for (size_t k = 0; k + 1 < free_res.eigenvalues.size(); ++k)
    grid.push_back(0.5 * (free_res.eigenvalues[k] + free_res.eigenvalues[k + 1]));
  grid.push_back(5.0);
  auto dis = DisorderSpec::uniform(1e-14);
  auto curve = estimate_ids(full, dis, L, {pt({0})}, 3, grid, 9);
  for (size_t e = 0; e < grid.size(); ++e) {
    auto it = std::upper_bound(free_res.eigenvalues.begin(), free_res.eigenvalues.end(), grid[e]);
    const double expect = double(it - free_res.eigenvalues.begin()) / 41.0;
    CHECK(curve.mean[e] == doctest::Approx(expect));
  }
  CHECK(curve.mean.front() == 0.0);
  CHECK(curve.mean.back() == 1.0);
}

TEST_CASE("estimate_ids: period-shifted centers give identical curves") {
  auto D = generate_periodic(1, 3, win1(-200, 200));
  auto dis = DisorderSpec::uniform(1.0);
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(-0.2 + 5.6 * i / 40.0);
  auto curve = estimate_ids(D, dis, 15, {pt({0}), pt({3})}, 5, grid, 31);
  CHECK(curve.uniformity == 0.0);  // exact translation symmetry, bit for bit
  for (size_t e = 0; e < grid.size(); ++e) CHECK(curve.center_spread[e] == 0.0);
  // monotone, normalized
  for (size_t e = 1; e < grid.size(); ++e) CHECK(curve.mean[e] >= curve.mean[e - 1]);
}
