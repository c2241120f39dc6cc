#include <doctest.h>

#include <cmath>

#include "dal/dynamics.hpp"

using namespace dal;

namespace {
Window win1(Index lo, Index hi) { return Window(LatticePoint({lo}), LatticePoint({hi})); }
LatticePoint pt(std::initializer_list<Index> c) { return LatticePoint(std::vector<Index>(c)); }
}  // namespace

TEST_CASE("bessel array: Parseval identity and small-z reference") {
  for (double z : {0.5, 10.0, 150.0, 2500.0}) {
    auto J = bessel_j_array(z, static_cast<int>(z) + 120);
    double parseval = J[0] * J[0];
    for (size_t k = 1; k < J.size(); ++k) parseval += 2.0 * J[k] * J[k];
    CHECK(parseval == doctest::Approx(1.0).epsilon(1e-12));
  }
  auto J = bessel_j_array(10.0, 40);
  for (int k = 0; k <= 30; ++k)
    CHECK(J[static_cast<size_t>(k)] == doctest::Approx(std::cyl_bessel_j(k, 10.0)).epsilon(1e-11));
  auto J0 = bessel_j_array(0.0, 5);
  CHECK(J0[0] == 1.0);
  CHECK(J0[3] == 0.0);
}

TEST_CASE("evolve_exact: stationary states and unitarity") {
  auto H = assemble_laplacian(BoxSpec(pt({0}), 25));
  auto psi0 = delta_packet(BoxSpec(pt({0}), 25));
  auto at0 = evolve_exact(H, psi0, {0.0});
  CHECK((at0[0].amplitudes - psi0.amplitudes).norm() < 1e-12);

  auto res = eig_full(H);
  WavePacket eigen;
  eigen.box = psi0.box;
  eigen.amplitudes = res.eigenvectors.col(3).cast<std::complex<double>>();
  const double lambda = res.eigenvalues[3];
  auto evolved = evolve_exact(H, eigen, {0.7});
  const std::complex<double> phase = std::exp(std::complex<double>(0.0, -lambda * 0.7));
  CHECK((evolved[0].amplitudes - phase * eigen.amplitudes).norm() < 1e-10);

  for (double t : {1.0, 17.0, 300.0}) {
    auto psit = evolve_exact(H, psi0, {t});
    CHECK(std::abs(psit[0].norm() - 1.0) < 1e-10);
  }
}

TEST_CASE("chebyshev propagator agrees with the dense propagator") {
  auto D = generate_periodic(1, 2, win1(-300, 300));
  BoxSpec box(pt({0}), 250);
  auto dis = DisorderSpec::uniform(1.0);
  auto sample = sample_potential(D, box, dis, 8, 0);
  auto H = assemble_hamiltonian(box, D, sample, 1.0);
  auto psi0 = delta_packet(box);

  for (double t : {0.0, 1.0, 10.0, 100.0}) {
    auto exact = evolve_exact(H, psi0, {t});
    auto cheb = evolve_chebyshev(H, psi0, t, 1e-8);
    CHECK((exact[0].amplitudes - cheb.psi.amplitudes).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK(cheb.norm_drift <= 1e-8);
  }

  // energy conservation along a trajectory
  const double e0 = (psi0.amplitudes.adjoint() *
                     [&] {
                       Eigen::VectorXcd y(H.dimension());
                       H.matvec(std::span<const std::complex<double>>(psi0.amplitudes.data(),
                                                                      psi0.amplitudes.size()),
                                std::span<std::complex<double>>(y.data(), y.size()));
                       return y;
                     }())
                        .real()(0);
  auto far = evolve_chebyshev(H, psi0, 500.0, 1e-8);
  Eigen::VectorXcd y(H.dimension());
  H.matvec(std::span<const std::complex<double>>(far.psi.amplitudes.data(),
                                                 far.psi.amplitudes.size()),
           std::span<std::complex<double>>(y.data(), y.size()));
  const double e1 = (far.psi.amplitudes.adjoint() * y).real()(0);
  CHECK(std::abs(e1 - e0) < 1e-8);
}

TEST_CASE("chebyshev propagator needs bound hints") {
  OperatorBuilder b(3);
  for (Index i = 0; i < 3; ++i) b.add_diagonal(i, 1.0);
  auto H = b.build();  // no hints set
  WavePacket psi;
  psi.box = BoxSpec(pt({0}), 1);
  psi.amplitudes = Eigen::VectorXcd::Ones(3);
  CHECK_THROWS_AS(evolve_chebyshev(H, psi, 1.0, 1e-8), std::invalid_argument);
}

TEST_CASE("moment closed forms") {
  BoxSpec box(pt({0}), 10);
  auto psi = delta_packet(box);
  CHECK(moment(psi, 0.0, pt({0})) == doctest::Approx(1.0));
  CHECK(moment(psi, 2.0, pt({0})) == doctest::Approx(1.0));
  CHECK(moment(psi, 7.0, pt({0})) == doctest::Approx(1.0));

  auto shifted = delta_packet(box, pt({4}));
  for (double p : {0.5, 2.0, 4.0})
    CHECK(moment(shifted, p, pt({0})) == doctest::Approx(std::pow(1.0 + 16.0, p / 4.0)));

  // p = 0 returns the norm; monotone in p for unit vectors since <X> >= 1
  Eigen::VectorXcd amp = Eigen::VectorXcd::Random(21);
  amp.normalize();
  WavePacket spread{box, amp, 0.0};
  CHECK(moment(spread, 0.0, pt({0})) == doctest::Approx(1.0));
  double prev = 0.0;
  for (double p : {0.0, 1.0, 2.0, 3.0}) {
    double m = moment(spread, p, pt({0}));
    CHECK(m >= prev - 1e-12);
    prev = m;
  }
  CHECK_THROWS_AS(moment(spread, -1.0, pt({0})), std::invalid_argument);
}

TEST_CASE("ipr extremes") {
  BoxSpec box(pt({0}), 10);
  auto delta = delta_packet(box);
  CHECK(ipr(delta.amplitudes) == doctest::Approx(1.0));
  Eigen::VectorXcd uniform = Eigen::VectorXcd::Constant(21, 1.0 / std::sqrt(21.0));
  CHECK(ipr(uniform) == doctest::Approx(1.0 / 21.0));
  Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(5);
  CHECK_THROWS_AS(ipr(zero), std::invalid_argument);
}

TEST_CASE("strong disorder localizes the ground state (ipr comparison)") {
  const Index L = 500;  // N = 1001
  auto full = generate_periodic(1, 1, win1(-520, 520));
  BoxSpec box(pt({0}), L);
  auto H0 = assemble_laplacian(box);
  const double free_ipr = ipr(Eigen::VectorXd(eig_extremal(H0, 1, Side::Low).eigenvectors.col(0)));

  auto dis = DisorderSpec::uniform(10.0);
  auto sample = sample_potential(full, box, dis, 3141, 0);
  auto H = assemble_hamiltonian(box, full, sample, 10.0);
  const double disordered_ipr =
      ipr(Eigen::VectorXd(eig_extremal(H, 1, Side::Low).eigenvectors.col(0)));
  CHECK(disordered_ipr >= 10.0 * free_ipr);
}

TEST_CASE("localization profile: t = 0 matches the projected moment") {
  auto D = generate_periodic(1, 2, win1(-40, 40));
  BoxSpec box(pt({0}), 15);
  auto dis = DisorderSpec::uniform(1.0);
  auto psi0 = delta_packet(box);
  auto trace = localization_profile(D, dis, box, 0.0, 9.0, psi0, 2.0, {0.0, 1.0}, 3, 6);
  // interval covers the whole band: projection is the identity
  CHECK(trace.mean[0] == doctest::Approx(moment(psi0, 2.0, pt({0}))).epsilon(1e-9));
  CHECK(trace.negligible_fraction == 0.0);
  REQUIRE(trace.sample_values.size() == 3);

  CHECK_THROWS_AS(localization_profile(D, dis, box, 12.0, 15.0, psi0, 2.0, {0.0}, 2, 1),
                  std::invalid_argument);
}

TEST_CASE("saturation ratio handles empty and vanishing windows") {
  MomentTrace trace;
  trace.times = {1.0, 2.0, 3.0};
  trace.mean = {0.0, 0.0, 0.0};
  CHECK(std::isnan(trace.saturation_ratio(0.5, 3.5)));
  CHECK(std::isnan(trace.saturation_ratio(10.0, 20.0)));
  trace.mean = {2.0, 3.0, 4.0};
  CHECK(trace.saturation_ratio(0.5, 3.5) == doctest::Approx(2.0));
}
