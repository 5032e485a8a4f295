#include <doctest.h>

#include <cmath>
#include <random>

#include "hydrolim/lsi.hpp"
#include "oracles.hpp"

using namespace hydrolim;

namespace {

SingleSitePotential gaussian() { return SingleSitePotential(Perturbation{Zero{}}); }
SingleSitePotential cosine() { return SingleSitePotential(Perturbation{Cosine{0.1, 1.0}}); }

}  // namespace

TEST_CASE("two-scale combination") {
  CHECK(two_scale_combine(3.0, 1.0, 0.0) == 1.0);
  CHECK(two_scale_combine(1.0, 1.0, 0.0) == 1.0);
  CHECK(two_scale_combine(1.0, 1.0, 3.0) ==
        doctest::Approx(0.5 * (5.0 - std::sqrt(21.0))).epsilon(1e-14));
  CHECK_THROWS_AS(two_scale_combine(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(two_scale_combine(1.0, 1.0, -1.0), std::invalid_argument);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int t = 0; t < 200; ++t) {
    const double r1 = u(rng), r2 = u(rng), k = u(rng);
    CHECK(std::abs(two_scale_combine(r1, r2, 0.0) - std::min(r1, r2)) < 1e-12);
    const double base = two_scale_combine(r1, r2, k);
    // Direct formula.
    const double s = r1 + (1 + k) * r2;
    CHECK(base == doctest::Approx(0.5 * (s - std::sqrt(s * s - 4 * r1 * r2))).epsilon(1e-10));
    CHECK(base <= std::min(r1, r2));
    CHECK(two_scale_combine(r1, r2, k + 0.5) <= base);
    CHECK(two_scale_combine(r1 + 0.5, r2, k) >= base);
    CHECK(two_scale_combine(r1, r2 + 0.5, k) >= base);
  }
}

TEST_CASE("elementary criteria") {
  CHECK(holley_stroock(0.7, 0.0) == 0.7);
  CHECK(holley_stroock(1.0, 0.8) == doctest::Approx(std::exp(-1.6)).epsilon(1e-15));
  CHECK(tensorize({0.7, 0.3, 0.5}) == 0.3);
  CHECK_THROWS_AS(tensorize({}), std::invalid_argument);
  std::vector<Eigen::VectorXd> grid;
  for (int i = 0; i < 5; ++i) grid.push_back(Eigen::VectorXd::Constant(4, i - 2.0));
  auto id = [](const Eigen::VectorXd& x) {
    return Eigen::MatrixXd::Identity(x.size(), x.size()).eval();
  };
  CHECK(bakry_emery(id, grid) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(bakry_emery(id, {}), std::invalid_argument);
}

TEST_CASE("conditional LSI chain") {
  auto g = gaussian();
  auto cert = convexity_scan(g, 8, 1);
  CHECK(cert.lambda == doctest::Approx(1.0).epsilon(1e-12));
  LsiChain c = conditional_lsi_pipeline(g, 64, 2, 32, 1, 8, cert);
  CHECK(c.rho1 == 1.0);
  CHECK(c.kappa == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.rho_dg == doctest::Approx(0.5 * (3.0 - std::sqrt(5.0))).epsilon(1e-12));
  CHECK(c.rho_final > 0.0);
  CHECK(c.rho_final <= c.rho_dg);

  CHECK_THROWS_AS(conditional_lsi_pipeline(g, 64, 2, 32, 1, 8, std::nullopt),
                  std::invalid_argument);
  CHECK_THROWS_AS(conditional_lsi_pipeline(g, 64, 2, 32, 1, 16, cert), std::invalid_argument);

  // osc = 0.2 with J = 4 gives rho1 = exp(-1.6).
  SingleSitePotential c1(Perturbation{Cosine{0.1, 1.0}});
  ConvexityCertificate fake{4, 0, "Cosine", 0.9, 1.1, 3.0, 1};
  CHECK(conditional_lsi_pipeline(c1, 16, 2, 8, 0, 4, fake).rho1 ==
        doctest::Approx(std::exp(-1.6)).epsilon(1e-14));

  auto cc = convexity_scan(cosine(), 4, 1, 3.0, 3);
  CHECK(cc.lambda > 0.0);
  double ref = conditional_lsi_pipeline(cosine(), 16, 2, 8, 1, 4, cc).rho_final;
  CHECK(ref > 0.0);
  for (int R : {2, 4, 8})
    for (int M : {2, 3, 5})
      CHECK(conditional_lsi_pipeline(cosine(), R * 4 * M, M, R * 4, 1, 4, cc).rho_final == ref);
}

TEST_CASE("fluctuation gradient") {
  ProjectionBundle b(64, 4, 2);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  Eigen::VectorXd c(4);
  for (int i = 0; i < 4; ++i) c(i) = n(rng);
  CHECK(fluctuation_gradient_norm(b.adjoint(c), b) < 1e-10);
  Eigen::VectorXd x(64);
  for (int i = 0; i < 64; ++i) x(i) = n(rng);
  FluctuationSplit s = b.fluctuation_decompose(x);
  CHECK(std::abs(fluctuation_gradient_norm(s.parallel, b) - s.parallel.norm()) < 1e-10);
  CHECK(std::abs(x.squaredNorm() - s.parallel.squaredNorm() - s.perp.squaredNorm()) < 1e-10);
}

TEST_CASE("relative entropy of tilted products") {
  auto g = gaussian();
  CHECK(relative_entropy_product(g, Eigen::VectorXd::Zero(10)).total == 0.0);
  CHECK(relative_entropy_product(g, Eigen::VectorXd::Constant(10, 0.4)).per_site ==
        doctest::Approx(0.08).epsilon(1e-12));

  auto c = cosine();
  const int N = 16;
  Eigen::VectorXd m(N);
  for (int j = 0; j < N; ++j) m(j) = 0.5 * std::sin(2 * M_PI * j / N);
  auto psi = [&](double x) { return c.value(x); };
  double expect = 0.0;
  const double l0 = oracle::log_mgf(psi, 0.0);
  for (int j = 0; j < N; ++j) {
    const double s = c.tilt_for_mean(m(j));
    const double ls = oracle::log_mgf(psi, s);
    expect += oracle::integrate_line([&](double x) {
      const double logratio = s * x - ls + l0;
      return std::exp(s * x - psi(x) - ls) * logratio;
    });
  }
  EntropyReport r = relative_entropy_product(c, m);
  CHECK(std::abs(r.total - expect) < 1e-6);
  CHECK(r.total > 0.0);
}
