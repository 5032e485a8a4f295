#include <doctest.h>

#include <cmath>
#include <random>

#include "hydrolim/pde.hpp"

using namespace hydrolim;

namespace {

SingleSitePotential gaussian() { return SingleSitePotential(Perturbation{Zero{}}); }
SingleSitePotential cosine() { return SingleSitePotential(Perturbation{Cosine{0.1, 1.0}}); }

}  // namespace

TEST_CASE("phi' table accuracy") {
  auto c = cosine();
  PhiPrimeTable t(c, -1.5, 1.5);
  CHECK(t.achieved_error() < 1e-8);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    const double m = u(rng);
    CHECK(std::abs(t(m) - c.phi(m, 1)) < 1e-8);
    CHECK(std::abs(t.derivative(m) - c.phi(m, 2)) < 1e-5);
  }
  CHECK_THROWS_AS(t(1.6), std::out_of_range);
  CHECK_THROWS_AS(PhiPrimeTable(c, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("Gaussian heat equation") {
  // phi'(z) = z, so sin(2 pi theta) decays as exp(-4 pi^2 t).
  for (PdeScheme scheme : {PdeScheme::ExplicitFD, PdeScheme::SemiImplicit}) {
    PdeConfig cfg;
    cfg.G = 256;
    cfg.T = 0.01;
    cfg.scheme = scheme;
    cfg.initial = [](double t) { return std::sin(2 * M_PI * t); };
    auto sol = solve_hydrodynamic(gaussian(), cfg);
    const double amp = std::exp(-4 * M_PI * M_PI * 0.01);
    CHECK(amp == doctest::Approx(0.6738254512).epsilon(1e-9));
    double err = 0.0;
    for (int i = 0; i < cfg.G; ++i)
      err = std::max(err, std::abs(sol.profiles.back()(i) - amp * std::sin(2 * M_PI * sol.theta(i))));
    CHECK(err < 1e-3);
  }
}

TEST_CASE("structural properties") {
  auto c = cosine();
  PdeConfig cfg;
  cfg.G = 64;
  cfg.T = 0.05;
  cfg.initial = [](double) { return 0.4; };
  auto flat = solve_hydrodynamic(c, cfg);
  CHECK((flat.profiles.back().array() - 0.4).abs().maxCoeff() < 1e-13);

  cfg.initial = [](double t) { return 0.5 * std::sin(2 * M_PI * t) + 0.2 * std::cos(6 * M_PI * t); };
  cfg.sample_times = {0.0, 0.005, 0.01, 0.02, 0.05};
  for (PdeScheme scheme : {PdeScheme::ExplicitFD, PdeScheme::SemiImplicit}) {
    cfg.scheme = scheme;
    auto sol = solve_hydrodynamic(c, cfg);
    CHECK(sol.max_mass_drift < 1e-10);
    const double lo = sol.profiles[0].minCoeff(), hi = sol.profiles[0].maxCoeff();
    double prev = discrete_macro_energy(c, sol.profiles[0]);
    for (std::size_t s = 1; s < sol.profiles.size(); ++s) {
      CHECK(sol.profiles[s].minCoeff() >= lo - 1e-12);
      CHECK(sol.profiles[s].maxCoeff() <= hi + 1e-12);
      const double e = discrete_macro_energy(c, sol.profiles[s]);
      CHECK(e < prev);
      prev = e;
    }
  }
}

TEST_CASE("explicit step bound is enforced") {
  PdeConfig cfg;
  cfg.G = 64;
  cfg.dt = 1.0 / (64.0 * 64.0);
  cfg.initial = [](double t) { return std::sin(2 * M_PI * t); };
  CHECK_THROWS_AS(solve_hydrodynamic(gaussian(), cfg), std::invalid_argument);
  cfg.scheme = PdeScheme::SemiImplicit;
  CHECK_NOTHROW(solve_hydrodynamic(gaussian(), cfg));
}

TEST_CASE("semi-implicit agrees with explicit") {
  PdeConfig cfg;
  cfg.G = 128;
  cfg.T = 0.02;
  cfg.initial = [](double t) { return 0.8 * std::sin(2 * M_PI * t); };
  auto a = solve_hydrodynamic(cosine(), cfg);
  cfg.scheme = PdeScheme::SemiImplicit;
  cfg.dt = a.dt;
  auto b = solve_hydrodynamic(cosine(), cfg);
  const double d1 = (a.profiles.back() - b.profiles.back()).cwiseAbs().maxCoeff();
  CHECK(d1 < 1e-3);
  // Both schemes are first order in time, so halving dt halves the gap.
  cfg.dt = a.dt / 2;
  auto b2 = solve_hydrodynamic(cosine(), cfg);
  cfg.scheme = PdeScheme::ExplicitFD;
  auto a2 = solve_hydrodynamic(cosine(), cfg);
  const double d2 = (a2.profiles.back() - b2.profiles.back()).cwiseAbs().maxCoeff();
  CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("self-convergence is second order") {
  // Nested vertex grids; dt proportional to dtheta^2.
  std::vector<Eigen::VectorXd> z;
  for (int G : {64, 128, 256, 512}) {
    PdeConfig cfg;
    cfg.G = G;
    cfg.T = 0.01;
    cfg.dt = 0.1 / (static_cast<double>(G) * G);
    cfg.initial = [](double t) { return 0.6 * std::sin(2 * M_PI * t) + 0.1; };
    z.push_back(solve_hydrodynamic(cosine(), cfg).profiles.back());
  }
  auto diff = [&](int i) {
    double e = 0.0;
    for (Eigen::Index k = 0; k < z[i].size(); ++k) e = std::max(e, std::abs(z[i](k) - z[i + 1](2 * k)));
    return e;
  };
  const double p1 = std::log2(diff(0) / diff(1)), p2 = std::log2(diff(1) / diff(2));
  CHECK(p1 == doctest::Approx(2.0).epsilon(0.1));
  CHECK(p2 == doctest::Approx(2.0).epsilon(0.1));
}
