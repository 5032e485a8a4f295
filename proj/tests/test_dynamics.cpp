#include <doctest.h>

#include <cmath>
#include <random>

#include "hydrolim/dynamics.hpp"

using namespace hydrolim;

namespace {

SingleSitePotential gaussian() { return SingleSitePotential(Perturbation{Zero{}}); }
SingleSitePotential cosine() { return SingleSitePotential(Perturbation{Cosine{0.1, 1.0}}); }

}  // namespace

TEST_CASE("explicit step fixes the origin without noise") {
  KawasakiSimulator sim(gaussian(), 16);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(16);
  sim.step_explicit(x, 1e-4, Eigen::VectorXd::Zero(16));
  CHECK(x.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("steps conserve the mean") {
  auto c = cosine();
  KawasakiSimulator sim(c, 32);
  Rng rng = trajectory_rng(5, 0);
  Eigen::VectorXd x = sim.sample_initial(InitialKind::TiltedProduct,
                                         [](double t) { return 0.5 * std::sin(2 * M_PI * t); },
                                         rng).x;
  x.array() += 0.3;
  const double m0 = x.mean();
  const double dt = explicit_stability_dt(c, 32);
  double drift = 0.0;
  for (int k = 0; k < 10000; ++k) {
    kawasaki_step(sim, x, dt, rng);
    drift = std::max(drift, std::abs(x.mean() - m0));
  }
  CHECK(drift < 1e-13);
  drift = 0.0;
  for (int k = 0; k < 10000; ++k) {
    sim.step_exponential(x, 1e-3, rng);
    drift = std::max(drift, std::abs(x.mean() - m0));
  }
  CHECK(drift < 1e-12);
}

TEST_CASE("initial samplers") {
  auto g = gaussian();
  const int N = 8;
  KawasakiSimulator sim(g, N);
  Rng rng = trajectory_rng(1, 2);
  auto prof = [](double t) { return std::cos(2 * M_PI * t) + 0.25; };
  auto det = sim.sample_initial(InitialKind::Deterministic, prof, rng);
  for (int j = 0; j < N; ++j)
    CHECK(det.x(j) == doctest::Approx(std::cos(2 * M_PI * (j + 0.5) / N)).epsilon(1e-12));

  // Recentred iid N(0,1): each coordinate has variance 1 - 1/N.
  const int n = 20000;
  double s = 0.0, s2 = 0.0, maxmean = 0.0;
  for (int t = 0; t < n; ++t) {
    auto init = sim.sample_initial(InitialKind::TiltedProduct, [](double) { return 0.0; }, rng);
    maxmean = std::max(maxmean, std::abs(init.x.mean()));
    const double v = init.x.squaredNorm() / N;
    s += v;
    s2 += v * v;
  }
  const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(maxmean < 1e-15);
  CHECK(std::abs(mean - (1.0 - 1.0 / N)) < 3.0 * se);

  // Tilted single-site draws have the prescribed mean.
  KawasakiSimulator sc(cosine(), 8);
  double acc = 0.0;
  for (int t = 0; t < 40000; ++t) acc += sc.sample_tilted(0.7, rng);
  CHECK(std::abs(acc / 40000 - 0.7) < 3.0 * 1.0 / std::sqrt(40000.0));
}

TEST_CASE("Gaussian stationary covariance") {
  // The exponential scheme is exact in law for the Gaussian potential, so the
  // stationary law I - 11^t/N is reproduced up to sampling error.
  const int N = 16, n = 10000, snaps = 10;
  KawasakiSimulator sim(gaussian(), N);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(N, N);
  for (int t = 0; t < n; ++t) {
    Rng rng = trajectory_rng(99, t);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
    for (int s = 0; s < snaps; ++s) {
      for (int k = 0; k < 10; ++k) sim.step_exponential(x, 0.01, rng);
      C += x * x.transpose();
    }
  }
  C /= static_cast<double>(n) * snaps;
  Eigen::MatrixXd target =
      Eigen::MatrixXd::Identity(N, N) - Eigen::MatrixXd::Constant(N, N, 1.0 / N);
  CHECK((C - target).norm() / target.norm() < 0.05);
}

TEST_CASE("explicit scheme: linear mean and weak order") {
  const int N = 16;
  auto g = gaussian();
  KawasakiSimulator sim(g, N);
  const double dt = explicit_stability_dt(g, N);
  const long steps = 40;
  const double T = steps * dt;
  // Ensemble mean of <x, e_1> against the matrix exponential.
  Eigen::VectorXd e1(N);
  for (int j = 0; j < N; ++j) e1(j) = std::sin(2 * M_PI * (j + 0.5) / N);
  const double lam1 = eigenvalues_A(N)(1);
  const int n = 2000;
  double s = 0.0, s2 = 0.0;
  for (int t = 0; t < n; ++t) {
    Rng rng = trajectory_rng(17, t);
    Eigen::VectorXd x = e1;
    for (long k = 0; k < steps; ++k) sim.step_explicit(x, dt, rng);
    const double v = x.dot(e1) / N;
    s += v;
    s2 += v * v;
  }
  const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 0.5 * std::exp(-lam1 * T)) < 3.0 * se);

  // Coupled Brownian paths at dt, dt/2, dt/4: successive differences of
  // E |X(T)|^2 shrink by about two.
  auto run = [&](int level, Rng& rng, const std::vector<Eigen::VectorXd>& noise) {
    Eigen::VectorXd x = e1;
    const int sub = 1 << level;
    const double h = dt / 4.0 * (4 / sub);
    for (long k = 0; k < steps; ++k)
      for (int q = 0; q < sub; ++q) {
        Eigen::VectorXd xi = Eigen::VectorXd::Zero(N);
        const int per = 4 / sub;
        for (int r = 0; r < per; ++r) xi += noise[k * 4 + q * per + r];
        sim.step_explicit(x, h, xi / std::sqrt(static_cast<double>(per)));
      }
    (void)rng;
    return x.squaredNorm() / N;
  };
  double d[3] = {0, 0, 0};
  std::normal_distribution<double> nd;
  for (int t = 0; t < 400; ++t) {
    Rng rng = trajectory_rng(23, t);
    std::vector<Eigen::VectorXd> noise(steps * 4, Eigen::VectorXd(N));
    for (auto& v : noise)
      for (int j = 0; j < N; ++j) v(j) = nd(rng);
    for (int l = 0; l < 3; ++l) d[l] += run(l, rng, noise) / 400.0;
  }
  const double ratio = (d[0] - d[1]) / (d[1] - d[2]);
  CHECK(ratio > 1.6);
  CHECK(ratio < 2.5);
}

TEST_CASE("ensemble statistics") {
  auto g = gaussian();
  SdeConfig cfg;
  cfg.N = 32;
  cfg.T = 0.0;
  cfg.ensemble_size = 4000;
  cfg.seed = 4;
  cfg.sample_times = {0.0};
  EnsembleStats st = run_ensemble(g, cfg);
  // E|X_hat_r|^2 = N for r != 0; sum the exact Fourier series of the step
  // function, coefficient (1/N) sinc^2(pi k / N) per frequency.
  double expect = 0.0;
  for (long k = 1; k <= 2000000; ++k) {
    if (k % cfg.N == 0) continue;
    const double u = M_PI * k / cfg.N;
    const double sinc = std::sin(u) / u;
    expect += 2.0 * sinc * sinc / cfg.N / std::pow(2 * M_PI * k, 2);
  }
  CHECK(std::abs(st.mean[0] - expect) < 3.0 * st.std_error[0]);

  SdeConfig c2;
  c2.N = 64;
  c2.T = 0.01;
  c2.ensemble_size = 8;
  c2.seed = 77;
  c2.profile = [](double t) { return 0.5 * std::sin(2 * M_PI * t); };
  c2.sample_times = {0.0, 0.005, 0.01};
  EnsembleStats a = run_ensemble(cosine(), c2), b = run_ensemble(cosine(), c2);
  REQUIRE(a.mean.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.mean[i] == b.mean[i]);
    CHECK(a.std_error[i] == b.std_error[i]);
  }
  CHECK(a.max_mean_drift < 1e-12);
  c2.seed = 78;
  CHECK(run_ensemble(cosine(), c2).mean[2] != a.mean[2]);

  c2.scheme = SdeScheme::ExplicitEM;
  c2.dt = 2.0 * explicit_stability_dt(cosine(), 64);
  CHECK_THROWS_AS(run_ensemble(cosine(), c2), std::invalid_argument);
}
