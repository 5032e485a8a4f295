#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "hydrolim/lattice.hpp"

using namespace hydrolim;

namespace {

/// Direct truncated Fourier series of the step function: sum over 0 < |k| <= kmax.
double hm1_series(const Eigen::VectorXd& x, int kmax) {
  const int n = static_cast<int>(x.size());
  double s = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    std::complex<double> c = 0.0;
    for (int j = 0; j < n; ++j) {
      // int_{j/n}^{(j+1)/n} e^{-2 pi i k t} dt
      const double a = 2.0 * M_PI * k;
      std::complex<double> e0 = std::exp(std::complex<double>(0.0, -a * j / n));
      std::complex<double> e1 = std::exp(std::complex<double>(0.0, -a * (j + 1.0) / n));
      c += x(j) * (e0 - e1) / std::complex<double>(0.0, a);
    }
    s += 2.0 * std::norm(c) / (4.0 * M_PI * M_PI * k * k);
  }
  return s;
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = nd(rng);
  return x;
}

}  // namespace

TEST_CASE("generator spectrum") {
  Eigen::VectorXd lam = eigenvalues_A(4);
  CHECK(lam(0) == 0.0);
  CHECK(lam(1) == doctest::Approx(32.0));
  CHECK(lam(2) == doctest::Approx(64.0));
  CHECK(lam(3) == doctest::Approx(32.0));
  // Cosine modes are eigenvectors of the stencil.
  const int n = 12;
  Eigen::VectorXd ev = eigenvalues_A(n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd v(n);
    for (int j = 0; j < n; ++j) v(j) = std::cos(2.0 * M_PI * k * j / n);
    CHECK((apply_A(v) - ev(k) * v).norm() < 1e-10 * (1.0 + ev(k)));
  }
}

TEST_CASE("spectral and stencil applications agree; sqrt(2A)^2 = 2A") {
  for (int n : {5, 16, 33}) {
    KawasakiOperator op(n);
    Eigen::VectorXd x = random_vector(n, 7 + n);
    Eigen::VectorXd ax = op.apply(x);
    CHECK((op.apply_spectral(x) - ax).norm() < 1e-10 * ax.norm());
    Eigen::VectorXd ss = op.apply_sqrt_2A(op.apply_sqrt_2A(x));
    CHECK((ss - 2.0 * ax).norm() < 1e-10 * ax.norm());
    CHECK(std::abs(op.apply_sqrt_2A(x).sum()) < 1e-10);
    CHECK(std::abs(ax.sum()) < 1e-9);
  }
}

TEST_CASE("H^{-1} norm of step functions") {
  Eigen::VectorXd x(2);
  x << 1.0, -1.0;
  CHECK(h_minus_one_norm_sq(x) == doctest::Approx(1.0 / 48.0).epsilon(1e-14));
  for (int n : {3, 8, 17}) {
    Eigen::VectorXd y = random_vector(n, 100 + n);
    CHECK(h_minus_one_norm_sq(y) == doctest::Approx(hm1_series(y, 40000)).epsilon(1e-9));
  }
  // Constants have zero norm; refinement leaves the step function unchanged.
  CHECK(h_minus_one_norm_sq(Eigen::VectorXd::Constant(6, 3.0)) < 1e-28);
  Eigen::VectorXd y = random_vector(6, 5);
  CHECK(h_minus_one_norm_sq(refine_step(y, 4)) == doctest::Approx(h_minus_one_norm_sq(y)).epsilon(1e-12));
}

TEST_CASE("H^{-1} norm of smooth profiles and convergence of step embeddings") {
  const double exact = 1.0 / (8.0 * M_PI * M_PI);
  Eigen::VectorXd s(64);
  for (int j = 0; j < 64; ++j) s(j) = std::sin(2.0 * M_PI * j / 64.0);
  CHECK(profile_h_minus_one_norm_sq(s) == doctest::Approx(exact).epsilon(1e-13));
  double prev = 1.0;
  for (int n : {16, 64, 256}) {
    Eigen::VectorXd x(n);
    for (int j = 0; j < n; ++j) x(j) = std::sin(2.0 * M_PI * (j + 0.5) / n);
    const double err = std::abs(h_minus_one_norm_sq(x) - exact);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-4 * exact);
}

TEST_CASE("Hamiltonian and gradient") {
  SingleSitePotential pot(Cosine{0.1, 1.0});
  Eigen::VectorXd x = random_vector(9, 3);
  double h = 0.0;
  for (int i = 0; i < 9; ++i) h += 0.5 * x(i) * x(i) + 0.1 * std::cos(x(i));
  CHECK(hamiltonian(pot, x) == doctest::Approx(h).epsilon(1e-14));
  Eigen::VectorXd g = grad_hamiltonian(pot, x);
  for (int i = 0; i < 9; ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += 1e-6;
    xm(i) -= 1e-6;
    CHECK(g(i) == doctest::Approx((hamiltonian(pot, xp) - hamiltonian(pot, xm)) / 2e-6).epsilon(1e-7));
  }
  CHECK(step_l2_norm(Eigen::VectorXd::Constant(4, 2.0)) == doctest::Approx(2.0));
}
