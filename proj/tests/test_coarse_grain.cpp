#include <doctest.h>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "hydrolim/coarse_grain.hpp"
#include "oracles.hpp"

using namespace hydrolim;

namespace {

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Three-branch quadratic B-spline, valid for M >= 3 where supports do not
/// overlap themselves.
double bspline_branches(int j, double theta, int M) {
  auto eval = [&](double t) {
    const double a = (j - 2.0) / M, b = (j - 1.0) / M, c = j / static_cast<double>(M),
                 d = (j + 1.0) / M;
    if (t >= a && t < b) return 0.5 * M * M * (t - a) * (t - a);
    if (t >= b && t < c) {
      const double u = t - (2.0 * j - 1.0) / (2.0 * M);
      return 0.75 - M * M * u * u;
    }
    if (t >= c && t < d) return 0.5 * M * M * (t - d) * (t - d);
    return 0.0;
  };
  return eval(theta) + eval(theta - 1.0) + eval(theta + 1.0);
}

}  // namespace

TEST_CASE("shifted Legendre basis is orthonormal") {
  for (int l1 = 0; l1 <= 4; ++l1)
    for (int l2 = 0; l2 <= 4; ++l2) {
      double ip = oracle::integrate_interval(
          [&](double t) { return dg_basis(l1, t) * dg_basis(l2, t); }, 0.0, 1.0);
      CHECK(std::abs(ip - (l1 == l2 ? 1.0 : 0.0)) < 1e-13);
    }
  CHECK(dg_basis_derivative(2, 0.3, 1) ==
        doctest::Approx((dg_basis(2, 0.3 + 1e-6) - dg_basis(2, 0.3 - 1e-6)) / 2e-6).epsilon(1e-7));
}

TEST_CASE("block averages against an independent quadrature") {
  const int J = 7, L = 3;
  Eigen::MatrixXd g = block_average_matrix(J, L);
  for (int j = 0; j < J; ++j)
    for (int l = 0; l <= L; ++l) {
      double v = J * oracle::integrate_interval(
                         [&](double t) {
                           return std::sqrt(2.0 * l + 1.0) *
                                  boost::math::legendre_p(l, 2.0 * t - 1.0);
                         },
                         j / double(J), (j + 1) / double(J));
      CHECK(std::abs(g(j, l) - v) < 1e-13);
    }
}

TEST_CASE("Gram matrix Q1 J Q1^t") {
  GramResult g = gram_qjqt(4, 1);
  CHECK(g.matrix(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(g.matrix(0, 1)) < 1e-15);
  CHECK(g.matrix(1, 1) == doctest::Approx(1.0 - 1.0 / 16.0).epsilon(1e-14));
  for (int J = 2; J <= 128; J *= 2)
    CHECK(gram_qjqt(J, 1).deviation == doctest::Approx(1.0 / (double(J) * J)).epsilon(1e-12));
  // L = 0 is exactly the identity.
  CHECK(gram_qjqt(9, 0).deviation < 1e-15);
  std::vector<double> js, devs;
  for (int J = 8; J <= 128; J *= 2) {
    js.push_back(J);
    devs.push_back(gram_qjqt(J, 2).deviation);
  }
  CHECK(std::abs(slope(js, devs) + 2.0) < 0.1);
  // Symmetric positive definite.
  Eigen::LLT<Eigen::MatrixXd> llt(gram_qjqt(3, 2).matrix);
  CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("periodic B-splines") {
  const int M = 8;
  for (double th = 0.0; th < 1.0; th += 0.013) {
    double s = 0.0;
    for (int j = 1; j <= M; ++j) {
      s += bspline_eval(j, th, M);
      CHECK(std::abs(bspline_eval(j, th, M) - bspline_branches(j, th, M)) < 1e-14);
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(bspline_eval(1, 1.0 / (2 * M), M) == doctest::Approx(0.75));
  // M = 2: supports wrap onto themselves and the copies add up.
  CHECK(bspline_eval(1, 0.25, 2) == doctest::Approx(0.75));
  CHECK(bspline_eval(2, 0.25, 2) == doctest::Approx(0.25));
  SplineSpace sp2(2, 2);
  auto sine = [](double t) { return std::sin(2.0 * M_PI * t); };
  CHECK(sp2.value(sp2.interpolate(sine), 0.25) == doctest::Approx(0.5));
  // Hat functions and piecewise constants for lower degrees.
  CHECK(bspline_eval(1, 0.0, 4, 1) == doctest::Approx(1.0));
  CHECK(bspline_eval(2, 0.125, 4, 1) == doctest::Approx(0.5));
  CHECK(bspline_eval(2, 0.3, 4, 0) == doctest::Approx(1.0));
}

TEST_CASE("spline space Gram, stiffness and exact reproduction") {
  for (int L : {1, 2, 3}) {
    SplineSpace sp(6, L);
    // Gram entries against direct quadrature of products.
    for (int i = 1; i <= 6; ++i)
      for (int j = 1; j <= 6; ++j) {
        double v = 0.0;
        for (int m = 0; m < 6; ++m)
          v += boost::math::quadrature::gauss<double, 10>::integrate(
              [&](double t) { return bspline_eval(i, t, 6, L) * bspline_eval(j, t, 6, L); },
              m / 6.0, (m + 1) / 6.0);
        CHECK(std::abs(sp.gram()(i - 1, j - 1) - v) < 1e-13);
      }
    // Projection reproduces splines.
    Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(6, -1.0, 2.0);
    Eigen::VectorXd pc = sp.project([&](double t) { return sp.value(c, t); });
    CHECK((pc - c).norm() < 1e-12);
    // Stiffness is the H^1 seminorm.
    double h1 = 0.0;
    for (int m = 0; m < 6; ++m)
      h1 += boost::math::quadrature::gauss<double, 10>::integrate(
          [&](double t) {
            const double h = 1e-6;
            double d = (sp.value(c, t + h) - sp.value(c, t - h)) / (2 * h);
            return d * d;
          },
          m / 6.0, (m + 1) / 6.0);
    CHECK(c.dot(sp.stiffness() * c) == doctest::Approx(h1).epsilon(1e-8));
  }
}

TEST_CASE("projection bundle operators") {
  const int M = 4, K = 8, L = 2, N = M * K;
  ProjectionBundle pb(N, M, L);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  Eigen::VectorXd x(N);
  for (int i = 0; i < N; ++i) x(i) = nd(rng);

  // N Q_M^t y gives N times the cell integrals of y.
  Eigen::VectorXd c(M);
  c << 0.3, -1.0, 0.7, 0.2;
  Eigen::VectorXd cells = pb.adjoint(c);
  for (int i = 0; i < N; ++i) {
    double v = N * boost::math::quadrature::gauss<double, 10>::integrate(
                       [&](double t) { return pb.space().value(c, t); }, i / double(N),
                       (i + 1) / double(N));
    CHECK(std::abs(cells(i) - v) < 1e-12);
  }
  // Adjointness: <P x, c>_{L^2} = (1/N) x . N P^t c.
  CHECK(pb.project(x).dot(pb.space().gram() * c) ==
        doctest::Approx(x.dot(pb.adjoint(c)) / N).epsilon(1e-12));

  FluctuationSplit s = pb.fluctuation_decompose(x);
  CHECK(pb.project(s.parallel).norm() < 1e-12);
  CHECK(std::abs(s.parallel.dot(s.perp)) < 1e-11);
  CHECK((s.parallel + s.perp - x).norm() < 1e-12);

  CHECK(pnpt_deviation(4, 8, 0) < 1e-14);
  std::vector<double> ks, devs;
  for (int k = 8; k <= 64; k *= 2) {
    ks.push_back(k);
    devs.push_back(pnpt_deviation(4, k, 2));
  }
  CHECK(std::abs(slope(ks, devs) + 2.0) < 0.1);
  CHECK_THROWS_AS(ProjectionBundle(30, 4, 2), std::invalid_argument);
}

TEST_CASE("inverse Sobolev ratios scale linearly in M") {
  std::vector<double> ms, r1, r2;
  for (int M = 4; M <= 32; M *= 2) {
    InverseSobolev c = inverse_sobolev_constants(M, 2);
    ms.push_back(M);
    r1.push_back(c.h1_over_l2);
    r2.push_back(c.h2_over_h1);
  }
  CHECK(std::abs(slope(ms, r1) - 1.0) < 0.05);
  CHECK(std::abs(slope(ms, r2) - 1.0) < 0.05);
  CHECK(std::isnan(inverse_sobolev_constants(4, 1).h2_over_h1));
}
