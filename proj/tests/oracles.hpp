#pragma once
// Independent reference computations used only by the tests.  They rely on
// Boost.Math quadrature so that they share no code with the library.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>

namespace oracle {

inline double integrate_line(const std::function<double(double)>& f) {
  using boost::math::quadrature::gauss_kronrod;
  const double inf = std::numeric_limits<double>::infinity();
  double err = 0.0;
  return gauss_kronrod<double, 61>::integrate(f, -inf, inf, 15, 1e-14, &err);
}

inline double integrate_interval(const std::function<double(double)>& f, double a,
                                 double b) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14, &err);
}

/// log int exp(s z - psi(z)) dz for psi given as a callable.
inline double log_mgf(const std::function<double(double)>& psi, double s) {
  // Shift by the value at the Gaussian centre to avoid overflow.
  const double c = s;
  const double ref = s * c - psi(c);
  double z = integrate_line([&](double x) { return std::exp(s * x - psi(x) - ref); });
  return ref + std::log(z);
}

inline double tilted_moment(const std::function<double(double)>& psi, double s, int k) {
  const double lz = log_mgf(psi, s);
  return integrate_line(
      [&](double x) { return std::pow(x, k) * std::exp(s * x - psi(x) - lz); });
}

}  // namespace oracle
