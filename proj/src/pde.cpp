#include "hydrolim/pde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hydrolim {

PhiPrimeTable::PhiPrimeTable(const SingleSitePotential& pot, double lo, double hi, double tol)
    : lo_(lo), hi_(hi) {
  if (!(hi > lo)) throw std::invalid_argument("PhiPrimeTable: empty range");
  for (int n = 33;; n = 2 * n - 1) {
    h_ = (hi_ - lo_) / (n - 1);
    f_.resize(n);
    d_.resize(n);
    for (int i = 0; i < n; ++i) {
      const double m = lo_ + i * h_;
      f_(i) = pot.phi(m, 1);
      d_(i) = pot.phi(m, 2);
    }
    err_ = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      const double m = lo_ + (i + 0.5) * h_;
      err_ = std::max(err_, std::abs(eval(m, 0) - pot.phi(m, 1)));
    }
    if (err_ < tol || n > 8193) break;
  }
}

double PhiPrimeTable::eval(double m, int order) const {
  if (m < lo_ - 1e-12 || m > hi_ + 1e-12)
    throw std::out_of_range("PhiPrimeTable: argument outside the tabulated range");
  const int n = static_cast<int>(f_.size());
  double t = (m - lo_) / h_;
  int i = std::clamp(static_cast<int>(std::floor(t)), 0, n - 2);
  const double s = t - i;
  if (order == 0) {
    const double h00 = (2 * s - 3) * s * s + 1, h10 = ((s - 2) * s + 1) * s,
                 h01 = (3 - 2 * s) * s * s, h11 = (s - 1) * s * s;
    return h00 * f_(i) + h10 * h_ * d_(i) + h01 * f_(i + 1) + h11 * h_ * d_(i + 1);
  }
  const double g00 = 6 * s * s - 6 * s, g10 = 3 * s * s - 4 * s + 1, g01 = -g00,
               g11 = 3 * s * s - 2 * s;
  return (g00 * f_(i) + g01 * f_(i + 1)) / h_ + g10 * d_(i) + g11 * d_(i + 1);
}

namespace {

/// Tridiagonal solve, sub a (a[0] unused), diagonal b, super c (c[n-1] unused).
Eigen::VectorXd thomas(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                       const Eigen::VectorXd& r) {
  const Eigen::Index n = b.size();
  Eigen::VectorXd cp(n), x(n);
  double den = b(0);
  cp(0) = c(0) / den;
  x(0) = r(0) / den;
  for (Eigen::Index i = 1; i < n; ++i) {
    den = b(i) - a(i) * cp(i - 1);
    cp(i) = c(i) / den;
    x(i) = (r(i) - a(i) * x(i - 1)) / den;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) x(i) -= cp(i) * x(i + 1);
  return x;
}

/// Periodic tridiagonal solve with corners A(n-1, 0) = alpha and A(0, n-1) = beta
/// by the Sherman-Morrison correction.
Eigen::VectorXd cyclic_thomas(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                              const Eigen::VectorXd& c, double alpha, double beta,
                              const Eigen::VectorXd& r) {
  const Eigen::Index n = b.size();
  const double gamma = -b(0);
  Eigen::VectorXd bb = b;
  bb(0) -= gamma;
  bb(n - 1) -= alpha * beta / gamma;
  Eigen::VectorXd x = thomas(a, bb, c, r);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  u(0) = gamma;
  u(n - 1) = alpha;
  Eigen::VectorXd z = thomas(a, bb, c, u);
  const double fact = (x(0) + beta * x(n - 1) / gamma) / (1.0 + z(0) + beta * z(n - 1) / gamma);
  return x - fact * z;
}

}  // namespace

PdeSolution solve_hydrodynamic(const SingleSitePotential& pot, const PdeConfig& cfg) {
  const int G = cfg.G;
  if (G < 3) throw std::invalid_argument("solve_hydrodynamic: need G >= 3");
  PdeSolution sol;
  sol.theta.resize(G);
  Eigen::VectorXd z(G);
  for (int i = 0; i < G; ++i) {
    sol.theta(i) = (i + cfg.offset) / G;
    z(i) = cfg.initial(sol.theta(i));
  }
  if (!z.allFinite()) throw std::invalid_argument("solve_hydrodynamic: initial profile not finite");
  const double zmin = z.minCoeff(), zmax = z.maxCoeff();
  const double pad = 0.05 * (zmax - zmin) + 1e-3;
  PhiPrimeTable table(pot, zmin - pad, zmax + pad);
  sol.sup_phi2 = table.max_derivative();

  const double g2 = static_cast<double>(G) * G;
  const double bound = 1.0 / (2.0 * g2 * sol.sup_phi2);
  double dt = cfg.dt;
  if (dt <= 0.0) dt = (cfg.scheme == PdeScheme::ExplicitFD ? 0.8 : 8.0) * bound;
  if (cfg.scheme == PdeScheme::ExplicitFD && dt > bound * (1.0 + 1e-12))
    throw std::invalid_argument("solve_hydrodynamic: explicit step violates the CFL bound");
  sol.dt = dt;

  sol.times = cfg.sample_times;
  if (sol.times.empty()) sol.times = {0.0, cfg.T};
  std::sort(sol.times.begin(), sol.times.end());
  if (sol.times.front() < 0.0) throw std::invalid_argument("solve_hydrodynamic: negative time");

  const double mass0 = z.mean();
  Eigen::VectorXd u(G), a(G), b(G), c(G), r(G), cf(G), rhs(G);
  auto laplacian = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    for (int i = 0; i < G; ++i)
      out(i) = g2 * (v((i + G - 1) % G) - 2.0 * v(i) + v((i + 1) % G));
  };
  double prev = 0.0;
  for (double t : sol.times) {
    const double gap = t - prev;
    const long n = gap > 0.0 ? static_cast<long>(std::ceil(gap / dt - 1e-9)) : 0;
    const double h = n > 0 ? gap / n : 0.0;
    for (long k = 0; k < n; ++k) {
      if (cfg.scheme == PdeScheme::ExplicitFD) {
        for (int i = 0; i < G; ++i) u(i) = table(z(i));
        laplacian(u, r);
        z += h * r;
      } else {
        for (int i = 0; i < G; ++i) {
          cf(i) = table.derivative(z(i));
          u(i) = table(z(i)) - cf(i) * z(i);
        }
        laplacian(u, r);
        rhs = z + h * r;
        const double mu = h * g2;
        for (int i = 0; i < G; ++i) {
          a(i) = -mu * cf((i + G - 1) % G);
          b(i) = 1.0 + 2.0 * mu * cf(i);
          c(i) = -mu * cf((i + 1) % G);
        }
        z = cyclic_thomas(a, b, c, -mu * cf(0), -mu * cf(G - 1), rhs);
      }
      if (!z.allFinite()) throw std::runtime_error("solve_hydrodynamic: solution blew up");
      sol.max_mass_drift = std::max(sol.max_mass_drift, std::abs(z.mean() - mass0));
      ++sol.steps;
    }
    sol.profiles.push_back(z);
    prev = t;
  }
  return sol;
}

double discrete_macro_energy(const SingleSitePotential& pot, const Eigen::VectorXd& zeta) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < zeta.size(); ++i) s += pot.phi(zeta(i), 0);
  return s / zeta.size();
}

}  // namespace hydrolim
