#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hydrolim/coarse_grain.hpp"
#include "hydrolim/potential.hpp"

namespace hydrolim {

/// Tabulated phi' on [lo, hi] with exact nodal values of phi' and phi'',
/// interpolated by cubic Hermite polynomials.  The node count is doubled until
/// the midpoint error is below the tolerance.
class PhiPrimeTable {
 public:
  PhiPrimeTable(const SingleSitePotential& pot, double lo, double hi, double tol = 1e-8);

  double operator()(double m) const { return eval(m, 0); }
  double derivative(double m) const { return eval(m, 1); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int nodes() const { return static_cast<int>(f_.size()); }
  double max_derivative() const { return d_.maxCoeff(); }
  double achieved_error() const { return err_; }

 private:
  double eval(double m, int order) const;
  double lo_, hi_, h_ = 0.0, err_ = 0.0;
  Eigen::VectorXd f_, d_;
};

enum class PdeScheme { ExplicitFD, SemiImplicit };

struct PdeConfig {
  int G = 256;
  double dt = 0.0;       ///< 0 selects 0.4 dtheta^2 / sup phi'' (explicit) or 10x that
  double T = 0.01;
  PdeScheme scheme = PdeScheme::ExplicitFD;
  Profile initial = [](double) { return 0.0; };
  double offset = 0.0;   ///< grid points theta_i = (i + offset) / G
  std::vector<double> sample_times;  ///< empty means {0, T}
};

struct PdeSolution {
  Eigen::VectorXd theta;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> profiles;
  double dt = 0.0;
  long steps = 0;
  double sup_phi2 = 0.0;  ///< sup phi'' over the tabulated range
  double max_mass_drift = 0.0;
};

/// Method of lines for d zeta/dt = d^2/dtheta^2 phi'(zeta) on the unit torus.
/// Throws if an explicit step violates dt <= dtheta^2 / (2 sup phi'').
PdeSolution solve_hydrodynamic(const SingleSitePotential& pot, const PdeConfig& cfg);

/// Discrete macroscopic energy (1/G) sum phi(zeta_i).
double discrete_macro_energy(const SingleSitePotential& pot, const Eigen::VectorXd& zeta);

}  // namespace hydrolim
