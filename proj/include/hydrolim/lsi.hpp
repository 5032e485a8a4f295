#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hydrolim/coarse_grain.hpp"
#include "hydrolim/potential.hpp"

namespace hydrolim {

// Constants follow the convention Ent(f) <= (1/(2 rho)) int |grad f|^2 / f,
// under which the standard Gaussian has rho = 1.

/// Two-scale criterion: LSI constant of a measure from those of its
/// conditionals (rho1), its marginal (rho2) and the coupling kappa.
double two_scale_combine(double rho1, double rho2, double kappa);

/// Bounded perturbation: rho exp(-2 osc).
double holley_stroock(double rho, double osc);

/// Product measure: the smallest factor constant.
double tensorize(const std::vector<double>& rhos);

/// Smallest Hessian eigenvalue over a sample grid.  Empirical: nothing is
/// certified between grid points.
double bakry_emery(const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& hessian,
                   const std::vector<Eigen::VectorXd>& grid);

struct ConvexityCertificate {
  int J = 0;
  int L = 0;
  std::string family;
  double lambda = 0.0;   ///< min eigenvalue of Hess psi_J over the grid
  double Lambda = 0.0;   ///< max eigenvalue
  double radius = 0.0;   ///< grid covers |beta_hat_l| <= radius
  int points = 0;
};

/// Scan of Hess psi_J over a tensor grid in the dual variable, mapped to beta
/// by beta = grad bar psi*_J(beta_hat).
ConvexityCertificate convexity_scan(const SingleSitePotential& pot, int J, int L,
                                    double radius = 3.0, int steps = 5);

struct LsiChain {
  int N = 0, M = 0, K = 0, L = 0, J = 0, R = 0;
  std::string family;
  double lambda = 0.0;
  double hess_bound = 0.0;  ///< sup |Hess H| = 1 + c2_bound
  double rho1 = 0.0;        ///< conditional constant inside a block
  double rho2 = 0.0;        ///< marginal constant
  double kappa = 0.0;
  double rho_dg = 0.0;      ///< LSI constant of mu(dx | Q_M x = alpha)
  double kappa2 = 0.0;
  double rho_final = 0.0;   ///< LSI constant of mu(dx | P x = y)
};

/// Arithmetic of the two nested two-scale arguments.  Throws if the
/// certificate is absent, belongs to another block size, or is not positive.
LsiChain conditional_lsi_pipeline(const SingleSitePotential& pot, int N, int M, int K, int L,
                                  int J, const std::optional<ConvexityCertificate>& cert);

/// |grad f - N P^t (P N P^t)^{-1} P grad f|, the gradient along ker P.
double fluctuation_gradient_norm(const Eigen::VectorXd& grad, const ProjectionBundle& bundle);

struct EntropyReport {
  double total = 0.0;
  double per_site = 0.0;
};
/// Ent(nu | mu^N) for nu the product of tilted single-site measures with the
/// given means.
EntropyReport relative_entropy_product(const SingleSitePotential& pot,
                                       const Eigen::VectorXd& means);

}  // namespace hydrolim
