#include "hydrolim/lsi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hydrolim/free_energy.hpp"

namespace hydrolim {

double two_scale_combine(double rho1, double rho2, double kappa) {
  if (!(rho1 > 0.0) || !(rho2 > 0.0) || !(kappa >= 0.0))
    throw std::invalid_argument("two_scale_combine: need rho1, rho2 > 0 and kappa >= 0");
  const double s = rho1 + (1.0 + kappa) * rho2;
  double disc = s * s - 4.0 * rho1 * rho2;
  if (disc < 0.0 && disc > -1e-14 * s * s) disc = 0.0;
  if (kappa == 0.0) return std::min(rho1, rho2);
  // Rationalised root avoids cancellation when rho1 rho2 << s^2.
  return 2.0 * rho1 * rho2 / (s + std::sqrt(disc));
}

double holley_stroock(double rho, double osc) {
  if (osc < 0.0) throw std::invalid_argument("holley_stroock: negative oscillation");
  return rho * std::exp(-2.0 * osc);
}

double tensorize(const std::vector<double>& rhos) {
  if (rhos.empty()) throw std::invalid_argument("tensorize: empty list");
  return *std::min_element(rhos.begin(), rhos.end());
}

double bakry_emery(const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& hessian,
                   const std::vector<Eigen::VectorXd>& grid) {
  if (grid.empty()) throw std::invalid_argument("bakry_emery: empty grid");
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& x : grid) {
    Eigen::MatrixXd h = hessian(x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (h + h.transpose()),
                                                      Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  return lo;
}

ConvexityCertificate convexity_scan(const SingleSitePotential& pot, int J, int L,
                                    double radius, int steps) {
  BlockFreeEnergy block(pot, J, L);
  const int D = L + 1;
  const bool gaussian = pot.is_gaussian() && pot.a() == 0.0;
  std::vector<Eigen::VectorXd> grid;
  std::vector<int> idx(D, 0);
  long total = 1;
  for (int d = 0; d < D; ++d) total *= steps;
  for (long t = 0; t < total; ++t) {
    Eigen::VectorXd bh(D);
    for (int d = 0; d < D; ++d)
      bh(d) = steps == 1 ? 0.0 : -radius + 2.0 * radius * idx[d] / (steps - 1);
    grid.push_back(block.dual(bh, 1).gradient);
    for (int d = D - 1; d >= 0; --d) {
      if (++idx[d] < steps) break;
      idx[d] = 0;
    }
  }
  auto hess = [&](const Eigen::VectorXd& beta) {
    return gaussian ? block.canonical_gaussian(beta, 2).hessian : block.canonical(beta, 2).hessian;
  };
  ConvexityCertificate c;
  c.J = J;
  c.L = L;
  c.family = family_name(pot.perturbation());
  c.radius = radius;
  c.points = static_cast<int>(grid.size());
  c.lambda = std::numeric_limits<double>::infinity();
  c.Lambda = 0.0;
  for (const auto& beta : grid) {
    Eigen::MatrixXd h = hess(beta);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (h + h.transpose()),
                                                      Eigen::EigenvaluesOnly);
    c.lambda = std::min(c.lambda, es.eigenvalues().minCoeff());
    c.Lambda = std::max(c.Lambda, es.eigenvalues().maxCoeff());
  }
  return c;
}

LsiChain conditional_lsi_pipeline(const SingleSitePotential& pot, int N, int M, int K, int L,
                                  int J, const std::optional<ConvexityCertificate>& cert) {
  if (!cert) throw std::invalid_argument("conditional_lsi_pipeline: missing convexity certificate");
  if (cert->J != J || cert->L != L)
    throw std::invalid_argument("conditional_lsi_pipeline: certificate is for another block");
  if (!(cert->lambda > 0.0))
    throw std::invalid_argument("conditional_lsi_pipeline: certificate is not positive");
  if (J < 1 || K % J != 0 || N != K * M)
    throw std::invalid_argument("conditional_lsi_pipeline: need K = R J and N = K M");
  LsiChain c;
  c.N = N;
  c.M = M;
  c.K = K;
  c.L = L;
  c.J = J;
  c.R = K / J;
  c.family = cert->family;
  c.lambda = cert->lambda;
  c.hess_bound = 1.0 + pot.c2_bound();
  // Each block of J spins: unit-convex Gaussian part plus a perturbation of
  // oscillation at most J osc(delta psi); the R blocks are independent.
  const double per_block = holley_stroock(1.0, J * pot.oscillation());
  c.rho1 = tensorize(std::vector<double>(c.R, per_block));
  c.rho2 = c.lambda;
  c.kappa = c.hess_bound * c.hess_bound / (c.rho1 * c.lambda);
  c.rho_dg = two_scale_combine(c.rho1, c.rho2, c.kappa);
  c.kappa2 = c.hess_bound * c.hess_bound / (c.rho_dg * c.lambda);
  c.rho_final = two_scale_combine(c.rho_dg, c.lambda, c.kappa2);
  return c;
}

double fluctuation_gradient_norm(const Eigen::VectorXd& grad, const ProjectionBundle& bundle) {
  return bundle.fluctuation_decompose(grad).parallel.norm();
}

EntropyReport relative_entropy_product(const SingleSitePotential& pot,
                                       const Eigen::VectorXd& means) {
  const double z0 = pot.log_mgf(0.0);
  EntropyReport r;
  for (Eigen::Index j = 0; j < means.size(); ++j) {
    const double m = means(j);
    const double s = pot.tilt_for_mean(m);
    // KL(mu_s | mu_0) = s m - psi*(s) + psi*(0).
    r.total += s * m - pot.log_mgf(s) + z0;
  }
  r.per_site = means.size() > 0 ? r.total / means.size() : 0.0;
  return r;
}

}  // namespace hydrolim
