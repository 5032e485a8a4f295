#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "hydrolim/coarse_grain.hpp"
#include "hydrolim/potential.hpp"

namespace hydrolim {

enum class FreeEnergyMethod { Analytic, CramerFourier, DirectQuadrature, Quadrature, MonteCarlo };
std::string method_name(FreeEnergyMethod m);

struct FreeEnergyEval {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
  FreeEnergyMethod method = FreeEnergyMethod::Analytic;
  int order = 0;
  bool ok = true;
  double abs_error = 0.0;
};

/// Product of tilted single-site measures mu_{m_j} attached to a block.
struct GrandCanonicalEnsemble {
  Eigen::VectorXd beta_hat;   ///< dual variable
  Eigen::VectorXd tilts;      ///< beta_hat . gamma^j
  Eigen::VectorXd means;      ///< m_j = (psi*)'(tilt_j)
  Eigen::VectorXd variances;  ///< (psi*)''(tilt_j)
};

struct CltOptions {
  int xi_nodes = 24;          ///< Gauss-Hermite nodes per frequency dimension
  int site_nodes = 48;        ///< Gauss-Hermite nodes per single-site measure
  double delta0 = SingleSitePotential::kDelta0;
  double fd_step = 1e-4;      ///< relative finite-difference step in beta
  bool estimate_error = true; ///< compare against a coarser frequency rule
  double rel_tol = 1e-6;      ///< evaluations above this relative error fail
};

/**
 * Free energies of one block of J spins coarse-grained by the first L+1
 * shifted Legendre moments.
 */
class BlockFreeEnergy {
 public:
  BlockFreeEnergy(SingleSitePotential pot, int J, int L);

  int J() const { return J_; }
  int L() const { return L_; }
  const SingleSitePotential& potential() const { return pot_; }
  const Eigen::MatrixXd& gamma() const { return gamma_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  /// log(J^{(L+1)/2} times the Jacobian of Q1) = log det(Q1 J Q1^t) / 2.
  double log_jacobian() const { return log_jac_; }

  /// bar psi*_J(beta_hat) = (1/J) sum_j psi*(beta_hat . gamma^j).
  FreeEnergyEval dual(const Eigen::VectorXd& beta_hat, int order) const;

  struct Legendre {
    FreeEnergyEval eval;
    Eigen::VectorXd beta_hat;
    int iterations = 0;
  };
  /// bar psi_J(beta) as the Legendre transform of the dual, by damped Newton.
  Legendre legendre(const Eigen::VectorXd& beta, int order,
                    const Eigen::VectorXd* guess = nullptr) const;

  GrandCanonicalEnsemble ensemble(const Eigen::VectorXd& beta) const;
  GrandCanonicalEnsemble ensemble_from_dual(const Eigen::VectorXd& beta_hat) const;

  /// psi_J(beta) through the Cramer representation and the local CLT density.
  FreeEnergyEval canonical(const Eigen::VectorXd& beta, int order,
                           const CltOptions& opts = {}) const;
  /// psi_J(beta) by tensor Gauss-Hermite quadrature over the fibre
  /// {Q1 x = beta} with its Hausdorff measure.  Intended for small J.
  FreeEnergyEval canonical_direct(const Eigen::VectorXd& beta,
                                  long node_budget = 3000000) const;
  /// Closed form for the Gaussian potential.
  FreeEnergyEval canonical_gaussian(const Eigen::VectorXd& beta, int order) const;

 private:
  SingleSitePotential pot_;
  int J_, L_;
  Eigen::MatrixXd gamma_, gram_;
  Eigen::LLT<Eigen::MatrixXd> gram_llt_;
  double log_jac_ = 0.0;
};

FreeEnergyEval bar_psi_star(const SingleSitePotential& pot, const Eigen::VectorXd& beta_hat,
                            int J, int L, int order);
FreeEnergyEval bar_psi(const SingleSitePotential& pot, const Eigen::VectorXd& beta, int J,
                       int L, int order);
GrandCanonicalEnsemble grand_canonical_means(const SingleSitePotential& pot,
                                             const Eigen::VectorXd& beta, int J, int L);
FreeEnergyEval psi_J(const SingleSitePotential& pot, const Eigen::VectorXd& beta, int J,
                     int L, int order,
                     FreeEnergyMethod method = FreeEnergyMethod::CramerFourier);

// ---------------------------------------------------------------------------
// Mesoscopic energies on Y_M^DG and Y_M (N = K M spins, blocks of K).

/// DG free energy (1/M) sum_m psi_K(alpha^(m)).  The gradient and Hessian are
/// with respect to the L^2 structure, so block m of the gradient is
/// grad psi_K(alpha^(m)).
FreeEnergyEval bar_H_dg(const BlockFreeEnergy& block, const Eigen::VectorXd& alpha,
                        int M, int order, const CltOptions& opts = {});

struct SplineEnergyOptions {
  int nodes_per_dim = 8;          ///< Gauss-Hermite nodes after Laplace recentering
  int max_quadrature_dim = 4;     ///< above this L M, Monte Carlo is used
  long mc_samples = 4000;
  std::uint64_t seed = 12345;
  CltOptions clt;
};

struct SplineEnergyEval {
  FreeEnergyEval eval;            ///< gradient in spline coefficients of the L^2 gradient
  Eigen::VectorXd zbar_star;      ///< fluctuation minimiser (DG coefficients)
  double weight_spread = 0.0;     ///< max/min ratio diagnostic of quadrature weights
  double mc_rel_stderr = 0.0;
};

/**
 * bar H(y) for y in Y_M (spline coefficients): the marginal of exp(-N bar H_dg)
 * over the L^2 complement of Y_M in Y_M^DG.
 */
class SplineEnergy {
 public:
  SplineEnergy(SingleSitePotential pot, int N, int M, int L);

  const BlockFreeEnergy& block() const { return block_; }
  const SplineSpace& space() const { return space_; }
  int N() const { return N_; }
  int M() const { return M_; }
  /// L^2-orthonormal basis of the complement, DG coefficients (dg_dim x L M).
  const Eigen::MatrixXd& complement() const { return complement_; }

  SplineEnergyEval evaluate(const Eigen::VectorXd& y, int order,
                            const SplineEnergyOptions& opts = {}) const;

  /// Minimiser of bar H_dg(y + z) over the complement (DG coefficients of z).
  Eigen::VectorXd minimize_fluctuation(const Eigen::VectorXd& y,
                                       const CltOptions& opts = {}) const;
  /// Minimiser of the grand-canonical DG energy over the complement.
  Eigen::VectorXd minimize_fluctuation_meso(const Eigen::VectorXd& y) const;

  /// Hessian of bar H in the Gaussian case from the Schur complement of the
  /// exact quadratic DG energy (L^2-coefficient form, M x M).
  Eigen::MatrixXd gaussian_schur_hessian() const;

  /// Eigenvalues of a coefficient Hessian relative to the L^2 Gram matrix.
  Eigen::VectorXd l2_eigenvalues(const Eigen::MatrixXd& coeff_hessian) const;

 private:
  SingleSitePotential pot_;
  int N_, M_, K_, L_;
  BlockFreeEnergy block_;
  SplineSpace space_;
  Eigen::MatrixXd complement_;
};

struct FluctuationMinimizers {
  Eigen::VectorXd zbar_star;  ///< for bar H_dg
  Eigen::VectorXd z_star;     ///< for the grand-canonical DG energy
};
FluctuationMinimizers minimize_fluctuation(const SingleSitePotential& pot,
                                           const Eigen::VectorXd& y, int N, int M, int L);

/// phi*_N(zhat) = (1/N) sum_i psi*(N int_{cell i} zhat) for zhat in Y_M^DG.
FreeEnergyEval phi_N_star(const BlockFreeEnergy& block, const Eigen::VectorXd& zhat,
                          int M, int order);

/// Grand-canonical energy on Y_M^DG: (1/M) sum_m bar psi_K(z^(m)).
FreeEnergyEval meso_H_dg(const BlockFreeEnergy& block, const Eigen::VectorXd& alpha,
                         int M, int order);

struct MesoSplineEval {
  double value;
  Eigen::VectorXd dual;  ///< maximiser yhat_N in spline coefficients (= L^2 gradient)
};
/// Constrained Legendre transform on Y_M: sup_{yhat in Y_M} <y, yhat> - phi*_N(yhat).
MesoSplineEval meso_H_spline(const BlockFreeEnergy& block, const SplineSpace& space,
                             const Eigen::VectorXd& y);
/// Same with phi*_N replaced by its N -> infinity limit int psi*(yhat).
MesoSplineEval continuum_H_spline(const SingleSitePotential& pot, const SplineSpace& space,
                                  const Eigen::VectorXd& y);

/// Macroscopic energy int phi(zeta) by adaptive quadrature.
double macro_H(const SingleSitePotential& pot, const Profile& zeta);

struct GradientConvergence {
  double projected;  ///< |grad bar H(P zeta) - P(phi' o zeta)|_{L^2}
  double embedded;   ///< |grad bar H(P zeta) - phi' o zeta|_{L^2}
  double lattice;    ///< |grad bar H(P zeta) - grad H_{Y_M}(P zeta)| with N -> infinity dual
  double floor;      ///< |grad H_{Y_M}(P zeta) - P(phi' o zeta)|, independent of K
};
GradientConvergence gradient_convergence_check(const SingleSitePotential& pot,
                                               const Profile& zeta, int K, int M, int L,
                                               const SplineEnergyOptions& opts = {});

}  // namespace hydrolim
