#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "hydrolim/free_energy.hpp"

namespace hydrolim {

/// L+1 disjoint closed subintervals of [0, 1] of length 1/(L + 1.5), equally
/// spaced, on which every nonzero polynomial of degree L has a zero-free
/// interval.
std::vector<std::pair<double, double>> clt_intervals(int L);

struct GammaData {
  Eigen::MatrixXd gamma;  ///< J x (L+1), rows gamma^j
  std::vector<std::pair<double, double>> intervals;
  double max_norm;        ///< max_j |gamma^j|
};
GammaData gamma_data(int J, int L);

struct OmegaScan {
  double c_gamma;           ///< half of inf_{|xi|=1} max_k omega_k(xi)
  double c_gamma_discrete;  ///< same with the infimum over block points j/J
  Eigen::VectorXd argmin;
};
/// Grid scan of the continuum and discrete nondegeneracy constants on S^L.
OmegaScan omega_scan(int L, int J, int resolution);

struct DensityEval {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
  int order = 0;
  double imag_part = 0.0;
  double abs_error = 0.0;
  double delta = 0.0;         ///< inner-region radius parameter
  double split_radius = 0.0;  ///< delta sqrt(J)
  double outer_fraction = 0.0;
  bool ok = true;
};

/**
 * Density at the origin of sqrt(J)(Q1 X - beta) for X distributed as the
 * grand-canonical product attached to beta, by Fourier inversion.
 *
 * The frequency integral is computed with a tensor Gauss-Hermite rule in
 * coordinates that whiten the limiting Gaussian.  Frequencies with
 * |xi| <= delta sqrt(J) use the small-frequency representation
 * exp(-sum z_j^2 h2(m_j, z_j)); the rest use the plain product of
 * characteristic functions.
 */
class LocalCltDensity {
 public:
  LocalCltDensity(const BlockFreeEnergy& block, CltOptions opts = {});

  DensityEval evaluate(const Eigen::VectorXd& beta, int order) const;

  /// Value only, for a known grand-canonical ensemble and whitening frame.
  struct Raw {
    double value;
    double imag;
    double outer_fraction;
  };
  Raw integrate(const GrandCanonicalEnsemble& ens, const Eigen::MatrixXd& frame,
                int nodes) const;
  /// Whitening frame C with C^t Sigma C = I for Sigma = Hess bar psi*.
  Eigen::MatrixXd frame_for(const GrandCanonicalEnsemble& ens) const;
  double delta() const { return delta_; }

 private:
  const BlockFreeEnergy& block_;
  CltOptions opts_;
  double delta_;
};

DensityEval clt_density(const SingleSitePotential& pot, const Eigen::VectorXd& beta, int J,
                        int L, int order, const CltOptions& opts = {});

}  // namespace hydrolim
