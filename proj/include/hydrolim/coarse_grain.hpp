#pragma once

#include <Eigen/Dense>
#include <functional>

namespace hydrolim {

using Profile = std::function<double(double)>;

/// Shifted Legendre polynomial sqrt(2l+1) P_l(2t-1), orthonormal on [0, 1].
double dg_basis(int l, double t);
double dg_basis_derivative(int l, double t, int order = 1);

/// J x (L+1) matrix whose row j is gamma^j: entry (j, l) is J times the
/// integral of f_l over the j-th of J equal cells of [0, 1].
Eigen::MatrixXd block_average_matrix(int J, int L);

struct GramResult {
  Eigen::MatrixXd matrix;  ///< Q1 J Q1^t, entries <f_bar_l, f_bar_l'>
  double deviation;        ///< spectral norm of matrix - identity
};
GramResult gram_qjqt(int J, int L);

/// Uniform cardinal B-spline of degree L supported on [0, L+1].
double cardinal_bspline(int L, double u);

/// Periodic B-spline B_j (j = 1..M) of degree L on the uniform mesh of
/// [0, 1); wrapped copies are summed so that sum_j B_j = 1 for every M.
double bspline_eval(int j, double theta, int M, int L = 2);

/**
 * Periodic splines of degree L and maximal smoothness on M uniform elements,
 * embedded in the block-wise polynomial (DG) space.  DG coefficients are
 * stored block by block, alpha[m (L+1) + l].
 */
class SplineSpace {
 public:
  SplineSpace(int M, int L);

  int M() const { return M_; }
  int L() const { return L_; }
  int dim() const { return M_; }
  int dg_dim() const { return (L_ + 1) * M_; }

  /// DG coefficients of each basis function, dg_dim x M.
  const Eigen::MatrixXd& embedding() const { return S_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::MatrixXd& stiffness() const { return k1_; }
  const Eigen::MatrixXd& stiffness2() const { return k2_; }

  double value(const Eigen::VectorXd& c, double theta) const;
  double basis(int j, double theta) const { return bspline_eval(j, theta, M_, L_); }

  /// L^2 projection of DG coefficients onto the spline space.
  Eigen::VectorXd project_dg(const Eigen::VectorXd& alpha) const;
  /// Block-wise L^2 projection of a profile onto the DG space.
  Eigen::VectorXd dg_project_profile(const Profile& f, int points = 24) const;
  /// L^2 projection of a profile onto the spline space.
  Eigen::VectorXd project(const Profile& f) const;
  /// Interpolation at the element midpoints (2j-1)/(2M); quadratic splines only.
  Eigen::VectorXd interpolate(const Profile& f) const;

  double l2_norm(const Eigen::VectorXd& c) const;
  /// || f - y ||_{L^2} for a spline y, by Gauss-Legendre quadrature per element.
  double l2_distance(const Profile& f, const Eigen::VectorXd& c,
                     int points = 24) const;

 private:
  int M_, L_;
  Eigen::MatrixXd S_, gram_, k1_, k2_;
  Eigen::LLT<Eigen::MatrixXd> gram_llt_;
};

struct FluctuationSplit {
  Eigen::VectorXd perp;      ///< N P^t (P N P^t)^{-1} P x
  Eigen::VectorXd parallel;  ///< x - perp, lies in ker P
};

/**
 * Coarse-graining operators for N = K M lattice sites: the block projection
 * Q_M onto Y_M^DG and the spline projection P onto Y_M, with their
 * N-scaled adjoints.
 */
class ProjectionBundle {
 public:
  ProjectionBundle(int N, int M, int L);

  int N() const { return N_; }
  int M() const { return M_; }
  int K() const { return K_; }
  int L() const { return L_; }
  const SplineSpace& space() const { return space_; }
  const Eigen::MatrixXd& gamma() const { return gamma_; }

  Eigen::VectorXd dg_project(const Eigen::VectorXd& x) const;
  /// N Q_M^t alpha: the cell averages N int_{cell i} y.
  Eigen::VectorXd dg_adjoint(const Eigen::VectorXd& alpha) const;
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  Eigen::VectorXd adjoint(const Eigen::VectorXd& c) const;

  /// P N P^t as a matrix on spline coefficients.
  const Eigen::MatrixXd& pnpt() const { return pnpt_; }
  /// Operator norm of P N P^t - id with respect to the L^2 structure.
  double pnpt_deviation() const;

  FluctuationSplit fluctuation_decompose(const Eigen::VectorXd& x) const;

 private:
  int N_, M_, K_, L_;
  SplineSpace space_;
  Eigen::MatrixXd gamma_;
  Eigen::MatrixXd pnpt_;
  Eigen::PartialPivLU<Eigen::MatrixXd> pnpt_lu_;
};

double pnpt_deviation(int M, int K, int L);

struct InverseSobolev {
  double h1_over_l2;  ///< sup |y|_{H^1} / |y|_{L^2}
  double h2_over_h1;  ///< sup |y|_{H^2} / |y|_{H^1}; NaN when L < 2
};
InverseSobolev inverse_sobolev_constants(int M, int L);

}  // namespace hydrolim
