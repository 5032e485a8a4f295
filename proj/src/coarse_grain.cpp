#include "hydrolim/coarse_grain.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hydrolim/quadrature.hpp"

namespace hydrolim {

namespace {

/// P_0..P_n and their derivatives up to `order` at x, as table[k][l].
std::vector<std::vector<double>> legendre_table(int n, double x, int order) {
  std::vector<std::vector<double>> t(order + 1, std::vector<double>(n + 2, 0.0));
  t[0][0] = 1.0;
  if (n + 1 >= 1) t[0][1] = x;
  for (int l = 1; l <= n; ++l)
    t[0][l + 1] = ((2.0 * l + 1.0) * x * t[0][l] - l * t[0][l - 1]) / (l + 1.0);
  for (int k = 1; k <= order; ++k) {
    t[k][0] = 0.0;
    t[k][1] = (k == 1) ? 1.0 : 0.0;
    for (int l = 1; l <= n; ++l)
      t[k][l + 1] = t[k][l - 1] + (2.0 * l + 1.0) * t[k - 1][l];
  }
  return t;
}

/// int_0^t f_l(s) ds.
double dg_antiderivative(int l, double t) {
  if (l == 0) return t;
  const double x = 2.0 * t - 1.0;
  auto p = legendre_table(l, x, 0);
  return std::sqrt(2.0 * l + 1.0) * (p[0][l + 1] - p[0][l - 1]) /
         (2.0 * (2.0 * l + 1.0));
}

Eigen::MatrixXd derivative_gram(int L, int order) {
  QuadratureRule gl = gauss_legendre(L + 2);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(L + 1, L + 1);
  for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
    const double t = 0.5 * (gl.nodes[q] + 1.0);
    const double w = 0.5 * gl.weights[q];
    Eigen::VectorXd d(L + 1);
    for (int l = 0; l <= L; ++l) d(l) = dg_basis_derivative(l, t, order);
    D += w * d * d.transpose();
  }
  return D;
}

}  // namespace

double dg_basis(int l, double t) {
  auto p = legendre_table(l, 2.0 * t - 1.0, 0);
  return std::sqrt(2.0 * l + 1.0) * p[0][l];
}

double dg_basis_derivative(int l, double t, int order) {
  if (order == 0) return dg_basis(l, t);
  auto p = legendre_table(l, 2.0 * t - 1.0, order);
  return std::sqrt(2.0 * l + 1.0) * std::pow(2.0, order) * p[order][l];
}

Eigen::MatrixXd block_average_matrix(int J, int L) {
  if (J < 1 || L < 0) throw std::invalid_argument("block_average_matrix: J >= 1, L >= 0");
  Eigen::MatrixXd g(J, L + 1);
  for (int l = 0; l <= L; ++l) {
    double prev = dg_antiderivative(l, 0.0);
    for (int j = 0; j < J; ++j) {
      const double next = dg_antiderivative(l, (j + 1.0) / J);
      g(j, l) = J * (next - prev);
      prev = next;
    }
  }
  return g;
}

GramResult gram_qjqt(int J, int L) {
  Eigen::MatrixXd g = block_average_matrix(J, L);
  GramResult r;
  r.matrix = g.transpose() * g / static_cast<double>(J);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      r.matrix - Eigen::MatrixXd::Identity(L + 1, L + 1));
  r.deviation = es.eigenvalues().cwiseAbs().maxCoeff();
  return r;
}

double cardinal_bspline(int L, double u) {
  if (u < 0.0 || u >= L + 1.0) return 0.0;
  if (L == 0) return 1.0;
  return (u * cardinal_bspline(L - 1, u) +
          (L + 1.0 - u) * cardinal_bspline(L - 1, u - 1.0)) /
         L;
}

double bspline_eval(int j, double theta, int M, int L) {
  if (j < 1 || j > M) throw std::invalid_argument("bspline_eval: j out of range");
  const double shift = static_cast<double>((L + 1) / 2) - (j - 1);
  theta -= std::floor(theta);
  double s = 0.0;
  for (int k = -(L + 2); k <= L + 2; ++k)
    s += cardinal_bspline(L, M * (theta + k) + shift);
  return s;
}

SplineSpace::SplineSpace(int M, int L) : M_(M), L_(L) {
  if (M < 1 || L < 0) throw std::invalid_argument("SplineSpace: M >= 1, L >= 0");
  const int D = dg_dim();
  QuadratureRule gl = gauss_legendre(L + 4);
  S_ = Eigen::MatrixXd::Zero(D, M);
  for (int m = 0; m < M; ++m) {
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double t = 0.5 * (gl.nodes[q] + 1.0);
      const double w = 0.5 * gl.weights[q];
      // Evaluate strictly inside the element so the polynomial piece is used.
      const double theta = (m + t) / M;
      for (int j = 1; j <= M; ++j) {
        const double b = bspline_eval(j, theta, M, L);
        if (b == 0.0) continue;
        for (int l = 0; l <= L; ++l) S_(m * (L + 1) + l, j - 1) += w * b * dg_basis(l, t);
      }
    }
  }
  // Round-off cleanup: the entries are exact rationals times sqrt(2l+1).
  S_ = S_.unaryExpr([](double v) { return std::abs(v) < 1e-15 ? 0.0 : v; });
  gram_ = S_.transpose() * S_ / static_cast<double>(M);
  Eigen::MatrixXd d1 = derivative_gram(L, 1);
  Eigen::MatrixXd d2 = derivative_gram(L, 2);
  Eigen::MatrixXd b1 = Eigen::MatrixXd::Zero(D, D), b2 = Eigen::MatrixXd::Zero(D, D);
  for (int m = 0; m < M; ++m) {
    b1.block(m * (L + 1), m * (L + 1), L + 1, L + 1) = d1 * M;
    b2.block(m * (L + 1), m * (L + 1), L + 1, L + 1) = d2 * std::pow(M, 3);
  }
  k1_ = S_.transpose() * b1 * S_;
  k2_ = S_.transpose() * b2 * S_;
  gram_llt_.compute(gram_);
  if (gram_llt_.info() != Eigen::Success)
    throw std::runtime_error("SplineSpace: singular Gram matrix");
}

double SplineSpace::value(const Eigen::VectorXd& c, double theta) const {
  double s = 0.0;
  for (int j = 1; j <= M_; ++j) s += c(j - 1) * bspline_eval(j, theta, M_, L_);
  return s;
}

Eigen::VectorXd SplineSpace::project_dg(const Eigen::VectorXd& alpha) const {
  return gram_llt_.solve(S_.transpose() * alpha / static_cast<double>(M_));
}

Eigen::VectorXd SplineSpace::dg_project_profile(const Profile& f, int points) const {
  QuadratureRule gl = gauss_legendre(points);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(dg_dim());
  for (int m = 0; m < M_; ++m)
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double t = 0.5 * (gl.nodes[q] + 1.0);
      const double fv = f((m + t) / M_) * 0.5 * gl.weights[q];
      for (int l = 0; l <= L_; ++l) alpha(m * (L_ + 1) + l) += fv * dg_basis(l, t);
    }
  return alpha;
}

Eigen::VectorXd SplineSpace::project(const Profile& f) const {
  return project_dg(dg_project_profile(f));
}

Eigen::VectorXd SplineSpace::interpolate(const Profile& f) const {
  if (L_ != 2) throw std::invalid_argument("interpolate: quadratic splines only");
  Eigen::VectorXd c(M_);
  for (int j = 1; j <= M_; ++j) c(j - 1) = f((2.0 * j - 1.0) / (2.0 * M_));
  return c;
}

double SplineSpace::l2_norm(const Eigen::VectorXd& c) const {
  return std::sqrt(c.dot(gram_ * c));
}

double SplineSpace::l2_distance(const Profile& f, const Eigen::VectorXd& c,
                                int points) const {
  QuadratureRule gl = gauss_legendre(points);
  double s = 0.0;
  for (int m = 0; m < M_; ++m)
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double theta = (m + 0.5 * (gl.nodes[q] + 1.0)) / M_;
      const double d = f(theta) - value(c, theta);
      s += 0.5 * gl.weights[q] / M_ * d * d;
    }
  return std::sqrt(s);
}

ProjectionBundle::ProjectionBundle(int N, int M, int L)
    : N_(N), M_(M), K_(M > 0 ? N / M : 0), L_(L), space_(M, L) {
  if (M < 1 || N % M != 0) throw std::invalid_argument("ProjectionBundle: N must equal K M");
  if (K_ < L + 1) throw std::invalid_argument("ProjectionBundle: need K >= L + 1");
  gamma_ = block_average_matrix(K_, L);
  Eigen::MatrixXd gk = gram_qjqt(K_, L).matrix;
  const int D = space_.dg_dim();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(D, D);
  for (int m = 0; m < M; ++m) B.block(m * (L + 1), m * (L + 1), L + 1, L + 1) = gk;
  const Eigen::MatrixXd& S = space_.embedding();
  pnpt_ = space_.gram().llt().solve(S.transpose() * B * S / static_cast<double>(M));
  pnpt_lu_.compute(pnpt_);
}

Eigen::VectorXd ProjectionBundle::dg_project(const Eigen::VectorXd& x) const {
  if (x.size() != N_) throw std::invalid_argument("dg_project: size mismatch");
  Eigen::VectorXd alpha(M_ * (L_ + 1));
  for (int m = 0; m < M_; ++m)
    alpha.segment(m * (L_ + 1), L_ + 1) =
        gamma_.transpose() * x.segment(m * K_, K_) / static_cast<double>(K_);
  return alpha;
}

Eigen::VectorXd ProjectionBundle::dg_adjoint(const Eigen::VectorXd& alpha) const {
  Eigen::VectorXd x(N_);
  for (int m = 0; m < M_; ++m)
    x.segment(m * K_, K_) = gamma_ * alpha.segment(m * (L_ + 1), L_ + 1);
  return x;
}

Eigen::VectorXd ProjectionBundle::project(const Eigen::VectorXd& x) const {
  return space_.project_dg(dg_project(x));
}

Eigen::VectorXd ProjectionBundle::adjoint(const Eigen::VectorXd& c) const {
  return dg_adjoint(space_.embedding() * c);
}

double ProjectionBundle::pnpt_deviation() const {
  // Symmetrize with the Gram factor: G^{1/2} (T - I) G^{-1/2}.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gs(space_.gram());
  Eigen::MatrixXd root = gs.operatorSqrt();
  Eigen::MatrixXd inv_root = gs.operatorInverseSqrt();
  Eigen::MatrixXd T = root * (pnpt_ - Eigen::MatrixXd::Identity(M_, M_)) * inv_root;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (T + T.transpose()));
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

FluctuationSplit ProjectionBundle::fluctuation_decompose(const Eigen::VectorXd& x) const {
  FluctuationSplit s;
  s.perp = adjoint(pnpt_lu_.solve(project(x)));
  s.parallel = x - s.perp;
  return s;
}

double pnpt_deviation(int M, int K, int L) {
  return ProjectionBundle(M * K, M, L).pnpt_deviation();
}

InverseSobolev inverse_sobolev_constants(int M, int L) {
  SplineSpace sp(M, L);
  InverseSobolev out{std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::quiet_NaN()};
  if (L >= 1) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        sp.stiffness(), sp.gram(), Eigen::EigenvaluesOnly);
    out.h1_over_l2 = std::sqrt(es.eigenvalues().maxCoeff());
  }
  if (L >= 2 && M >= 2) {
    // Constants span the kernel of both seminorms; restrict to its complement.
    Eigen::MatrixXd basis(M, M);
    basis.col(0) = Eigen::VectorXd::Ones(M);
    basis.rightCols(M - 1) = Eigen::MatrixXd::Identity(M, M).leftCols(M - 1);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd V = q.rightCols(M - 1);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        V.transpose() * sp.stiffness2() * V, V.transpose() * sp.stiffness() * V,
        Eigen::EigenvaluesOnly);
    out.h2_over_h1 = std::sqrt(es.eigenvalues().maxCoeff());
  }
  return out;
}

}  // namespace hydrolim
