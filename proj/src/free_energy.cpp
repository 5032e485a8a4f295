#include "hydrolim/free_energy.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hydrolim/clt.hpp"
#include "hydrolim/quadrature.hpp"

namespace hydrolim {

std::string method_name(FreeEnergyMethod m) {
  switch (m) {
    case FreeEnergyMethod::Analytic: return "Analytic";
    case FreeEnergyMethod::CramerFourier: return "CramerFourier";
    case FreeEnergyMethod::DirectQuadrature: return "DirectQuadrature";
    case FreeEnergyMethod::Quadrature: return "Quadrature";
    case FreeEnergyMethod::MonteCarlo: return "MonteCarlo";
  }
  return "Unknown";
}

BlockFreeEnergy::BlockFreeEnergy(SingleSitePotential pot, int J, int L)
    : pot_(std::move(pot)), J_(J), L_(L) {
  if (J < L + 1) throw std::invalid_argument("BlockFreeEnergy: need J >= L + 1");
  gamma_ = block_average_matrix(J, L);
  gram_ = gram_qjqt(J, L).matrix;
  gram_llt_.compute(gram_);
  const Eigen::MatrixXd& lf = gram_llt_.matrixL();
  log_jac_ = 0.0;
  for (int l = 0; l <= L; ++l) log_jac_ += std::log(lf(l, l));
}

FreeEnergyEval BlockFreeEnergy::dual(const Eigen::VectorXd& beta_hat, int order) const {
  const int D = L_ + 1;
  if (beta_hat.size() != D) throw std::invalid_argument("dual: dimension mismatch");
  FreeEnergyEval out;
  out.order = order;
  out.method = FreeEnergyMethod::Analytic;
  out.gradient = Eigen::VectorXd::Zero(D);
  out.hessian = Eigen::MatrixXd::Zero(D, D);
  double v = 0.0;
  for (int j = 0; j < J_; ++j) {
    const Eigen::VectorXd g = gamma_.row(j).transpose();
    TiltMoments mo = pot_.moments(beta_hat.dot(g));
    v += mo.log_mgf;
    if (order >= 1) out.gradient += mo.mean * g;
    if (order >= 2) out.hessian += mo.variance * g * g.transpose();
  }
  out.value = v / J_;
  out.gradient /= J_;
  out.hessian /= J_;
  return out;
}

BlockFreeEnergy::Legendre BlockFreeEnergy::legendre(const Eigen::VectorXd& beta, int order,
                                                    const Eigen::VectorXd* guess) const {
  const int D = L_ + 1;
  if (beta.size() != D) throw std::invalid_argument("legendre: dimension mismatch");
  Eigen::VectorXd bh;
  if (guess) {
    bh = *guess;
  } else {
    Eigen::VectorXd rhs = beta;
    rhs(0) += pot_.a();
    bh = gram_llt_.solve(rhs);
  }
  FreeEnergyEval d = dual(bh, 2);
  Eigen::VectorXd r = d.gradient - beta;
  int it = 0;
  const double tol = 1e-13 * (1.0 + beta.cwiseAbs().maxCoeff());
  for (; it < 100 && r.cwiseAbs().maxCoeff() > tol; ++it) {
    Eigen::VectorXd step = d.hessian.llt().solve(r);
    double s = 1.0;
    bool accepted = false;
    for (int h = 0; h < 40; ++h, s *= 0.5) {
      Eigen::VectorXd cand = bh - s * step;
      FreeEnergyEval dc = dual(cand, 2);
      Eigen::VectorXd rc = dc.gradient - beta;
      if (rc.norm() < r.norm() || h == 39) {
        bh = cand;
        d = dc;
        r = rc;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (r.cwiseAbs().maxCoeff() > 1e-9 * (1.0 + beta.cwiseAbs().maxCoeff()))
    throw std::runtime_error("legendre: Newton iteration did not converge");
  Legendre out;
  out.beta_hat = bh;
  out.iterations = it;
  out.eval.order = order;
  out.eval.method = FreeEnergyMethod::Analytic;
  out.eval.value = beta.dot(bh) - d.value;
  out.eval.gradient = bh;
  if (order >= 2) out.eval.hessian = d.hessian.inverse();
  return out;
}

GrandCanonicalEnsemble BlockFreeEnergy::ensemble_from_dual(const Eigen::VectorXd& bh) const {
  GrandCanonicalEnsemble e;
  e.beta_hat = bh;
  e.tilts = gamma_ * bh;
  e.means.resize(J_);
  e.variances.resize(J_);
  for (int j = 0; j < J_; ++j) {
    TiltMoments mo = pot_.moments(e.tilts(j));
    e.means(j) = mo.mean;
    e.variances(j) = mo.variance;
  }
  return e;
}

GrandCanonicalEnsemble BlockFreeEnergy::ensemble(const Eigen::VectorXd& beta) const {
  return ensemble_from_dual(legendre(beta, 0).beta_hat);
}

FreeEnergyEval BlockFreeEnergy::canonical(const Eigen::VectorXd& beta, int order,
                                          const CltOptions& opts) const {
  Legendre leg = legendre(beta, order);
  LocalCltDensity dens(*this, opts);
  DensityEval g = dens.evaluate(beta, order);
  FreeEnergyEval out;
  out.method = FreeEnergyMethod::CramerFourier;
  out.order = order;
  out.ok = g.ok;
  out.abs_error = g.abs_error / (J_ * g.value);
  out.value = leg.eval.value - (log_jac_ + std::log(g.value)) / J_;
  if (order >= 1) out.gradient = leg.eval.gradient - g.gradient / (J_ * g.value);
  if (order >= 2) {
    Eigen::MatrixXd hl = g.hessian / g.value -
                         g.gradient * g.gradient.transpose() / (g.value * g.value);
    out.hessian = leg.eval.hessian - hl / J_;
  }
  return out;
}

FreeEnergyEval BlockFreeEnergy::canonical_direct(const Eigen::VectorXd& beta,
                                                 long node_budget) const {
  const int D = L_ + 1;
  const int d = J_ - D;
  // Q1 = gamma^t / J.  Fibre: x = x0 + U t with U an orthonormal basis of ker Q1.
  Eigen::MatrixXd Q1 = gamma_.transpose() / static_cast<double>(J_);
  Eigen::VectorXd x0 = Q1.transpose() * (Q1 * Q1.transpose()).ldlt().solve(beta);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gamma_);
  Eigen::MatrixXd Qfull = qr.householderQ();
  Eigen::MatrixXd U = Qfull.rightCols(d);
  const double base = 0.5 * x0.squaredNorm() + pot_.a() * x0.sum();
  double integral = 0.0;
  if (d == 0) {
    double s = 0.0;
    for (int i = 0; i < J_; ++i) s += pot_.delta(x0(i));
    integral = std::exp(-s);
  } else {
    int n = static_cast<int>(std::floor(std::pow(static_cast<double>(node_budget), 1.0 / d)));
    n = std::max(2, std::min(n, 40));
    QuadratureRule gh = gauss_hermite(n);
    std::vector<int> idx(d, 0);
    Eigen::VectorXd x(J_);
    long total = 1;
    for (int k = 0; k < d; ++k) total *= n;
    for (long t = 0; t < total; ++t) {
      double w = 1.0;
      x = x0;
      for (int k = 0; k < d; ++k) {
        w *= gh.weights[idx[k]];
        x += gh.nodes[idx[k]] * U.col(k);
      }
      double s = 0.0;
      for (int i = 0; i < J_; ++i) s += pot_.delta(x(i));
      integral += w * std::exp(-s);
      for (int k = d - 1; k >= 0; --k) {
        if (++idx[k] < n) break;
        idx[k] = 0;
      }
    }
  }
  FreeEnergyEval out;
  out.method = FreeEnergyMethod::DirectQuadrature;
  out.order = 0;
  out.value = (base - std::log(integral)) / J_;
  return out;
}

FreeEnergyEval BlockFreeEnergy::canonical_gaussian(const Eigen::VectorXd& beta,
                                                   int order) const {
  if (!pot_.is_gaussian() || pot_.a() != 0.0)
    throw std::invalid_argument("canonical_gaussian: potential is not Gaussian");
  const double l2pi = std::log(2.0 * M_PI);
  Eigen::VectorXd gb = gram_llt_.solve(beta);
  FreeEnergyEval out;
  out.method = FreeEnergyMethod::Analytic;
  out.order = order;
  out.value = 0.5 * beta.dot(gb) - 0.5 * l2pi + (L_ + 1.0) / (2.0 * J_) * l2pi;
  if (order >= 1) out.gradient = gb;
  if (order >= 2) out.hessian = gram_.inverse();
  return out;
}

FreeEnergyEval bar_psi_star(const SingleSitePotential& pot, const Eigen::VectorXd& beta_hat,
                            int J, int L, int order) {
  return BlockFreeEnergy(pot, J, L).dual(beta_hat, order);
}

FreeEnergyEval bar_psi(const SingleSitePotential& pot, const Eigen::VectorXd& beta, int J,
                       int L, int order) {
  return BlockFreeEnergy(pot, J, L).legendre(beta, order).eval;
}

GrandCanonicalEnsemble grand_canonical_means(const SingleSitePotential& pot,
                                             const Eigen::VectorXd& beta, int J, int L) {
  return BlockFreeEnergy(pot, J, L).ensemble(beta);
}

FreeEnergyEval psi_J(const SingleSitePotential& pot, const Eigen::VectorXd& beta, int J,
                     int L, int order, FreeEnergyMethod method) {
  BlockFreeEnergy block(pot, J, L);
  switch (method) {
    case FreeEnergyMethod::CramerFourier: return block.canonical(beta, order);
    case FreeEnergyMethod::DirectQuadrature:
      if (order > 0) throw std::invalid_argument("psi_J: direct quadrature gives values only");
      return block.canonical_direct(beta);
    case FreeEnergyMethod::Analytic: return block.canonical_gaussian(beta, order);
    default: throw std::invalid_argument("psi_J: unsupported method");
  }
}

}  // namespace hydrolim
