#include <cmath>
#include <random>
#include <stdexcept>

#include "hydrolim/clt.hpp"
#include "hydrolim/free_energy.hpp"
#include "hydrolim/quadrature.hpp"

namespace hydrolim {

namespace {

Eigen::VectorXd block_of(const Eigen::VectorXd& v, int m, int D) {
  return v.segment(m * D, D);
}

}  // namespace

FreeEnergyEval bar_H_dg(const BlockFreeEnergy& block, const Eigen::VectorXd& alpha, int M,
                        int order, const CltOptions& opts) {
  const int D = block.L() + 1;
  if (alpha.size() != D * M) throw std::invalid_argument("bar_H_dg: dimension mismatch");
  FreeEnergyEval out;
  out.method = FreeEnergyMethod::CramerFourier;
  out.order = order;
  out.gradient = Eigen::VectorXd::Zero(D * M);
  out.hessian = Eigen::MatrixXd::Zero(D * M, D * M);
  double v = 0.0;
  for (int m = 0; m < M; ++m) {
    FreeEnergyEval e = block.canonical(block_of(alpha, m, D), order, opts);
    out.ok = out.ok && e.ok;
    v += e.value;
    if (order >= 1) out.gradient.segment(m * D, D) = e.gradient;
    if (order >= 2) out.hessian.block(m * D, m * D, D, D) = e.hessian;
  }
  out.value = v / M;
  return out;
}

FreeEnergyEval meso_H_dg(const BlockFreeEnergy& block, const Eigen::VectorXd& alpha, int M,
                         int order) {
  const int D = block.L() + 1;
  FreeEnergyEval out;
  out.method = FreeEnergyMethod::Analytic;
  out.order = order;
  out.gradient = Eigen::VectorXd::Zero(D * M);
  out.hessian = Eigen::MatrixXd::Zero(D * M, D * M);
  double v = 0.0;
  for (int m = 0; m < M; ++m) {
    BlockFreeEnergy::Legendre l = block.legendre(block_of(alpha, m, D), order);
    v += l.eval.value;
    if (order >= 1) out.gradient.segment(m * D, D) = l.eval.gradient;
    if (order >= 2) out.hessian.block(m * D, m * D, D, D) = l.eval.hessian;
  }
  out.value = v / M;
  return out;
}

FreeEnergyEval phi_N_star(const BlockFreeEnergy& block, const Eigen::VectorXd& zhat, int M,
                          int order) {
  const int D = block.L() + 1;
  FreeEnergyEval out;
  out.method = FreeEnergyMethod::Analytic;
  out.order = order;
  out.gradient = Eigen::VectorXd::Zero(D * M);
  out.hessian = Eigen::MatrixXd::Zero(D * M, D * M);
  double v = 0.0;
  for (int m = 0; m < M; ++m) {
    FreeEnergyEval e = block.dual(block_of(zhat, m, D), order);
    v += e.value;
    if (order >= 1) out.gradient.segment(m * D, D) = e.gradient;
    if (order >= 2) out.hessian.block(m * D, m * D, D, D) = e.hessian;
  }
  out.value = v / M;
  return out;
}

MesoSplineEval meso_H_spline(const BlockFreeEnergy& block, const SplineSpace& space,
                             const Eigen::VectorXd& y) {
  const int M = space.M();
  const Eigen::MatrixXd& S = space.embedding();
  const Eigen::MatrixXd& G = space.gram();
  const Eigen::VectorXd gy = G * y;
  Eigen::VectorXd c = y;
  auto objective = [&](const Eigen::VectorXd& cc, int order) {
    FreeEnergyEval e = phi_N_star(block, S * cc, M, order);
    FreeEnergyEval out;
    out.value = gy.dot(cc) - e.value;
    if (order >= 1) out.gradient = gy - S.transpose() * e.gradient / M;
    if (order >= 2) out.hessian = -S.transpose() * e.hessian * S / M;
    return out;
  };
  FreeEnergyEval f = objective(c, 2);
  for (int it = 0; it < 100 && f.gradient.cwiseAbs().maxCoeff() > 1e-13; ++it) {
    Eigen::VectorXd step = (-f.hessian).llt().solve(f.gradient);
    double s = 1.0;
    for (int h = 0; h < 30; ++h, s *= 0.5) {
      FreeEnergyEval fc = objective(c + s * step, 2);
      if (fc.gradient.norm() < f.gradient.norm() || h == 29) {
        c += s * step;
        f = fc;
        break;
      }
    }
  }
  return MesoSplineEval{f.value, c};
}

MesoSplineEval continuum_H_spline(const SingleSitePotential& pot, const SplineSpace& space,
                                  const Eigen::VectorXd& y) {
  const int M = space.M();
  const Eigen::MatrixXd& G = space.gram();
  const QuadratureRule gl = gauss_legendre(20);
  // Basis values at all quadrature points.
  const int nq = M * static_cast<int>(gl.nodes.size());
  Eigen::MatrixXd B(nq, M);
  Eigen::VectorXd w(nq);
  for (int m = 0; m < M; ++m)
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const int r = m * static_cast<int>(gl.nodes.size()) + static_cast<int>(q);
      const double theta = (m + 0.5 * (gl.nodes[q] + 1.0)) / M;
      w(r) = 0.5 * gl.weights[q] / M;
      for (int j = 1; j <= M; ++j) B(r, j - 1) = space.basis(j, theta);
    }
  const Eigen::VectorXd gy = G * y;
  auto objective = [&](const Eigen::VectorXd& cc) {
    Eigen::VectorXd vals = B * cc;
    FreeEnergyEval out;
    out.value = gy.dot(cc);
    out.gradient = gy;
    out.hessian = Eigen::MatrixXd::Zero(M, M);
    for (int r = 0; r < nq; ++r) {
      TiltMoments mo = pot.moments(vals(r));
      out.value -= w(r) * mo.log_mgf;
      out.gradient -= w(r) * mo.mean * B.row(r).transpose();
      out.hessian -= w(r) * mo.variance * B.row(r).transpose() * B.row(r);
    }
    return out;
  };
  Eigen::VectorXd c = y;
  FreeEnergyEval f = objective(c);
  for (int it = 0; it < 100 && f.gradient.cwiseAbs().maxCoeff() > 1e-13; ++it) {
    Eigen::VectorXd step = (-f.hessian).llt().solve(f.gradient);
    double s = 1.0;
    for (int h = 0; h < 30; ++h, s *= 0.5) {
      FreeEnergyEval fc = objective(c + s * step);
      if (fc.gradient.norm() < f.gradient.norm() || h == 29) {
        c += s * step;
        f = fc;
        break;
      }
    }
  }
  return MesoSplineEval{f.value, c};
}

double macro_H(const SingleSitePotential& pot, const Profile& zeta) {
  auto f = [&](double t) { return pot.phi(zeta(t), 0); };
  return integrate_adaptive(f, 0.0, 1.0, 1e-12, 1e-10, 8).value;
}

SplineEnergy::SplineEnergy(SingleSitePotential pot, int N, int M, int L)
    : pot_(pot), N_(N), M_(M), K_(M > 0 ? N / M : 0), L_(L),
      block_(pot, (M > 0 && N % M == 0) ? N / M : L + 1, L), space_(M, L) {
  if (M < 1 || N % M != 0) throw std::invalid_argument("SplineEnergy: N must equal K M");
  const Eigen::MatrixXd& S = space_.embedding();
  const int D = space_.dg_dim();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(S);
  Eigen::MatrixXd Q = qr.householderQ();
  complement_ = std::sqrt(static_cast<double>(M)) * Q.rightCols(D - M);
}

Eigen::VectorXd SplineEnergy::minimize_fluctuation_meso(const Eigen::VectorXd& y) const {
  const Eigen::MatrixXd& S = space_.embedding();
  const Eigen::MatrixXd& E = complement_;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(E.cols());
  if (E.cols() == 0) return E * u;
  for (int it = 0; it < 50; ++it) {
    FreeEnergyEval e = meso_H_dg(block_, S * y + E * u, M_, 2);
    Eigen::VectorXd g = E.transpose() * e.gradient / M_;
    if (g.cwiseAbs().maxCoeff() < 1e-13) break;
    Eigen::MatrixXd H = E.transpose() * e.hessian * E / M_;
    u -= H.llt().solve(g);
  }
  return E * u;
}

Eigen::VectorXd SplineEnergy::minimize_fluctuation(const Eigen::VectorXd& y,
                                                   const CltOptions& opts) const {
  const Eigen::MatrixXd& S = space_.embedding();
  const Eigen::MatrixXd& E = complement_;
  if (E.cols() == 0) return Eigen::VectorXd::Zero(S.rows());
  // Start from the grand-canonical minimiser, which is O(1/K) away.
  Eigen::VectorXd u = E.transpose() * minimize_fluctuation_meso(y) / M_;
  for (int it = 0; it < 30; ++it) {
    FreeEnergyEval e = bar_H_dg(block_, S * y + E * u, M_, 2, opts);
    Eigen::VectorXd g = E.transpose() * e.gradient / M_;
    Eigen::MatrixXd H = E.transpose() * e.hessian * E / M_;
    Eigen::VectorXd step = H.ldlt().solve(g);
    u -= step;
    if (step.cwiseAbs().maxCoeff() < 1e-10) break;
  }
  return E * u;
}

SplineEnergyEval SplineEnergy::evaluate(const Eigen::VectorXd& y, int order,
                                        const SplineEnergyOptions& opts) const {
  const Eigen::MatrixXd& S = space_.embedding();
  const Eigen::MatrixXd& E = complement_;
  const Eigen::MatrixXd& G = space_.gram();
  const int dim = static_cast<int>(E.cols());
  const double n = static_cast<double>(N_);
  SplineEnergyEval out;
  out.zbar_star = minimize_fluctuation(y, opts.clt);
  const Eigen::VectorXd ustar = E.transpose() * out.zbar_star / M_;
  const Eigen::VectorXd alpha0 = S * y;

  // Laplace frame at the minimiser: u = u* + R^{-t} v with R R^t = Hess_u F.
  FreeEnergyEval e0 = bar_H_dg(block_, alpha0 + out.zbar_star, M_, 2, opts.clt);
  const double f_star = n * e0.value;
  Eigen::MatrixXd Hu = n * E.transpose() * e0.hessian * E / M_;
  Eigen::MatrixXd Rinvt = Eigen::MatrixXd::Identity(dim, dim);
  double log_det_r = 0.0;
  if (dim > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(Hu);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("SplineEnergy: fluctuation Hessian not positive");
    Eigen::MatrixXd R = llt.matrixL();
    for (int i = 0; i < dim; ++i) log_det_r += std::log(R(i, i));
    Rinvt = R.transpose().triangularView<Eigen::Upper>().solve(
        Eigen::MatrixXd::Identity(dim, dim));
  }

  // Nodes in v-space and weights for the standard Gaussian.
  Eigen::MatrixXd vnodes;
  Eigen::VectorXd vweights;
  bool mc = dim > opts.max_quadrature_dim;
  if (dim == 0) {
    vnodes.resize(0, 1);
    vweights = Eigen::VectorXd::Constant(1, 1.0);
  } else if (!mc) {
    tensor_grid(gauss_hermite(opts.nodes_per_dim), dim, vnodes, vweights);
  } else {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> nd;
    vnodes.resize(dim, opts.mc_samples);
    for (long s = 0; s < opts.mc_samples; ++s)
      for (int d = 0; d < dim; ++d) vnodes(d, s) = nd(rng);
    vweights = Eigen::VectorXd::Constant(opts.mc_samples,
                                         std::pow(2.0 * M_PI, 0.5 * dim) / opts.mc_samples);
  }

  const long nn = vweights.size();
  Eigen::VectorXd rho(nn);
  const int grad_order = std::max(order, 1);
  std::vector<Eigen::VectorXd> grads(nn);
  std::vector<Eigen::MatrixXd> hess(order >= 2 ? nn : 0);
  bool ok = true;
  for (long i = 0; i < nn; ++i) {
    Eigen::VectorXd v = dim > 0 ? Eigen::VectorXd(vnodes.col(i)) : Eigen::VectorXd();
    Eigen::VectorXd alpha = alpha0 + out.zbar_star;
    if (dim > 0) alpha += E * (Rinvt * v);
    FreeEnergyEval e = (dim == 0 && i == 0) ? e0 : bar_H_dg(block_, alpha, M_, grad_order, opts.clt);
    ok = ok && e.ok;
    const double v2 = dim > 0 ? v.squaredNorm() : 0.0;
    rho(i) = vweights(i) * std::exp(-(n * e.value - f_star) + 0.5 * v2);
    grads[i] = S.transpose() * e.gradient / M_;
    if (order >= 2) {
      if (e.hessian.size() == 0) e = bar_H_dg(block_, alpha, M_, 2, opts.clt);
      hess[i] = S.transpose() * e.hessian * S / M_;
    }
  }
  const double z = rho.sum();
  out.weight_spread = rho.maxCoeff() / std::max(rho.minCoeff(), 1e-300);
  if (mc) {
    const double mean = rho.mean();
    const double sd = std::sqrt((rho.array() - mean).square().sum() / (nn - 1));
    out.mc_rel_stderr = sd / mean / std::sqrt(static_cast<double>(nn));
  }
  FreeEnergyEval& ev = out.eval;
  ev.method = mc ? FreeEnergyMethod::MonteCarlo : FreeEnergyMethod::Quadrature;
  ev.order = order;
  ev.ok = ok;
  ev.value = (f_star + log_det_r - std::log(z) - 0.5 * dim * std::log(n)) / n;
  Eigen::VectorXd mean_g = Eigen::VectorXd::Zero(M_);
  for (long i = 0; i < nn; ++i) mean_g += rho(i) / z * grads[i];
  ev.gradient = G.llt().solve(mean_g);
  if (order >= 2) {
    Eigen::MatrixXd mh = Eigen::MatrixXd::Zero(M_, M_);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(M_, M_);
    for (long i = 0; i < nn; ++i) {
      const double p = rho(i) / z;
      mh += p * hess[i];
      Eigen::VectorXd d = grads[i] - mean_g;
      cov += p * d * d.transpose();
    }
    ev.hessian = mh - n * cov;
  }
  return out;
}

Eigen::MatrixXd SplineEnergy::gaussian_schur_hessian() const {
  const Eigen::MatrixXd& S = space_.embedding();
  const Eigen::MatrixXd& E = complement_;
  const int D = L_ + 1;
  Eigen::MatrixXd ginv = block_.gram().inverse();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(D * M_, D * M_);
  for (int m = 0; m < M_; ++m) A.block(m * D, m * D, D, D) = ginv / M_;
  Eigen::MatrixXd hyy = S.transpose() * A * S;
  if (E.cols() == 0) return hyy;
  Eigen::MatrixXd hyu = S.transpose() * A * E;
  Eigen::MatrixXd huu = E.transpose() * A * E;
  return hyy - hyu * huu.llt().solve(hyu.transpose());
}

Eigen::VectorXd SplineEnergy::l2_eigenvalues(const Eigen::MatrixXd& h) const {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (h + h.transpose()), space_.gram(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

FluctuationMinimizers minimize_fluctuation(const SingleSitePotential& pot,
                                           const Eigen::VectorXd& y, int N, int M, int L) {
  SplineEnergy se(pot, N, M, L);
  return FluctuationMinimizers{se.minimize_fluctuation(y), se.minimize_fluctuation_meso(y)};
}

GradientConvergence gradient_convergence_check(const SingleSitePotential& pot,
                                               const Profile& zeta, int K, int M, int L,
                                               const SplineEnergyOptions& opts) {
  SplineEnergy se(pot, K * M, M, L);
  const SplineSpace& sp = se.space();
  const Eigen::VectorXd y = sp.project(zeta);
  const Eigen::VectorXd grad = se.evaluate(y, 1, opts).eval.gradient;
  auto phi_prime = [&](double t) { return pot.phi(zeta(t), 1); };
  const Eigen::VectorXd pf = sp.project(phi_prime);
  const Eigen::VectorXd cont = continuum_H_spline(pot, sp, y).dual;
  GradientConvergence r;
  r.projected = sp.l2_norm(grad - pf);
  r.embedded = sp.l2_distance(phi_prime, grad);
  r.lattice = sp.l2_norm(grad - cont);
  r.floor = sp.l2_norm(cont - pf);
  return r;
}

}  // namespace hydrolim
