#include "hydrolim/clt.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "hydrolim/quadrature.hpp"

namespace hydrolim {

std::vector<std::pair<double, double>> clt_intervals(int L) {
  const double len = 1.0 / (L + 1.5);
  std::vector<std::pair<double, double>> out;
  for (int k = 0; k <= L; ++k) {
    const double left = (L == 0) ? 0.0 : k * (1.0 - len) / L;
    out.emplace_back(left, left + len);
  }
  return out;
}

GammaData gamma_data(int J, int L) {
  GammaData d;
  d.gamma = block_average_matrix(J, L);
  d.intervals = clt_intervals(L);
  d.max_norm = d.gamma.rowwise().norm().maxCoeff();
  return d;
}

namespace {

/// Points on the half sphere {xi in S^L, first nonzero coordinate >= 0}
/// from a hyperspherical angle grid with `res` points per angle.
std::vector<Eigen::VectorXd> sphere_grid(int L, int res) {
  std::vector<Eigen::VectorXd> pts;
  const int D = L + 1;
  if (D == 1) {
    pts.push_back(Eigen::VectorXd::Ones(1));
    return pts;
  }
  std::vector<int> idx(L, 0);
  long total = 1;
  for (int k = 0; k < L; ++k) total *= res;
  for (long t = 0; t < total; ++t) {
    Eigen::VectorXd v(D);
    double s = 1.0;
    for (int k = 0; k < L; ++k) {
      // Last angle covers [0, pi) (antipodal symmetry), the others [0, pi].
      const double ang = (k + 1 == L) ? M_PI * idx[k] / res : M_PI * idx[k] / (res - 1);
      v(k) = s * std::cos(ang);
      s *= std::sin(ang);
    }
    v(L) = s;
    pts.push_back(v);
    for (int k = L - 1; k >= 0; --k) {
      if (++idx[k] < res) break;
      idx[k] = 0;
    }
  }
  return pts;
}

double poly_value(const Eigen::VectorXd& xi, double t) {
  double s = 0.0;
  for (int l = 0; l < xi.size(); ++l) s += xi(l) * dg_basis(l, t);
  return s;
}

}  // namespace

OmegaScan omega_scan(int L, int J, int resolution) {
  const auto intervals = clt_intervals(L);
  const Eigen::MatrixXd gamma = block_average_matrix(J, L);
  OmegaScan out;
  double best = 1e300, best_disc = 1e300;
  const int samples = 96;
  for (const Eigen::VectorXd& xi : sphere_grid(L, resolution)) {
    double max_cont = 0.0, max_disc = 0.0;
    for (const auto& [a, b] : intervals) {
      double lo = 1e300;
      double prev = poly_value(xi, a);
      for (int s = 0; s <= samples; ++s) {
        const double v = poly_value(xi, a + (b - a) * s / samples);
        if (v * prev <= 0.0) lo = 0.0;
        lo = std::min(lo, std::abs(v));
        prev = v;
      }
      max_cont = std::max(max_cont, lo);
      double dlo = 1e300;
      for (int j = 1; j <= J; ++j) {
        const double t = static_cast<double>(j) / J;
        if (t >= a && t <= b) dlo = std::min(dlo, std::abs(gamma.row(j - 1).dot(xi)));
      }
      if (dlo < 1e300) max_disc = std::max(max_disc, dlo);
    }
    if (max_cont < best) {
      best = max_cont;
      out.argmin = xi;
    }
    best_disc = std::min(best_disc, max_disc);
  }
  out.c_gamma = 0.5 * best;
  out.c_gamma_discrete = 0.5 * best_disc;
  return out;
}

LocalCltDensity::LocalCltDensity(const BlockFreeEnergy& block, CltOptions opts)
    : block_(block), opts_(opts) {
  const double gmax = block.gamma().rowwise().norm().maxCoeff();
  delta_ = std::min(opts_.delta0, opts_.delta0 / gmax);
}

Eigen::MatrixXd LocalCltDensity::frame_for(const GrandCanonicalEnsemble& ens) const {
  const Eigen::MatrixXd& gamma = block_.gamma();
  const int J = block_.J();
  Eigen::MatrixXd sigma = gamma.transpose() * ens.variances.asDiagonal() * gamma / J;
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw std::runtime_error("frame_for: singular covariance");
  Eigen::MatrixXd Lt = llt.matrixU();
  return Lt.triangularView<Eigen::Upper>().solve(
      Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols()));
}

LocalCltDensity::Raw LocalCltDensity::integrate(const GrandCanonicalEnsemble& ens,
                                                const Eigen::MatrixXd& C, int n) const {
  const SingleSitePotential& pot = block_.potential();
  const int J = block_.J();
  const int D = block_.L() + 1;
  const int nx = opts_.site_nodes;
  const QuadratureRule site = gauss_hermite(nx);
  const QuadratureRule freq = gauss_hermite(n);
  const double inv_sqrt_j = 1.0 / std::sqrt(static_cast<double>(J));

  // Single-site rules: nodes around the Gaussian centre of each tilted measure.
  std::vector<double> wgt(J * nx), off(J * nx);
  for (int j = 0; j < J; ++j) {
    const double c = ens.tilts(j) - pot.a();
    double z = 0.0, mean = 0.0;
    for (int k = 0; k < nx; ++k) {
      const double x = c + site.nodes[k];
      const double w = site.weights[k] * std::exp(-pot.delta(x, 0));
      wgt[j * nx + k] = w;
      off[j * nx + k] = x;
      z += w;
      mean += w * x;
    }
    mean /= z;
    for (int k = 0; k < nx; ++k) {
      wgt[j * nx + k] /= z;
      off[j * nx + k] -= mean;
    }
  }

  // Per-dimension phase factors exp(i eta_d gtilde_{jd} (x_k - m_j) / sqrt J).
  const Eigen::MatrixXd gt = block_.gamma() * C;  // J x D, row j = (C^t gamma^j)^t
  std::vector<std::vector<double>> ere(D), eim(D);
  for (int d = 0; d < D; ++d) {
    ere[d].resize(static_cast<std::size_t>(n) * J * nx);
    eim[d].resize(ere[d].size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < J; ++j) {
        const double f = freq.nodes[i] * gt(j, d) * inv_sqrt_j;
        for (int k = 0; k < nx; ++k) {
          const std::size_t p = (static_cast<std::size_t>(i) * J + j) * nx + k;
          ere[d][p] = std::cos(f * off[j * nx + k]);
          eim[d][p] = std::sin(f * off[j * nx + k]);
        }
      }
  }

  const double split = delta_ * std::sqrt(static_cast<double>(J));
  std::vector<std::vector<double>> pre(D), pim(D);
  for (int d = 0; d < D; ++d) {
    pre[d].assign(J * nx, 0.0);
    pim[d].assign(J * nx, 0.0);
  }
  std::vector<int> idx(D, 0);
  Eigen::VectorXd eta(D);
  std::complex<double> acc = 0.0;
  double total_abs = 0.0, outer_abs = 0.0;

  // Depth-first traversal of the tensor grid, carrying the partial products
  // over the leading dimensions.
  auto descend = [&](auto&& self, int d, const double* in_re, const double* in_im,
                     double weight) -> void {
    for (int i = 0; i < n; ++i) {
      idx[d] = i;
      eta(d) = freq.nodes[i];
      const double w = weight * freq.weights[i];
      const double* er = &ere[d][static_cast<std::size_t>(i) * J * nx];
      const double* ei = &eim[d][static_cast<std::size_t>(i) * J * nx];
      if (d + 1 < D) {
        double* or_ = pre[d].data();
        double* oi = pim[d].data();
        for (int p = 0; p < J * nx; ++p) {
          or_[p] = in_re[p] * er[p] - in_im[p] * ei[p];
          oi[p] = in_re[p] * ei[p] + in_im[p] * er[p];
        }
        self(self, d + 1, or_, oi, w);
        continue;
      }
      const double eta2 = eta.squaredNorm();
      const bool inner = (C * eta).norm() <= split;
      std::complex<double> logsum = 0.0, prod = 1.0;
      for (int j = 0; j < J; ++j) {
        double hr = 0.0, hi = 0.0;
        const int base = j * nx;
        for (int k = 0; k < nx; ++k) {
          const int p = base + k;
          hr += in_re[p] * er[p] - in_im[p] * ei[p];
          hi += in_re[p] * ei[p] + in_im[p] * er[p];
        }
        if (inner) logsum += std::log(std::complex<double>(hr, hi));
        else prod *= std::complex<double>(hr, hi);
      }
      std::complex<double> val = inner ? std::exp(logsum + 0.5 * eta2)
                                       : prod * std::exp(0.5 * eta2);
      acc += w * val;
      total_abs += std::abs(w * val);
      if (!inner) outer_abs += std::abs(w * val);
    }
  };
  std::vector<double> im0(J * nx, 0.0);
  descend(descend, 0, wgt.data(), im0.data(), 1.0);

  const double scale = std::abs(C.determinant()) / std::pow(2.0 * M_PI, D);
  Raw r;
  r.value = scale * acc.real();
  r.imag = scale * acc.imag();
  r.outer_fraction = total_abs > 0.0 ? outer_abs / total_abs : 0.0;
  return r;
}

DensityEval LocalCltDensity::evaluate(const Eigen::VectorXd& beta, int order) const {
  const int D = block_.L() + 1;
  BlockFreeEnergy::Legendre leg = block_.legendre(beta, 0);
  GrandCanonicalEnsemble ens = block_.ensemble_from_dual(leg.beta_hat);
  const Eigen::MatrixXd C = frame_for(ens);
  const int n = opts_.xi_nodes;

  DensityEval out;
  out.order = order;
  out.delta = delta_;
  out.split_radius = delta_ * std::sqrt(static_cast<double>(block_.J()));
  Raw raw = integrate(ens, C, n);
  out.value = raw.value;
  out.imag_part = raw.imag;
  out.outer_fraction = raw.outer_fraction;
  if (opts_.estimate_error) {
    const int nc = std::max(4, n - 6);
    out.abs_error = std::abs(integrate(ens, C, nc).value - raw.value);
  }
  out.ok = out.value > 0.0 && std::isfinite(out.value) &&
           out.abs_error <= opts_.rel_tol * out.value &&
           std::abs(out.imag_part) <= 1e-10 * out.value;
  if (order == 0) return out;

  // Central differences in beta with the whitening frame held fixed, so the
  // quadrature rule is a smooth function of beta.
  auto g_at = [&](const Eigen::VectorXd& b) {
    BlockFreeEnergy::Legendre l = block_.legendre(b, 0, &leg.beta_hat);
    return integrate(block_.ensemble_from_dual(l.beta_hat), C, n).value;
  };
  Eigen::VectorXd h(D);
  for (int d = 0; d < D; ++d) h(d) = opts_.fd_step * (1.0 + std::abs(beta(d)));
  out.gradient.resize(D);
  std::vector<double> gp(D), gm(D);
  for (int d = 0; d < D; ++d) {
    Eigen::VectorXd b = beta;
    b(d) += h(d);
    gp[d] = g_at(b);
    b(d) = beta(d) - h(d);
    gm[d] = g_at(b);
    out.gradient(d) = (gp[d] - gm[d]) / (2.0 * h(d));
  }
  if (order >= 2) {
    out.hessian.resize(D, D);
    for (int d = 0; d < D; ++d) {
      out.hessian(d, d) = (gp[d] - 2.0 * out.value + gm[d]) / (h(d) * h(d));
      for (int e = d + 1; e < D; ++e) {
        auto at = [&](double sd, double se) {
          Eigen::VectorXd b = beta;
          b(d) += sd * h(d);
          b(e) += se * h(e);
          return g_at(b);
        };
        const double v = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h(d) * h(e));
        out.hessian(d, e) = out.hessian(e, d) = v;
      }
    }
  }
  return out;
}

DensityEval clt_density(const SingleSitePotential& pot, const Eigen::VectorXd& beta, int J,
                        int L, int order, const CltOptions& opts) {
  BlockFreeEnergy block(pot, J, L);
  return LocalCltDensity(block, opts).evaluate(beta, order);
}

}  // namespace hydrolim
