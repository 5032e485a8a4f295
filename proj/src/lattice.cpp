#include "hydrolim/lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <unsupported/Eigen/FFT>

namespace hydrolim {

struct Fft::Impl {
  Eigen::FFT<double> fft;
};

Fft::Fft(int n) : n_(n), impl_(std::make_unique<Impl>()), rbuf_(n) {
  if (n < 1) throw std::invalid_argument("Fft: size must be positive");
}
Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::forward(const Eigen::VectorXd& x, CVector& out) {
  for (int i = 0; i < n_; ++i) rbuf_[i] = x(i);
  impl_->fft.fwd(out, rbuf_);
}
void Fft::forward(const CVector& x, CVector& out) { impl_->fft.fwd(out, x); }
void Fft::inverse(const CVector& in, Eigen::VectorXd& x) {
  impl_->fft.inv(rbuf_, in);
  x.resize(n_);
  for (int i = 0; i < n_; ++i) x(i) = rbuf_[i];
}
void Fft::inverse(const CVector& in, CVector& x) { impl_->fft.inv(x, in); }

double hamiltonian(const SingleSitePotential& pot, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += pot.value(x(i));
  return s;
}

Eigen::VectorXd grad_hamiltonian(const SingleSitePotential& pot,
                                 const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) g(i) = pot.derivative(x(i));
  return g;
}

Eigen::VectorXd apply_A(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  const double n2 = static_cast<double>(n) * n;
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = x((i + n - 1) % n);
    const double r = x((i + 1) % n);
    y(i) = n2 * ((x(i) - l) + (x(i) - r));
  }
  return y;
}

Eigen::VectorXd eigenvalues_A(int N) {
  Eigen::VectorXd lam(N);
  for (int k = 0; k < N; ++k) {
    const double s = std::sin(M_PI * k / N);
    lam(k) = 4.0 * static_cast<double>(N) * N * s * s;
  }
  return lam;
}

Eigen::VectorXd sqrt_2A_apply(const Eigen::VectorXd& w) {
  KawasakiOperator op(static_cast<int>(w.size()));
  return op.apply_sqrt_2A(w);
}

KawasakiOperator::KawasakiOperator(int N)
    : N_(N), lambda_(eigenvalues_A(N)), fft_(N), spec_(N) {}

Eigen::VectorXd KawasakiOperator::apply(const Eigen::VectorXd& x) const {
  if (x.size() != N_) throw std::invalid_argument("KawasakiOperator: size");
  return apply_A(x);
}

Eigen::VectorXd KawasakiOperator::apply_spectral(const Eigen::VectorXd& x) {
  fft_.forward(x, spec_);
  for (int k = 0; k < N_; ++k) spec_[k] *= lambda_(k);
  Eigen::VectorXd y;
  fft_.inverse(spec_, y);
  return y;
}

Eigen::VectorXd KawasakiOperator::apply_sqrt_2A(const Eigen::VectorXd& w) {
  fft_.forward(w, spec_);
  spec_[0] = 0.0;
  for (int k = 1; k < N_; ++k) spec_[k] *= std::sqrt(2.0 * lambda_(k));
  Eigen::VectorXd y;
  fft_.inverse(spec_, y);
  return y;
}

double h_minus_one_norm_sq_spectral(const CVector& xhat) {
  // |f_hat(k)|^2 / (2 pi k)^2 summed over each alias class r + nN in closed
  // form: (1 + 2 cos^2(pi r/N)) / (12 N^4 sin^2(pi r/N)) |X_r|^2.
  const int n = static_cast<int>(xhat.size());
  const double n4 = std::pow(static_cast<double>(n), 4);
  double s = 0.0;
  for (int r = 1; r < n; ++r) {
    const double th = M_PI * r / n;
    const double sn = std::sin(th), cs = std::cos(th);
    s += std::norm(xhat[r]) * (1.0 + 2.0 * cs * cs) / (12.0 * n4 * sn * sn);
  }
  return s;
}

double h_minus_one_norm_sq(const Eigen::VectorXd& x) {
  Fft fft(static_cast<int>(x.size()));
  CVector xhat;
  fft.forward(x, xhat);
  return h_minus_one_norm_sq_spectral(xhat);
}

double h_minus_one_norm(const Eigen::VectorXd& x) {
  return std::sqrt(h_minus_one_norm_sq(x));
}

double step_l2_norm(const Eigen::VectorXd& x) {
  return std::sqrt(x.squaredNorm() / static_cast<double>(x.size()));
}

double profile_h_minus_one_norm_sq(const Eigen::VectorXd& samples) {
  const int n = static_cast<int>(samples.size());
  Fft fft(n);
  CVector c;
  fft.forward(samples, c);
  double s = 0.0;
  for (int r = 1; r < n; ++r) {
    const int k = r <= n / 2 ? r : r - n;
    const double fk = 2.0 * M_PI * k;
    // The Nyquist coefficient is shared between the modes +-n/2.
    const double weight = (2 * r == n) ? 0.5 : 1.0;
    s += weight * std::norm(c[r]) / (static_cast<double>(n) * n) / (fk * fk);
  }
  return s;
}

Eigen::VectorXd refine_step(const Eigen::VectorXd& x, int factor) {
  Eigen::VectorXd y(x.size() * factor);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    y.segment(i * factor, factor).setConstant(x(i));
  return y;
}

}  // namespace hydrolim
