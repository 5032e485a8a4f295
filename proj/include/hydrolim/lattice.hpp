#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <vector>

#include "hydrolim/potential.hpp"

namespace hydrolim {

using CVector = std::vector<std::complex<double>>;

/// Thin wrapper over Eigen's FFT with an unscaled forward transform
/// X_k = sum_j x_j e^{-2 pi i j k / N} and a 1/N-scaled inverse.
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();
  Fft(Fft&&) noexcept;
  Fft& operator=(Fft&&) noexcept;
  int size() const { return n_; }
  void forward(const Eigen::VectorXd& x, CVector& out);
  void forward(const CVector& x, CVector& out);
  void inverse(const CVector& in, Eigen::VectorXd& x);
  void inverse(const CVector& in, CVector& x);

 private:
  struct Impl;
  int n_;
  std::unique_ptr<Impl> impl_;
  std::vector<double> rbuf_;
};

double hamiltonian(const SingleSitePotential& pot, const Eigen::VectorXd& x);
Eigen::VectorXd grad_hamiltonian(const SingleSitePotential& pot,
                                 const Eigen::VectorXd& x);

/// A = N^2 times the periodic second-difference matrix (positive semi-definite).
Eigen::VectorXd apply_A(const Eigen::VectorXd& x);
/// Eigenvalues 4 N^2 sin^2(pi k / N), k = 0..N-1.
Eigen::VectorXd eigenvalues_A(int N);
/// sqrt(2A) w, applied spectrally.
Eigen::VectorXd sqrt_2A_apply(const Eigen::VectorXd& w);

/**
 * Periodic Kawasaki generator on N sites, holding its Fourier symbol.
 */
class KawasakiOperator {
 public:
  explicit KawasakiOperator(int N);
  int size() const { return N_; }
  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  double max_eigenvalue() const { return lambda_.maxCoeff(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_spectral(const Eigen::VectorXd& x);
  Eigen::VectorXd apply_sqrt_2A(const Eigen::VectorXd& w);
  Fft& fft() { return fft_; }

 private:
  int N_;
  Eigen::VectorXd lambda_;
  Fft fft_;
  CVector spec_;
};

/// Squared H^{-1} norm of the step function x_j on [(j-1)/N, j/N), computed
/// from exact Fourier coefficients; the constant mode is dropped.
double h_minus_one_norm_sq(const Eigen::VectorXd& x);
double h_minus_one_norm(const Eigen::VectorXd& x);
/// Same, from an already transformed vector (unscaled forward DFT).
double h_minus_one_norm_sq_spectral(const CVector& xhat);

/// L^2 norm of the step embedding, sqrt(mean x_j^2).
double step_l2_norm(const Eigen::VectorXd& x);

/// Squared H^{-1} norm of a smooth periodic profile from equispaced samples
/// f(j/n), j = 0..n-1, via its trigonometric interpolant.
double profile_h_minus_one_norm_sq(const Eigen::VectorXd& samples);

/// Repeat each entry `factor` times (refines a step function).
Eigen::VectorXd refine_step(const Eigen::VectorXd& x, int factor);

}  // namespace hydrolim
