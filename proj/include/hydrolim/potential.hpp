#pragma once

#include <complex>
#include <string>
#include <utility>
#include <variant>

namespace hydrolim {

struct Zero {};
struct Cosine {
  double amplitude = 0.0;
  double frequency = 1.0;
};
/// amplitude * exp(-(z - center)^2 / (2 width^2))
struct BoundedBump {
  double amplitude = 0.0;
  double width = 1.0;
  double center = 0.0;
};

using Perturbation = std::variant<Zero, Cosine, BoundedBump>;

/// d-th derivative (d = 0, 1, 2) of the bounded perturbation at z.
double perturbation_value(const Perturbation& p, double z, int d = 0);
/// Bound on |dpsi| + |dpsi''| used as the C^2 budget.
double c2_bound(const Perturbation& p);
/// sup dpsi - inf dpsi.
double oscillation(const Perturbation& p);
std::string family_name(const Perturbation& p);

/// Linear coefficient a such that exp(-psi) has mean zero.
double calibrate_a(const Perturbation& p);

struct TiltMoments {
  double log_mgf = 0.0;    ///< psi*(sigma)
  double mean = 0.0;       ///< (psi*)'(sigma)
  double variance = 0.0;   ///< (psi*)''(sigma)
  double third = 0.0;      ///< (psi*)'''(sigma)
  double abs_error = 0.0;  ///< quadrature error estimate on the partition sum
};

/**
 * Single-site potential psi(z) = z^2/2 + a z + dpsi(z).
 *
 * The tilted measure mu_m has density exp(t z - psi(z) - psi*(t)) with the
 * tilt t chosen so that its mean is m.
 */
class SingleSitePotential {
 public:
  static constexpr double kDelta0 = 0.5;

  explicit SingleSitePotential(Perturbation p);
  SingleSitePotential(Perturbation p, double a);

  double a() const { return a_; }
  const Perturbation& perturbation() const { return p_; }
  double c2_bound() const { return c2_; }
  double oscillation() const { return osc_; }
  std::string family() const { return family_name(p_); }
  bool is_gaussian() const;

  double value(double z) const;
  double derivative(double z) const;
  double second_derivative(double z) const;
  double delta(double z, int d = 0) const;

  TiltMoments moments(double sigma) const;
  /// order-th derivative of psi* (order 0..3).
  double log_mgf(double sigma, int order = 0) const;

  /// Tilt t with (psi*)'(t) = m.
  double tilt_for_mean(double m) const;

  /// Legendre transform phi(m) and its first two derivatives.
  double phi(double m, int order = 0) const;

  /// e^{-imz} E_{mu_m}[e^{izX}] by complex quadrature.
  std::complex<double> char_fn(double m, double z) const;
  /// -log(h)/z^2 on the principal branch; Var/2 at z = 0.  |z| <= kDelta0.
  std::complex<double> h2(double m, double z) const;

  /// Range of (psi*)'' over tilts, by scan.
  std::pair<double, double> variance_range() const;

  /// Half-width of the integration window around the Gaussian centre.
  double window() const { return window_; }

 private:
  TiltMoments moments_impl(double sigma) const;

  Perturbation p_;
  double a_ = 0.0;
  double c2_ = 0.0;
  double osc_ = 0.0;
  double window_ = 0.0;
  int kind_ = 0;
  double q0_ = 0.0, q1_ = 0.0, q2_ = 0.0;
};

}  // namespace hydrolim
