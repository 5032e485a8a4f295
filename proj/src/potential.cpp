#include "hydrolim/potential.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hydrolim/quadrature.hpp"

namespace hydrolim {

namespace {

constexpr int kPanels = 16;
constexpr double kRelTol = 1e-13;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double window_for(double c2) { return std::sqrt(2.0 * (37.0 + 2.0 * c2)); }

}  // namespace

double perturbation_value(const Perturbation& p, double z, int d) {
  return std::visit(
      Overloaded{
          [](const Zero&) { return 0.0; },
          [&](const Cosine& c) {
            const double w = c.frequency;
            const double arg = w * z;
            switch (d) {
              case 0: return c.amplitude * std::cos(arg);
              case 1: return -c.amplitude * w * std::sin(arg);
              default: return -c.amplitude * w * w * std::cos(arg);
            }
          },
          [&](const BoundedBump& b) {
            const double u = (z - b.center) / b.width;
            const double g = b.amplitude * std::exp(-0.5 * u * u);
            switch (d) {
              case 0: return g;
              case 1: return -g * u / b.width;
              default: return g * (u * u - 1.0) / (b.width * b.width);
            }
          }},
      p);
}

double c2_bound(const Perturbation& p) {
  return std::visit(
      Overloaded{[](const Zero&) { return 0.0; },
                 [](const Cosine& c) {
                   const double amp = std::abs(c.amplitude);
                   return std::max(amp, amp * c.frequency * c.frequency);
                 },
                 [](const BoundedBump& b) {
                   const double amp = std::abs(b.amplitude);
                   return std::max(amp, amp / (b.width * b.width));
                 }},
      p);
}

double oscillation(const Perturbation& p) {
  return std::visit(
      Overloaded{[](const Zero&) { return 0.0; },
                 [](const Cosine& c) {
                   return c.frequency == 0.0 ? 0.0 : 2.0 * std::abs(c.amplitude);
                 },
                 [](const BoundedBump& b) { return std::abs(b.amplitude); }},
      p);
}

std::string family_name(const Perturbation& p) {
  return std::visit(Overloaded{[](const Zero&) { return std::string("zero"); },
                               [](const Cosine&) { return std::string("cosine"); },
                               [](const BoundedBump&) {
                                 return std::string("bounded_bump");
                               }},
                    p);
}

double calibrate_a(const Perturbation& p) {
  double a = 0.0;
  for (int it = 0; it < 60; ++it) {
    SingleSitePotential trial(p, a);
    TiltMoments mo = trial.moments(0.0);
    double step = mo.mean / mo.variance;
    a += step;
    if (std::abs(mo.mean) < 1e-14) return a - step;
    if (std::abs(step) < 1e-15) return a;
  }
  throw std::runtime_error("calibrate_a: Newton iteration did not converge");
}

SingleSitePotential::SingleSitePotential(Perturbation p, double a)
    : p_(std::move(p)), a_(a) {
  c2_ = hydrolim::c2_bound(p_);
  osc_ = hydrolim::oscillation(p_);
  window_ = window_for(c2_);
  if (const auto* c = std::get_if<Cosine>(&p_)) {
    kind_ = 1;
    q0_ = c->amplitude;
    q1_ = c->frequency;
  } else if (const auto* b = std::get_if<BoundedBump>(&p_)) {
    if (!(b->width > 0.0))
      throw std::invalid_argument("BoundedBump: width must be positive");
    kind_ = 2;
    q0_ = b->amplitude;
    q1_ = b->width;
    q2_ = b->center;
  }
}

SingleSitePotential::SingleSitePotential(Perturbation p)
    : SingleSitePotential(p, calibrate_a(p)) {}

bool SingleSitePotential::is_gaussian() const { return kind_ == 0 || q0_ == 0.0; }

double SingleSitePotential::delta(double z, int d) const {
  switch (kind_) {
    case 0: return 0.0;
    case 1: {
      const double arg = q1_ * z;
      if (d == 0) return q0_ * std::cos(arg);
      if (d == 1) return -q0_ * q1_ * std::sin(arg);
      return -q0_ * q1_ * q1_ * std::cos(arg);
    }
    default: {
      const double u = (z - q2_) / q1_;
      const double g = q0_ * std::exp(-0.5 * u * u);
      if (d == 0) return g;
      if (d == 1) return -g * u / q1_;
      return g * (u * u - 1.0) / (q1_ * q1_);
    }
  }
}

double SingleSitePotential::value(double z) const {
  return 0.5 * z * z + a_ * z + delta(z, 0);
}
double SingleSitePotential::derivative(double z) const {
  return z + a_ + delta(z, 1);
}
double SingleSitePotential::second_derivative(double z) const {
  return 1.0 + delta(z, 2);
}

TiltMoments SingleSitePotential::moments_impl(double sigma) const {
  // sigma z - psi(z) = -(z - c)^2/2 + c^2/2 - dpsi(z) with c = sigma - a.
  const double c = sigma - a_;
  auto f = [&](double u) {
    const double w = std::exp(-0.5 * u * u - delta(c + u, 0));
    Eigen::Array4d v;
    v << w, w * u, w * u * u, w * u * u * u;
    return v;
  };
  auto res = integrate_adaptive(f, -window_, window_, 0.0, kRelTol, kPanels);
  const Eigen::Array4d& s = res.value;
  const double z0 = s(0);
  const double mu = s(1) / z0;
  const double m2 = s(2) / z0;
  const double m3 = s(3) / z0;
  TiltMoments out;
  out.log_mgf = 0.5 * c * c + std::log(z0);
  out.mean = c + mu;
  out.variance = m2 - mu * mu;
  out.third = m3 - 3.0 * mu * m2 + 2.0 * mu * mu * mu;
  out.abs_error = res.abs_error / z0;
  return out;
}

TiltMoments SingleSitePotential::moments(double sigma) const {
  return moments_impl(sigma);
}

double SingleSitePotential::log_mgf(double sigma, int order) const {
  TiltMoments m = moments_impl(sigma);
  switch (order) {
    case 0: return m.log_mgf;
    case 1: return m.mean;
    case 2: return m.variance;
    case 3: return m.third;
    default: throw std::invalid_argument("log_mgf: order must be 0..3");
  }
}

double SingleSitePotential::tilt_for_mean(double m) const {
  double lo = -std::abs(m) - 10.0 + std::min(a_, 0.0);
  double hi = std::abs(m) + 10.0 + std::max(a_, 0.0);
  double t = m + a_;
  if (t <= lo || t >= hi) t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    TiltMoments mo = moments_impl(t);
    const double r = mo.mean - m;
    if (std::abs(r) <= 1e-14 * (1.0 + std::abs(m))) return t;
    if (r > 0.0) hi = t; else lo = t;
    double next = t - r / mo.variance;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) < 1e-16 * (1.0 + std::abs(t))) return next;
    t = next;
  }
  throw std::runtime_error("tilt_for_mean: no convergence");
}

double SingleSitePotential::phi(double m, int order) const {
  const double t = tilt_for_mean(m);
  switch (order) {
    case 0: return t * m - log_mgf(t, 0);
    case 1: return t;
    case 2: return 1.0 / log_mgf(t, 2);
    default: throw std::invalid_argument("phi: order must be 0..2");
  }
}

std::complex<double> SingleSitePotential::char_fn(double m, double z) const {
  const double t = tilt_for_mean(m);
  const double c = t - a_;
  const double norm = moments_impl(t).log_mgf;
  const double shift = 0.5 * c * c - norm;
  auto f = [&](double u) {
    const double x = c + u;
    const double w = std::exp(shift - 0.5 * u * u - delta(x, 0));
    const double ph = z * (x - m);
    return std::complex<double>(w * std::cos(ph), w * std::sin(ph));
  };
  return integrate_adaptive(f, -window_, window_, 1e-15, 1e-13, kPanels).value;
}

std::complex<double> SingleSitePotential::h2(double m, double z) const {
  if (std::abs(z) > kDelta0)
    throw std::domain_error("h2: |z| exceeds the small-frequency radius");
  if (z == 0.0) return 0.5 * log_mgf(tilt_for_mean(m), 2);
  return -std::log(char_fn(m, z)) / (z * z);
}

std::pair<double, double> SingleSitePotential::variance_range() const {
  if (kind_ == 0) return {1.0, 1.0};
  double lo = 1e300, hi = -1e300;
  const double span = kind_ == 1 ? 2.0 * M_PI / std::max(std::abs(q1_), 1e-3) : 24.0;
  const double start = kind_ == 1 ? a_ : q2_ + a_ - 12.0;
  const int n = 400;
  for (int i = 0; i <= n; ++i) {
    double v = moments_impl(start + span * i / n).variance;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

}  // namespace hydrolim
