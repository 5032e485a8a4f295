#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <queue>
#include <vector>

namespace hydrolim {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// Gauss-Hermite rule for the weight exp(-x^2/2); weights sum to sqrt(2 pi).
QuadratureRule gauss_hermite(int n);

/// Tensor grid of a one-dimensional rule in `dim` dimensions, row-major in the
/// last coordinate.  Returns nodes (dim x n^dim) and weights.
void tensor_grid(const QuadratureRule& rule, int dim, Eigen::MatrixXd& nodes,
                 Eigen::VectorXd& weights);

namespace detail {

inline double quad_norm(double v) { return std::abs(v); }
inline double quad_norm(const std::complex<double>& v) { return std::abs(v); }
template <class Derived>
double quad_norm(const Eigen::ArrayBase<Derived>& v) {
  return v.abs().maxCoeff();
}

constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Panel {
  double a, b;
  V value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class V, class F>
Panel<V> gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  V fc = f(c);
  V kron = fc * kWgk[7];
  V gauss = fc * kWg[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXgk[i];
    V s = f(c - dx) + f(c + dx);
    kron = kron + s * kWgk[i];
    if (i % 2 == 1) gauss = gauss + s * kWg[i / 2];
  }
  V value = kron * h;
  double err = quad_norm((kron - gauss) * h);
  return Panel<V>{a, b, value, err};
}

}  // namespace detail

template <class V>
struct QuadResult {
  V value;
  double abs_error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/**
 * Adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
 *
 * The interval is first split into `initial_panels` equal panels; panels are
 * then bisected in order of decreasing error estimate until the summed
 * estimate is below max(abs_tol, rel_tol * |I|).  V may be double,
 * std::complex<double> or a fixed-size Eigen array.
 */
template <class F>
auto integrate_adaptive(F&& f, double a, double b, double abs_tol,
                        double rel_tol, int initial_panels = 8,
                        int max_evaluations = 200000)
    -> QuadResult<decltype(f(a))> {
  using V = decltype(f(a));
  using detail::Panel;
  std::priority_queue<Panel<V>> heap;
  const double width = (b - a) / initial_panels;
  for (int p = 0; p < initial_panels; ++p) {
    double lo = a + p * width;
    double hi = (p + 1 == initial_panels) ? b : lo + width;
    heap.push(detail::gk15<V>(f, lo, hi));
  }
  int evals = 15 * initial_panels;
  V sum = heap.top().value * 0.0;
  double err = 0.0;
  {
    auto copy = heap;
    while (!copy.empty()) {
      sum = sum + copy.top().value;
      err += copy.top().error;
      copy.pop();
    }
  }
  while (err > std::max(abs_tol, rel_tol * detail::quad_norm(sum)) &&
         evals + 30 <= max_evaluations) {
    Panel<V> worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel<V> left = detail::gk15<V>(f, worst.a, mid);
    Panel<V> right = detail::gk15<V>(f, mid, worst.b);
    sum = sum - worst.value + left.value + right.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    evals += 30;
  }
  QuadResult<V> out{sum, err, evals, false};
  out.converged = err <= std::max(abs_tol, rel_tol * detail::quad_norm(sum));
  return out;
}

}  // namespace hydrolim
