#include "hydrolim/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace hydrolim {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be positive");
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jac(k, k - 1) = std::sqrt(static_cast<double>(k));
    jac(k - 1, k) = jac(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton polish on the orthonormal Hermite recurrence, then Christoffel
    // weights.
    double x = es.eigenvalues()(i);
    double sum_sq = 0.0;
    for (int it = 0; it < 3; ++it) {
      double pm = 0.0, p = 1.0;
      sum_sq = 1.0;
      for (int k = 0; k < n; ++k) {
        double pn = (x * p - std::sqrt(static_cast<double>(k)) * pm) /
                    std::sqrt(k + 1.0);
        pm = p;
        p = pn;
        if (k + 1 < n) sum_sq += p * p;
      }
      double dp = std::sqrt(static_cast<double>(n)) * pm;
      if (dp != 0.0) x -= p / dp;
    }
    double pm = 0.0, p = 1.0;
    sum_sq = 1.0;
    for (int k = 0; k + 1 < n; ++k) {
      double pn = (x * p - std::sqrt(static_cast<double>(k)) * pm) /
                  std::sqrt(k + 1.0);
      pm = p;
      p = pn;
      sum_sq += p * p;
    }
    rule.nodes[i] = x;
    rule.weights[i] = std::sqrt(2.0 * M_PI) / sum_sq;
  }
  // Symmetrize.
  for (int i = 0; i < n / 2; ++i) {
    double x = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
    double w = 0.5 * (rule.weights[n - 1 - i] + rule.weights[i]);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

void tensor_grid(const QuadratureRule& rule, int dim, Eigen::MatrixXd& nodes,
                 Eigen::VectorXd& weights) {
  const int n = static_cast<int>(rule.nodes.size());
  long total = 1;
  for (int d = 0; d < dim; ++d) total *= n;
  nodes.resize(dim, total);
  weights.resize(total);
  std::vector<int> idx(dim, 0);
  for (long t = 0; t < total; ++t) {
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      nodes(d, t) = rule.nodes[idx[d]];
      w *= rule.weights[idx[d]];
    }
    weights(t) = w;
    for (int d = dim - 1; d >= 0; --d) {
      if (++idx[d] < n) break;
      idx[d] = 0;
    }
  }
}

}  // namespace hydrolim
