#include "mnkit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mnkit {

namespace {

constexpr double kNewtonTol = 1e-14;
constexpr int kNewtonMaxIter = 100;

// Legendre P_n and P_{n-1} at x by the three-term recurrence.
void legendre_pair(int n, double x, double& pn, double& pn1) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    pn = 1.0;
    pn1 = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  pn = p1;
  pn1 = p0;
}

QuadratureRule map_rule(const std::vector<double>& x, const std::vector<double>& w, double a, double b) {
  QuadratureRule r;
  r.nodes.resize(x.size());
  r.weights.resize(x.size());
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.nodes[i] = c + h * x[i];
    r.weights[i] = h * w[i];
  }
  return r;
}

}  // namespace

QuadratureRule gauss_lobatto(int n, double a, double b) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto: need n >= 2, got " + std::to_string(n));
  if (!(a < b)) throw std::invalid_argument("gauss_lobatto: need a < b");
  const int deg = n - 1;
  // Newton on (1-x^2) P'_deg = 0 written via the recurrence, Chebyshev-Lobatto start.
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) x[i] = -std::cos(std::numbers::pi * i / deg);
  for (int i = 1; i < deg; ++i) {
    double xi = x[i];
    for (int it = 0; it < kNewtonMaxIter; ++it) {
      double pn, pn1;
      legendre_pair(deg, xi, pn, pn1);
      // x_new = x - (x P_N - P_{N-1}) / (n P_N)
      double dx = (xi * pn - pn1) / (n * pn);
      xi -= dx;
      if (std::abs(dx) < kNewtonTol) break;
    }
    x[i] = xi;
  }
  // Symmetrize and pin the endpoints.
  for (int i = 0; i < n / 2; ++i) {
    double s = 0.5 * (x[n - 1 - i] - x[i]);
    x[i] = -s;
    x[n - 1 - i] = s;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  x.front() = -1.0;
  x.back() = 1.0;
  for (int i = 0; i < n; ++i) {
    double pn, pn1;
    legendre_pair(deg, x[i], pn, pn1);
    w[i] = 2.0 / (deg * n * pn * pn);
  }
  QuadratureRule r = map_rule(x, w, a, b);
  r.nodes.front() = a;
  r.nodes.back() = b;
  return r;
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  if (!(a < b)) throw std::invalid_argument("gauss_legendre: need a < b");
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double xi = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < kNewtonMaxIter; ++it) {
      double pn, pn1;
      legendre_pair(n, xi, pn, pn1);
      dp = n * (xi * pn - pn1) / (xi * xi - 1.0);
      double dx = pn / dp;
      xi -= dx;
      if (std::abs(dx) < kNewtonTol) break;
    }
    double pn, pn1;
    legendre_pair(n, xi, pn, pn1);
    dp = n * (xi * pn - pn1) / (xi * xi - 1.0);
    x[i] = xi;
    w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
  std::sort(x.begin(), x.end());
  // weights are symmetric; recompute after sort to keep pairs aligned
  for (int i = 0; i < n; ++i) {
    double pn, pn1;
    legendre_pair(n, x[i], pn, pn1);
    double d = n * (x[i] * pn - pn1) / (x[i] * x[i] - 1.0);
    w[i] = 2.0 / ((1.0 - x[i] * x[i]) * d * d);
  }
  return map_rule(x, w, a, b);
}

AngularQuadrature angular_quadrature(int n_q) {
  if (n_q < 4 || n_q % 2 != 0)
    throw std::invalid_argument("angular_quadrature: n_q must be even and >= 4, got " + std::to_string(n_q));
  const int h = n_q / 2;
  QuadratureRule neg = gauss_lobatto(h, -1.0, 0.0);
  QuadratureRule pos = gauss_lobatto(h, 0.0, 1.0);
  AngularQuadrature q;
  q.half_count = h;
  q.rule.nodes = neg.nodes;
  q.rule.weights = neg.weights;
  q.rule.nodes.insert(q.rule.nodes.end(), pos.nodes.begin(), pos.nodes.end());
  q.rule.weights.insert(q.rule.weights.end(), pos.weights.begin(), pos.weights.end());
  return q;
}

QuadratureRule reference_cell_rule(int q) {
  QuadratureRule r = gauss_lobatto(q, -0.5, 0.5);
  return r;
}

}  // namespace mnkit
