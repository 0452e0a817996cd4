#ifndef MNKIT_QUADRATURE_HPP_
#define MNKIT_QUADRATURE_HPP_

#include <cstddef>
#include <vector>

namespace mnkit {

struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing
  std::vector<double> weights;  // positive

  std::size_t size() const { return nodes.size(); }
};

// n-point Gauss-Lobatto rule on [a, b]; exact for polynomials of degree 2n-3.
QuadratureRule gauss_lobatto(int n, double a, double b);

// n-point Gauss-Legendre rule on [a, b]; used for projections only.
QuadratureRule gauss_legendre(int n, double a, double b);

// Two (n_q/2)-point Gauss-Lobatto rules on [-1,0] and [0,1]. The node mu = 0
// appears twice, once per half, so the rule has exactly n_q entries.
struct AngularQuadrature {
  QuadratureRule rule;
  int half_count = 0;

  std::size_t size() const { return rule.size(); }
};

AngularQuadrature angular_quadrature(int n_q);

// Spatial Gauss-Lobatto rule on the reference cell [-1/2, 1/2], weights sum to 1.
QuadratureRule reference_cell_rule(int q);

template <class F>
double integrate(const QuadratureRule& rule, F&& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
  return s;
}

}  // namespace mnkit

#endif  // MNKIT_QUADRATURE_HPP_
