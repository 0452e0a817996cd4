#ifndef MNKIT_BASIS_HPP_
#define MNKIT_BASIS_HPP_

#include <string>
#include <string_view>

#include "mnkit/quadrature.hpp"
#include "mnkit/types.hpp"

namespace mnkit {

enum class BasisFamily { monomial, mixed, legendre };

BasisFamily parse_basis_family(std::string_view name);
std::string to_string(BasisFamily f);

class MomentBasis {
 public:
  MomentBasis(BasisFamily family, int order);

  BasisFamily family() const { return family_; }
  int order() const { return order_; }
  // N+1 for monomial and legendre, 2N+1 for mixed (1, mu+, mu-, mu+^2, mu-^2, ...).
  int size() const { return family_ == BasisFamily::mixed ? 2 * order_ + 1 : order_ + 1; }

  Eigen::VectorXd eval(double mu) const;
  void eval_into(double mu, double* out) const;

 private:
  BasisFamily family_;
  int order_;
};

Eigen::VectorXd basis_eval(const MomentBasis& basis, double mu);

// (1/2) <b> under the quadrature.
MomentVector isotropic_moments(const MomentBasis& basis, const AngularQuadrature& quad);

template <class F>
MomentVector moments_of_density(const MomentBasis& basis, const AngularQuadrature& quad, F&& f) {
  MomentVector u = MomentVector::Zero(basis.size());
  Eigen::VectorXd b(basis.size());
  for (std::size_t j = 0; j < quad.size(); ++j) {
    const double mu = quad.rule.nodes[j];
    basis.eval_into(mu, b.data());
    u += quad.rule.weights[j] * f(mu) * b;
  }
  return u;
}

// Basis and quadrature tabulated once: row j of B is b(mu_j)^T.
class MomentModel {
 public:
  MomentModel(MomentBasis basis, AngularQuadrature quad);

  const MomentBasis& basis() const { return basis_; }
  const AngularQuadrature& quadrature() const { return quad_; }
  int size() const { return basis_.size(); }
  int nodes_count() const { return static_cast<int>(mu_.size()); }

  const Eigen::MatrixXd& B() const { return B_; }
  const Eigen::VectorXd& weights() const { return w_; }
  const Eigen::VectorXd& mu() const { return mu_; }
  const MomentVector& isotropic() const { return u_iso_; }

  // <b f> for f given by its values at the nodes
  MomentVector moments_of_values(const Eigen::VectorXd& f) const { return B_.transpose() * w_.cwiseProduct(f); }

  template <class F>
  MomentVector moments_of(F&& f) const {
    Eigen::VectorXd v(mu_.size());
    for (Eigen::Index j = 0; j < mu_.size(); ++j) v[j] = f(mu_[j]);
    return moments_of_values(v);
  }

 private:
  MomentBasis basis_;
  AngularQuadrature quad_;
  Eigen::MatrixXd B_;
  Eigen::VectorXd w_, mu_;
  MomentVector u_iso_;
};

}  // namespace mnkit

#endif  // MNKIT_BASIS_HPP_
