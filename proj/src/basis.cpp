#include "mnkit/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace mnkit {

BasisFamily parse_basis_family(std::string_view name) {
  if (name == "monomial") return BasisFamily::monomial;
  if (name == "mixed") return BasisFamily::mixed;
  if (name == "legendre") return BasisFamily::legendre;
  throw std::invalid_argument("unknown basis family '" + std::string(name) + "'");
}

std::string to_string(BasisFamily f) {
  switch (f) {
    case BasisFamily::monomial: return "monomial";
    case BasisFamily::mixed: return "mixed";
    case BasisFamily::legendre: return "legendre";
  }
  return "?";
}

MomentBasis::MomentBasis(BasisFamily family, int order) : family_(family), order_(order) {
  if (order < 1) throw std::invalid_argument("moment basis order must be >= 1");
}

void MomentBasis::eval_into(double mu, double* out) const {
  if (!(std::abs(mu) <= 1.0)) throw std::invalid_argument("basis_eval: |mu| > 1");
  out[0] = 1.0;
  switch (family_) {
    case BasisFamily::monomial:
      for (int i = 1; i <= order_; ++i) out[i] = out[i - 1] * mu;
      break;
    case BasisFamily::mixed: {
      const double mp = mu > 0.0 ? mu : 0.0;
      const double mm = mu < 0.0 ? mu : 0.0;
      double pp = 1.0, pm = 1.0;
      for (int i = 1; i <= order_; ++i) {
        pp *= mp;
        pm *= mm;
        out[2 * i - 1] = pp;
        out[2 * i] = pm;
      }
      break;
    }
    case BasisFamily::legendre:
      if (order_ >= 1) out[1] = mu;
      for (int i = 2; i <= order_; ++i)
        out[i] = ((2.0 * i - 1.0) * mu * out[i - 1] - (i - 1.0) * out[i - 2]) / i;
      break;
  }
}

Eigen::VectorXd MomentBasis::eval(double mu) const {
  Eigen::VectorXd b(size());
  eval_into(mu, b.data());
  return b;
}

Eigen::VectorXd basis_eval(const MomentBasis& basis, double mu) { return basis.eval(mu); }

MomentVector isotropic_moments(const MomentBasis& basis, const AngularQuadrature& quad) {
  return moments_of_density(basis, quad, [](double) { return 0.5; });
}

MomentModel::MomentModel(MomentBasis basis, AngularQuadrature quad)
    : basis_(basis), quad_(std::move(quad)) {
  const int nq = static_cast<int>(quad_.size());
  B_.resize(nq, basis_.size());
  w_.resize(nq);
  mu_.resize(nq);
  Eigen::VectorXd b(basis_.size());
  for (int j = 0; j < nq; ++j) {
    mu_[j] = quad_.rule.nodes[j];
    w_[j] = quad_.rule.weights[j];
    basis_.eval_into(mu_[j], b.data());
    B_.row(j) = b.transpose();
  }
  u_iso_ = 0.5 * B_.transpose() * w_;
}

}  // namespace mnkit
