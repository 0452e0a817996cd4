#include "mnkit/entropy.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace mnkit {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 40;

// eta*' and eta*'' at z = B alpha
Eigen::VectorXd eta_prime(const Eigen::VectorXd& z, Entropy e) {
  return e == Entropy::maxwell_boltzmann ? Eigen::VectorXd(z.array().exp()) : z;
}

Eigen::VectorXd eta_second(const Eigen::VectorXd& z, Entropy e) {
  return e == Entropy::maxwell_boltzmann ? Eigen::VectorXd(z.array().exp())
                                         : Eigen::VectorXd::Ones(z.size());
}

void check_sizes(const Multipliers& alpha, const MomentModel& model) {
  if (alpha.size() != model.size()) throw std::invalid_argument("multiplier length does not match the basis");
}

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

Entropy parse_entropy(std::string_view name) {
  if (name == "maxwell_boltzmann" || name == "mb") return Entropy::maxwell_boltzmann;
  if (name == "quadratic") return Entropy::quadratic;
  throw std::invalid_argument("unknown entropy '" + std::string(name) + "'");
}

std::string to_string(Entropy e) { return e == Entropy::maxwell_boltzmann ? "maxwell_boltzmann" : "quadratic"; }

void SolverSettings::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (k_r < 1) throw std::invalid_argument("k_r must be >= 1");
  if (r_schedule.empty() || r_schedule.front() != 0.0)
    throw std::invalid_argument("r_schedule must start at 0");
  for (std::size_t i = 1; i < r_schedule.size(); ++i)
    if (!(r_schedule[i] > r_schedule[i - 1])) throw std::invalid_argument("r_schedule must be strictly increasing");
  if (r_schedule.back() > 1.0) throw std::invalid_argument("r_schedule entries must be <= 1");
}

double dual_objective(const Multipliers& alpha, const MomentVector& u, const MomentModel& model, Entropy entropy) {
  check_sizes(alpha, model);
  const Eigen::VectorXd z = model.B() * alpha;
  double s;
  if (entropy == Entropy::maxwell_boltzmann)
    s = model.weights().dot(z.array().exp().matrix());
  else
    s = 0.5 * model.weights().dot(z.cwiseAbs2());
  return s - u.dot(alpha);
}

Eigen::VectorXd dual_gradient(const Multipliers& alpha, const MomentVector& u, const MomentModel& model,
                              Entropy entropy) {
  check_sizes(alpha, model);
  const Eigen::VectorXd z = model.B() * alpha;
  return model.B().transpose() * model.weights().cwiseProduct(eta_prime(z, entropy)) - u;
}

Eigen::MatrixXd dual_hessian(const Multipliers& alpha, const MomentModel& model, Entropy entropy) {
  check_sizes(alpha, model);
  const Eigen::VectorXd z = model.B() * alpha;
  const Eigen::VectorXd d = model.weights().cwiseProduct(eta_second(z, entropy));
  return model.B().transpose() * d.asDiagonal() * model.B();
}

MomentVector regularize(const MomentVector& u, double r, const MomentVector& u_iso) {
  if (r < 0.0 || r > 1.0) throw std::invalid_argument("regularization parameter must lie in [0, 1]");
  if (r == 0.0) return u;
  MomentVector v = (1.0 - r) * u + (r * u[0]) * u_iso;
  v[0] = u[0];
  return v;
}

Multipliers isotropic_multipliers(double u0, int n_mom, Entropy entropy) {
  if (!(u0 > 0.0)) throw std::invalid_argument("isotropic multipliers need u0 > 0");
  Multipliers a = Multipliers::Zero(n_mom);
  a[0] = entropy == Entropy::maxwell_boltzmann ? std::log(0.5 * u0) : 0.5 * u0;
  return a;
}

namespace {

// Newton for one regularization level. Returns true on ||g|| < tau.
bool newton_level(const MomentVector& v, Multipliers& alpha, const SolverSettings& s, const MomentModel& model,
                  int& iterations) {
  const Eigen::MatrixXd& B = model.B();
  const Eigen::VectorXd& w = model.weights();
  Eigen::VectorXd z = B * alpha;
  Eigen::VectorXd wpsi = w.cwiseProduct(z.array().exp().matrix());
  for (int it = 0;; ++it) {
    Eigen::VectorXd g = B.transpose() * wpsi - v;
    if (!all_finite(g)) return false;
    if (g.norm() < s.tau) {
      iterations = it;
      return true;
    }
    if (it == s.k_r) return false;
    Eigen::MatrixXd H = B.transpose() * wpsi.asDiagonal() * B;
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) return false;
    Eigen::VectorXd p = -llt.solve(g);
    if (!all_finite(p)) return false;
    const double slope = g.dot(p);
    if (!(slope < 0.0)) return false;
    const Eigen::VectorXd Bp = B * p;
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
      // f(alpha + t p) - f(alpha) = sum w psi (e^{tBp} - 1 - tBp) + t g.p; near the optimum the
      // direct difference of objective values is lost in rounding long before ||g|| reaches tau
      double df = t * slope;
      for (Eigen::Index j = 0; j < Bp.size(); ++j) {
        const double x = t * Bp[j];
        df += wpsi[j] * (std::abs(x) < 1e-3 ? x * x * (0.5 + x * (1.0 / 6 + x * (1.0 / 24 + x / 120)))
                                            : std::expm1(x) - x);
      }
      if (std::isfinite(df) && df <= kArmijo * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return false;
    alpha += t * p;
    z = B * alpha;
    wpsi = w.cwiseProduct(z.array().exp().matrix());
  }
}

}  // namespace

SolveReport solve_dual(const MomentVector& u, const Multipliers& alpha_init, const SolverSettings& settings,
                       const MomentModel& model) {
  if (u.size() != model.size()) throw std::invalid_argument("moment vector length does not match the basis");
  if (!(u[0] > 0.0)) throw std::invalid_argument("solve_dual needs u0 > 0");
  if (!u.allFinite()) throw std::invalid_argument("solve_dual: nonfinite moments");
  Multipliers init = alpha_init.size() == model.size() && alpha_init.allFinite()
                         ? alpha_init
                         : isotropic_multipliers(u[0], model.size(), settings.entropy);
  SolveReport rep;
  if (settings.entropy == Entropy::quadratic) {
    Eigen::LLT<Eigen::MatrixXd> llt(dual_hessian(init, model, settings.entropy));
    if (llt.info() != Eigen::Success) throw ConditioningError("quadratic closure: singular moment Gram matrix");
    rep.multipliers = llt.solve(u);
    rep.regularized_moments = u;
    return rep;
  }
  // a stale warm start can be far from the answer, so each level falls back to the isotropic start
  const Multipliers iso = isotropic_multipliers(u[0], model.size(), settings.entropy);
  const bool warm = init != iso;
  Multipliers last = init;
  for (double r : settings.r_schedule) {
    MomentVector v = regularize(u, r, model.isotropic());
    for (int attempt = 0; attempt < (warm ? 2 : 1); ++attempt) {
      Multipliers alpha = attempt == 0 ? init : iso;
      int iters = 0;
      if (newton_level(v, alpha, settings, model, iters)) {
        rep.multipliers = alpha;
        rep.r_used = r;
        rep.iterations = iters;
        rep.regularized_moments = v;
        return rep;
      }
      last = alpha;
    }
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "entropy optimizer failed at every regularization level for u = (" << u.transpose() << ")";
  throw OptimizerFailure(msg.str(), last);
}

Eigen::VectorXd ansatz_values(const Multipliers& alpha, const MomentModel& model, Entropy entropy) {
  check_sizes(alpha, model);
  return eta_prime(model.B() * alpha, entropy);
}

MomentVector closure_flux(const Multipliers& alpha, const MomentModel& model, Entropy entropy) {
  const Eigen::VectorXd psi = ansatz_values(alpha, model, entropy);
  return model.B().transpose() * (model.weights().cwiseProduct(model.mu()).cwiseProduct(psi));
}

MomentVector collision_moments(const MomentVector& u, const MomentModel& model) {
  return u[0] * model.isotropic() - u;
}

Eigen::MatrixXd flux_jacobian(const Multipliers& alpha, const MomentModel& model, Entropy entropy) {
  check_sizes(alpha, model);
  const Eigen::VectorXd d = model.weights().cwiseProduct(eta_second(model.B() * alpha, entropy));
  const Eigen::MatrixXd H = model.B().transpose() * d.asDiagonal() * model.B();
  const Eigen::MatrixXd J = model.B().transpose() * d.cwiseProduct(model.mu()).asDiagonal() * model.B();
  Eigen::LLT<Eigen::MatrixXd> llt(H);
  if (llt.info() != Eigen::Success) throw ConditioningError("flux_jacobian: Hessian is not positive definite");
  // J H^{-1} = (H^{-1} J)^T by symmetry
  return llt.solve(J).transpose();
}

CharacteristicDecomposition characteristic_decomposition(const Multipliers& alpha, const MomentModel& model,
                                                         Entropy entropy) {
  CharacteristicDecomposition out;
  const Eigen::VectorXd d = model.weights().cwiseProduct(eta_second(model.B() * alpha, entropy));
  const Eigen::MatrixXd H = model.B().transpose() * d.asDiagonal() * model.B();
  const Eigen::MatrixXd J = model.B().transpose() * d.cwiseProduct(model.mu()).asDiagonal() * model.B();
  if (!H.allFinite() || !J.allFinite()) return out;
  // J D = H D diag(lambda) with D^T H D = I, so V = H D diagonalizes J H^{-1} and V^{-1} = D^T.
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(J, H);
  if (es.info() != Eigen::Success) return out;
  const Eigen::MatrixXd& D = es.eigenvectors();
  Eigen::MatrixXd V = H * D;
  Eigen::VectorXd s = V.colwise().norm().transpose();
  if (!(s.minCoeff() > 0.0) || !s.allFinite()) return out;
  out.V = V * s.cwiseInverse().asDiagonal();
  out.V_inv = s.asDiagonal() * D.transpose();
  out.eigenvalues = es.eigenvalues();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.V);
  const auto& sv = svd.singularValues();
  out.condition = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
  out.ok = out.V.allFinite() && out.V_inv.allFinite();
  return out;
}

Closure::Closure(const MomentModel& model, SolverSettings settings) : model_(&model), settings_(std::move(settings)) {
  settings_.validate();
  if (settings_.entropy == Entropy::quadratic) {
    const Eigen::MatrixXd H = dual_hessian(Multipliers::Zero(model.size()), model, Entropy::quadratic);
    linear_hessian_.emplace(H);
    if (linear_hessian_->info() != Eigen::Success)
      throw ConditioningError("quadratic closure: moment Gram matrix is singular (too few angular nodes?)");
    const Eigen::MatrixXd J = model.B().transpose() * model.weights().cwiseProduct(model.mu()).asDiagonal() * model.B();
    linear_flux_ = linear_hessian_->solve(J).transpose();
  }
}

SolveReport Closure::solve(const MomentVector& u, const Multipliers& alpha_init) const {
  if (linear_hessian_) {
    SolveReport rep;
    rep.multipliers = linear_hessian_->solve(u);
    rep.regularized_moments = u;
    return rep;
  }
  return solve_dual(u, alpha_init, settings_, *model_);
}

MomentVector Closure::flux(const SolveReport& r) const {
  if (linear_hessian_) return linear_flux_ * r.regularized_moments;
  return closure_flux(r.multipliers, *model_, settings_.entropy);
}

}  // namespace mnkit
