#ifndef MNKIT_ENTROPY_HPP_
#define MNKIT_ENTROPY_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mnkit/basis.hpp"
#include "mnkit/types.hpp"

namespace mnkit {

enum class Entropy { maxwell_boltzmann, quadratic };

Entropy parse_entropy(std::string_view name);
std::string to_string(Entropy e);

struct SolverSettings {
  double tau = 1e-9;  // stop when ||g||_2 < tau
  std::vector<double> r_schedule{0.0, 1e-8, 1e-6, 1e-4, 1e-3};
  int k_r = 50;  // Newton iterations per regularization level
  Entropy entropy = Entropy::maxwell_boltzmann;

  void validate() const;
};

struct SolveReport {
  Multipliers multipliers;
  double r_used = 0.0;
  int iterations = 0;
  MomentVector regularized_moments;
};

// Thrown when every regularization level fails; carries the last iterate.
class OptimizerFailure : public std::runtime_error {
 public:
  OptimizerFailure(const std::string& what, Multipliers last) : std::runtime_error(what), last_(std::move(last)) {}
  const Multipliers& last_iterate() const { return last_; }

 private:
  Multipliers last_;
};

class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double dual_objective(const Multipliers& alpha, const MomentVector& u, const MomentModel& model, Entropy entropy);
Eigen::VectorXd dual_gradient(const Multipliers& alpha, const MomentVector& u, const MomentModel& model,
                              Entropy entropy);
Eigen::MatrixXd dual_hessian(const Multipliers& alpha, const MomentModel& model, Entropy entropy);

// v(u, r) = (1 - r) u + r u_0 u_iso
MomentVector regularize(const MomentVector& u, double r, const MomentVector& u_iso);

// Multipliers of the isotropic density with zeroth moment u_0.
Multipliers isotropic_multipliers(double u0, int n_mom, Entropy entropy);

SolveReport solve_dual(const MomentVector& u, const Multipliers& alpha_init, const SolverSettings& settings,
                       const MomentModel& model);

// Ansatz values at the quadrature nodes.
Eigen::VectorXd ansatz_values(const Multipliers& alpha, const MomentModel& model, Entropy entropy);

MomentVector closure_flux(const Multipliers& alpha, const MomentModel& model, Entropy entropy);
inline MomentVector closure_flux(const SolveReport& r, const MomentModel& model, Entropy entropy) {
  return closure_flux(r.multipliers, model, entropy);
}

// r(u) = u_0 u_iso - u
MomentVector collision_moments(const MomentVector& u, const MomentModel& model);

// J H^{-1} with J = <mu b b^T eta''>, H = <b b^T eta''>.
Eigen::MatrixXd flux_jacobian(const Multipliers& alpha, const MomentModel& model, Entropy entropy);

// Eigenvectors of the flux Jacobian as columns of V (unit 2-norm columns).
struct CharacteristicDecomposition {
  Eigen::MatrixXd V, V_inv;
  Eigen::VectorXd eigenvalues;
  double condition = 0.0;  // 2-norm condition number of V
  bool ok = false;
};

CharacteristicDecomposition characteristic_decomposition(const Multipliers& alpha, const MomentModel& model,
                                                         Entropy entropy);

// Settings plus cached linear-closure factors, shared read-only by the DG scheme.
class Closure {
 public:
  Closure(const MomentModel& model, SolverSettings settings);

  const MomentModel& model() const { return *model_; }
  const SolverSettings& settings() const { return settings_; }
  Entropy entropy() const { return settings_.entropy; }

  // alpha_init may be empty, then the isotropic multipliers are used.
  SolveReport solve(const MomentVector& u, const Multipliers& alpha_init) const;
  MomentVector flux(const SolveReport& r) const;

 private:
  const MomentModel* model_;
  SolverSettings settings_;
  std::optional<Eigen::LLT<Eigen::MatrixXd>> linear_hessian_;
  Eigen::MatrixXd linear_flux_;  // J H^{-1} for the quadratic entropy
};

}  // namespace mnkit

#endif  // MNKIT_ENTROPY_HPP_
