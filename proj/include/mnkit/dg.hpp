#ifndef MNKIT_DG_HPP_
#define MNKIT_DG_HPP_

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "mnkit/entropy.hpp"
#include "mnkit/quadrature.hpp"
#include "mnkit/realizability.hpp"
#include "mnkit/types.hpp"

namespace mnkit {

struct Mesh {
  double x_left = 0.0, x_right = 1.0;
  int cells = 1;

  Mesh() = default;
  Mesh(double xl, double xr, int J);
  double dx() const { return (x_right - x_left) / cells; }
  double center(int j) const { return x_left + (j + 0.5) * dx(); }
};

enum class BoundaryKind { periodic, dirichlet };
BoundaryKind parse_boundary(std::string_view name);
std::string to_string(BoundaryKind b);

struct DgSettings {
  int k = 2;  // polynomial degree
  int Q = 4;  // spatial Gauss-Lobatto points
  double sigma_a = 0.0, sigma_s = 0.0;
  double lf_constant = 1.0;
  double tvb_M = 50.0;
  double kappa_jac = 1e5;
  double epsilon_limiter = 1e-14;
  bool slope_limiter = true;
  bool realizability_limiter = true;
  BoundaryKind boundary = BoundaryKind::dirichlet;

  void validate() const;
};

// Legendre polynomials on the reference cell: phi_i(y) = P_i(2y), y in [-1/2, 1/2].
double scaled_legendre(int i, double y);
double scaled_legendre_derivative(int i, double y);

struct SpatialTable {
  QuadratureRule rule;   // Q-point Gauss-Lobatto on [-1/2, 1/2], weights sum to 1
  Eigen::MatrixXd phi;   // Q x (k+1)
  Eigen::MatrixXd dphi;  // d/dy
  double w_end = 0.0;    // weight of the endpoints, enters the CFL condition
};

SpatialTable make_spatial_table(int k, int Q);

// f^(v, w) = (f(v) + f(w) - C (w - v)) / 2
MomentVector lax_friedrichs(const MomentVector& f_left, const MomentVector& f_right, const MomentVector& v,
                            const MomentVector& w, double C);

// Equality solution of dt/dx = w_Q (1 - sigma_t dt).
double cfl_dt(double dx, double sigma_t, double w_q);

double minmod(double a1, double a2, double a3);

// Coefficients of every cell, with the vector-space operations the Runge-Kutta stages need.
struct DgState {
  std::vector<CellCoeffs> cells;

  std::size_t size() const { return cells.size(); }
  DgState& operator+=(const DgState& o);
  DgState& operator*=(double s);
};
DgState operator+(DgState a, const DgState& b);
DgState operator*(double s, DgState a);

// L2 projection per cell with a 16-point Gauss-Legendre rule.
DgState project_initial(const std::function<MomentVector(double)>& f, const Mesh& mesh, int k, int n_mom);

// u_h at reference coordinate y of cell j
MomentVector evaluate_cell(const CellCoeffs& c, double y);

struct RegularizationEvent {
  double t, x, r;
};
struct ThetaEvent {
  double t, x, theta;
};

struct Diagnostics {
  std::vector<RegularizationEvent> regularizations;
  std::vector<ThetaEvent> thetas;
  std::size_t mean_checks = 0;
  std::size_t mean_violations = 0;
  double worst_mean_slack = 1.0;  // smallest slack seen in mean checks (u0 scaled to 1/2)
  std::size_t scalar_fallbacks = 0;
  std::size_t eigen_failures = 0;
  std::size_t solves = 0;
};

// Last converged multipliers per spatial point, reused as starting values.
struct WarmStart {
  std::vector<Multipliers> nodes;  // J * Q
  std::vector<Multipliers> means;  // J
  std::vector<Multipliers> ghosts;  // 2
};

struct BoundaryData {
  std::function<MomentVector(double t)> left, right;  // <b psi_L>, <b psi_R>
};
using SourceFn = std::function<MomentVector(double t, double x)>;  // <b S>

// Generic SSP(3,3) step; `after_euler` sees every forward-Euler substep before limiting.
template <class State, class Rhs, class Limit, class Hook>
State ssp33_step(const State& u, double t, double dt, Rhs&& rhs, Limit&& limit, Hook&& after_euler) {
  State e1 = u + dt * rhs(u, t);
  after_euler(e1, 0);
  State u1 = limit(e1, t + dt);
  State e2 = u1 + dt * rhs(u1, t + dt);
  after_euler(e2, 1);
  State u2 = limit(0.75 * u + 0.25 * e2, t + 0.5 * dt);
  State e3 = u2 + dt * rhs(u2, t + 0.5 * dt);
  after_euler(e3, 2);
  return limit((1.0 / 3.0) * u + (2.0 / 3.0) * e3, t + dt);
}

class DgScheme {
 public:
  // poly may be null, then the realizability limiter and mean checks are skipped.
  DgScheme(const Mesh& mesh, const DgSettings& settings, const Closure& closure, const RealizablePolytope* poly,
           BoundaryData bc, SourceFn source);

  const Mesh& mesh() const { return mesh_; }
  const DgSettings& settings() const { return settings_; }
  const SpatialTable& table() const { return table_; }
  const Closure& closure() const { return *closure_; }
  int moments() const { return closure_->model().size(); }

  WarmStart make_warm_start() const;

  // d/dt of the coefficients; mass_rate receives d/dt sum_j dx u_j,0.
  DgState rhs(const DgState& u, double t, WarmStart& warm, Diagnostics& diag, double* mass_rate = nullptr) const;
  DgState slope_limit(const DgState& u, double t, WarmStart& warm, Diagnostics& diag) const;
  DgState realizability_limit(const DgState& u, double t, Diagnostics& diag) const;
  // slope limiter, then realizability limiter, each if enabled
  DgState limit(const DgState& u, double t, WarmStart& warm, Diagnostics& diag) const;

  // Counts cell means that are not strictly interior.
  void check_means(const DgState& u, Diagnostics& diag) const;

  double stable_dt() const;
  double total_mass(const DgState& u) const;

  // One SSP(3,3) step; mass_change gets dt*(R1/6 + R2/6 + 2 R3/3) from the stage mass rates.
  DgState step(const DgState& u, double t, double dt, WarmStart& warm, Diagnostics& diag,
               double* mass_change = nullptr) const;

 private:
  MomentVector ghost(int side, double t) const;
  MomentVector neighbor_mean(const DgState& u, int j, int side, double t) const;

  Mesh mesh_;
  DgSettings settings_;
  const Closure* closure_;
  const RealizablePolytope* poly_;
  BoundaryData bc_;
  SourceFn source_;
  SpatialTable table_;
};

}  // namespace mnkit

#endif  // MNKIT_DG_HPP_
