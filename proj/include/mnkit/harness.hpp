#ifndef MNKIT_HARNESS_HPP_
#define MNKIT_HARNESS_HPP_

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mnkit/basis.hpp"
#include "mnkit/dg.hpp"
#include "mnkit/entropy.hpp"
#include "mnkit/problems.hpp"

namespace mnkit {

struct RunConfig {
  std::string problem = "manufactured";  // manufactured | plane_source | two_beams | limiter_test
  BasisFamily basis = BasisFamily::monomial;
  int order = 3;
  int nq = 40;
  int J = 80;
  std::optional<double> t_final;  // problem default when unset
  SolverSettings solver;
  DgSettings dg;
  // explicit overrides of the problem's physics
  std::optional<double> sigma_a, sigma_s;
  std::optional<BoundaryKind> boundary;
  ManufacturedParams manufactured;
  LimiterTestParams limiter_test;
  BenchmarkParams benchmark;
  int eval_cells = 0;  // limiter test: grid the errors are measured on (0 = own grid)
  std::string output_dir;

  void validate() const;
};

// Flat YAML mapping; unknown keys are rejected.
RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& cfg);

struct ErrorNorms {
  double l1 = 0.0, linf = 0.0;
};

// Errors of component `comp` against exact(x) on 100 Gauss-Lobatto points per cell of eval_mesh
// (the state's own mesh when null). eval_mesh cells must nest inside the state's cells.
ErrorNorms error_norms(const DgState& state, const Mesh& mesh, const std::function<double(double)>& exact,
                       int comp = 0, const Mesh* eval_mesh = nullptr);

// nu = log(E_c/E_f) / log(dx_c/dx_f); empty for nonpositive input.
std::optional<double> observed_order(double e_coarse, double e_fine, double dx_coarse, double dx_fine);

struct MassSample {
  double t, mass;
};

struct RunReport {
  RunConfig config;
  Mesh mesh;
  DgState state;
  double t_final = 0.0;
  int steps = 0;
  std::vector<MassSample> mass;
  double max_ledger_residual = 0.0;  // |mass change - predicted boundary/source balance|, per step
  Diagnostics diag;
  double theta_max = 0.0;
  double wall_seconds = 0.0;
  std::vector<ErrorNorms> errors;  // per measured component when an exact solution exists
};

RunReport run(const RunConfig& cfg);

struct ConvergenceRow {
  int J = 0;
  std::vector<ErrorNorms> errors;  // per component
  std::vector<std::optional<double>> nu1, nuinf;
  double theta_max = 0.0;
  std::size_t regularizations = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
};

ConvergenceReport convergence_study(const RunConfig& cfg, const std::vector<int>& cells);

void write_profile_csv(std::ostream& os, const RunReport& r);
void write_theta_csv(std::ostream& os, const RunReport& r);
void write_regularization_csv(std::ostream& os, const RunReport& r);
void write_summary_json(std::ostream& os, const RunReport& r);
void write_convergence_csv(std::ostream& os, const ConvergenceReport& c);

// profile.csv, theta.csv, regularization.csv, summary.json into dir
void write_run_outputs(const RunReport& r, const std::string& dir);

}  // namespace mnkit

#endif  // MNKIT_HARNESS_HPP_
