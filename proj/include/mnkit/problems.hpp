#ifndef MNKIT_PROBLEMS_HPP_
#define MNKIT_PROBLEMS_HPP_

#include <functional>
#include <numbers>

#include "mnkit/basis.hpp"
#include "mnkit/dg.hpp"

namespace mnkit {

// phi = exp(alpha0 + alpha1 mu), alpha0 = -K - sin(x - t) + c0 t - c1, alpha1 = K + sin(x - t)
struct ManufacturedParams {
  double K = 55.0;
  double c0 = 4.0;
  double t_final = std::numbers::pi / 5.0;

  double c1() const;
  double alpha0(double t, double x) const;
  double alpha1(double t, double x) const;
};

double manufactured_density(const ManufacturedParams& p, double t, double x, double mu);
// S = d_t phi + mu d_x phi
double manufactured_source(const ManufacturedParams& p, double t, double x, double mu);
// <phi> in closed form
double manufactured_exact_u0(const ManufacturedParams& p, double t, double x);

struct LimiterTestParams {
  double gamma = 1e-10;
  double mu0 = 0.5403;  // replaced by the nearest quadrature node
};

// Angular node nearest to target.
double nearest_node(const AngularQuadrature& quad, double target);

// (1 - lambda) u0 + lambda u1 with lambda = (cos(pi x) + 1)/2, monomial moments.
MomentVector limiter_test_curve(const LimiterTestParams& p, const MomentModel& model, double x);

struct BenchmarkParams {
  double psi_floor = 0.5e-8;
  double beam_width = 50.0;
};

struct ProblemSetup {
  Mesh mesh;
  DgSettings dg;
  double t_final = 0.0;
  BoundaryData boundary;
  SourceFn source;
  DgState initial;
  std::function<double(double t, double x)> exact_u0;  // empty when unknown
};

// dg carries k, Q, limiter switches and constants; domain, cross sections and boundary are set here.
ProblemSetup manufactured_setup(int J, DgSettings dg, const MomentModel& model, const ManufacturedParams& p);
ProblemSetup plane_source_setup(int J, DgSettings dg, const MomentModel& model, const BenchmarkParams& p,
                                double t_final = 1.0);
ProblemSetup two_beams_setup(int J, DgSettings dg, const MomentModel& model, const BenchmarkParams& p,
                             double t_final = 0.8);

}  // namespace mnkit

#endif  // MNKIT_PROBLEMS_HPP_
