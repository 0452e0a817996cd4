#ifndef MNKIT_REALIZABILITY_HPP_
#define MNKIT_REALIZABILITY_HPP_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mnkit/basis.hpp"
#include "mnkit/types.hpp"

namespace mnkit {

// {x : A x <= b}; on the u0 = 1 slice x = (u_1, ..., u_{n-1}).
struct HalfSpaces {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  int rows() const { return static_cast<int>(A.rows()); }
  int dim() const { return static_cast<int>(A.cols()); }
};

class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Index sets of the facets of the cyclic polytope with n vertices in dimension d
// (Gale's evenness condition), sorted lexicographically.
std::vector<std::vector<int>> gale_facets(int n, int d);

// Facets of conv{(mu, ..., mu^N)} over the given strictly increasing nodes,
// oriented with the centroid of the vertices and normalized to unit normals.
HalfSpaces cyclic_polytope(const std::vector<double>& nodes, int order);

std::uint64_t facet_count_formula(int order, int n_vertices);

// Half-space form of the mixed-moment slice from the [0,1] and [-1,0] monomial slices.
// Slice coordinates are (u+^1, u-^1, u+^2, u-^2, ...).
HalfSpaces compose_mixed_halfspaces(const HalfSpaces& pos, const HalfSpaces& neg);

enum class Membership { interior, boundary, exterior };

class RealizablePolytope {
 public:
  RealizablePolytope(const MomentBasis& basis, const AngularQuadrature& quad);

  const MomentBasis& basis() const { return basis_; }
  const HalfSpaces& facets() const { return facets_; }
  // Rows of the u0 <= 1 cone section: row 0 is (1, 0, ..., 0) <= 1, then (-b_i, a_i) . u <= 0.
  const Eigen::MatrixXd& lifted_matrix() const { return lifted_A_; }
  const Eigen::VectorXd& lifted_rhs() const { return lifted_b_; }
  // Distinct generator points b_1(mu_j) on the slice, one per row.
  const Eigen::MatrixXd& vertices() const { return vertices_; }

  // Smallest slack of u scaled to u0 = 1/2 against the lifted rows.
  double min_slack(const MomentVector& u) const;
  Membership classify(const MomentVector& u, double tol) const;

 private:
  MomentBasis basis_;
  HalfSpaces facets_;
  Eigen::MatrixXd lifted_A_;
  Eigen::VectorXd lifted_b_;
  Eigen::MatrixXd vertices_;
};

inline RealizablePolytope build_polytope(const MomentBasis& basis, const AngularQuadrature& quad) {
  return RealizablePolytope(basis, quad);
}

Membership membership(const RealizablePolytope& poly, const MomentVector& u, double tol);

// theta such that theta*mean + (1-theta)*u_q is interior; both are scaled so max(u0) = 1/2.
double limiter_theta(const MomentVector& mean, const MomentVector& u_q, const RealizablePolytope& poly, double eps);

struct LimitedCell {
  CellCoeffs coeffs;
  double theta = 0.0;
};

// phi(q, i) = value of spatial basis function i at spatial node q.
LimitedCell limit_cell(const CellCoeffs& coeffs, const RealizablePolytope& poly, const Eigen::MatrixXd& phi,
                       double eps);

// Exact realizability of monomial moments on [-1,1] via positive definite Hankel matrices.
bool hankel_realizable(const MomentVector& u);

void write_facets_csv(std::ostream& os, const HalfSpaces& h);

}  // namespace mnkit

#endif  // MNKIT_REALIZABILITY_HPP_
