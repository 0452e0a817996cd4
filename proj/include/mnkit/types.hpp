#ifndef MNKIT_TYPES_HPP_
#define MNKIT_TYPES_HPP_

#include <Eigen/Dense>

namespace mnkit {

// Angular moments u = <b psi> of a kinetic density.
using MomentVector = Eigen::VectorXd;
// Lagrange multipliers of the entropy ansatz.
using Multipliers = Eigen::VectorXd;
// One DG cell: row i holds the coefficient vector of the i-th spatial basis function.
using CellCoeffs = Eigen::MatrixXd;

}  // namespace mnkit

#endif  // MNKIT_TYPES_HPP_
