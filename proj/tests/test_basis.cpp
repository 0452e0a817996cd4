#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "mnkit/basis.hpp"

using namespace mnkit;

TEST_CASE("basis evaluation") {
  MomentBasis m2(BasisFamily::monomial, 2);
  Eigen::VectorXd b = basis_eval(m2, 0.5);
  CHECK(b.size() == 3);
  CHECK(b[0] == 1.0);
  CHECK(b[1] == 0.5);
  CHECK(b[2] == 0.25);

  MomentBasis mm1(BasisFamily::mixed, 1);
  b = basis_eval(mm1, -0.3);
  CHECK(b.size() == 3);
  CHECK(b[0] == 1.0);
  CHECK(b[1] == 0.0);
  CHECK(b[2] == -0.3);

  MomentBasis mm2(BasisFamily::mixed, 2);
  b = basis_eval(mm2, 0.0);
  CHECK(b.size() == 5);
  CHECK(b[0] == 1.0);
  CHECK(b.tail(4).norm() == 0.0);
  b = basis_eval(mm2, 0.7);
  CHECK(b[1] == 0.7);
  CHECK(b[3] == doctest::Approx(0.49));
  CHECK(b[2] == 0.0);
  CHECK(b[4] == 0.0);

  MomentBasis leg(BasisFamily::legendre, 3);
  b = basis_eval(leg, 0.4);
  CHECK(b[2] == doctest::Approx(0.5 * (3 * 0.16 - 1)));
  CHECK(b[3] == doctest::Approx(0.5 * (5 * 0.064 - 3 * 0.4)));

  CHECK_THROWS_AS(basis_eval(m2, 1.0000001), std::invalid_argument);
  CHECK_THROWS_AS(MomentBasis(BasisFamily::monomial, 0), std::invalid_argument);
  CHECK(parse_basis_family("mixed") == BasisFamily::mixed);
  CHECK_THROWS_AS(parse_basis_family("spherical"), std::invalid_argument);
}

TEST_CASE("isotropic moments") {
  AngularQuadrature q = angular_quadrature(40);
  MomentVector u = isotropic_moments(MomentBasis(BasisFamily::monomial, 1), q);
  CHECK(u[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(u[1]) < 1e-15);
  u = isotropic_moments(MomentBasis(BasisFamily::monomial, 2), q);
  CHECK(u[2] == doctest::Approx(1.0 / 3).epsilon(1e-13));
  u = isotropic_moments(MomentBasis(BasisFamily::mixed, 1), q);
  CHECK(u[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(u[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(u[2] == doctest::Approx(-0.25).epsilon(1e-14));
}

TEST_CASE("moments of a density") {
  AngularQuadrature q = angular_quadrature(40);
  MomentBasis m1(BasisFamily::monomial, 1);
  MomentVector u = moments_of_density(m1, q, [](double) { return 0.5; });
  CHECK(u[0] == doctest::Approx(1.0));
  CHECK(std::abs(u[1]) < 1e-15);
  u = moments_of_density(m1, q, [](double m) { return std::exp(m); });
  const double e = std::numbers::e;
  CHECK(u[0] == doctest::Approx(e - 1 / e).epsilon(1e-10));
  CHECK(u[1] == doctest::Approx(2 / e).epsilon(1e-10));
  u = moments_of_density(m1, q, [](double) { return 0.0; });
  CHECK(u.norm() == 0.0);

  MomentModel model(MomentBasis(BasisFamily::monomial, 3), q);
  MomentVector v = model.moments_of([](double m) { return std::exp(m); });
  MomentVector w = moments_of_density(model.basis(), q, [](double m) { return std::exp(m); });
  CHECK((v - w).norm() < 1e-14);
  CHECK((model.isotropic() - isotropic_moments(model.basis(), q)).norm() < 1e-15);
}

TEST_CASE("mixed basis slots vanish on the other half") {
  MomentBasis mm(BasisFamily::mixed, 3);
  for (double mu : {-1.0, -0.4, 0.2, 1.0}) {
    Eigen::VectorXd b = mm.eval(mu);
    for (int p = 1; p <= 3; ++p) {
      if (mu > 0) CHECK(b[2 * p] == 0.0);
      if (mu < 0) CHECK(b[2 * p - 1] == 0.0);
    }
  }
}

TEST_CASE("Legendre basis is orthogonal under the angular rule") {
  const int nq = 40;
  AngularQuadrature q = angular_quadrature(nq);
  const int top = (nq - 4) / 2;
  MomentModel model(MomentBasis(BasisFamily::legendre, top), q);
  Eigen::MatrixXd G = model.B().transpose() * model.weights().asDiagonal() * model.B();
  for (int i = 0; i <= top; ++i)
    for (int j = 0; j <= top; ++j) {
      if (i == j)
        CHECK(G(i, i) == doctest::Approx(2.0 / (2 * i + 1)).epsilon(1e-12));
      else
        CHECK(std::abs(G(i, j)) < 1e-12);
    }
}
