#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "mnkit/realizability.hpp"
#include "oracles.hpp"

using namespace mnkit;

namespace {

Eigen::MatrixXd moment_curve(const std::vector<double>& nodes, int N) {
  Eigen::MatrixXd P(static_cast<Eigen::Index>(nodes.size()), N);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    double p = 1.0;
    for (int k = 0; k < N; ++k) P(static_cast<Eigen::Index>(i), k) = (p *= nodes[i]);
  }
  return P;
}

std::vector<double> gl_nodes(int n) {
  QuadratureRule r = gauss_lobatto(n, -1.0, 1.0);
  return r.nodes;
}

}  // namespace

TEST_CASE("facet count formula") {
  CHECK(facet_count_formula(2, 5) == 5);
  CHECK(facet_count_formula(3, 6) == 8);
  CHECK(facet_count_formula(4, 39) == 702);
  CHECK(facet_count_formula(4, 40) == 740);
  CHECK_THROWS_AS(facet_count_formula(4, 4), std::invalid_argument);
  // grows like n^{N/2} for even N
  for (int N : {2, 4, 6}) {
    const double s1 = std::log(double(facet_count_formula(N, 40)) / facet_count_formula(N, 20)) / std::log(2.0);
    const double s2 = std::log(double(facet_count_formula(N, 80)) / facet_count_formula(N, 40)) / std::log(2.0);
    CHECK(std::abs(s2 - N / 2.0) < 0.2 * N / 2.0);
    CHECK(std::abs(s2 - N / 2.0) <= std::abs(s1 - N / 2.0) + 1e-12);
  }
}

TEST_CASE("Gale evenness matches the brute-force hull") {
  std::mt19937_64 rng(1);
  for (int N : {2, 3, 4}) {
    for (int n = N + 2; n <= 12; ++n) {
      std::vector<double> nodes = gl_nodes(n);
      HalfSpaces h = cyclic_polytope(nodes, N);
      Eigen::MatrixXd P = moment_curve(nodes, N);
      oracle::Hull hull = oracle::brute_force_hull(P);
      CHECK(h.rows() == hull.A.rows());
      CHECK(static_cast<std::uint64_t>(h.rows()) == facet_count_formula(N, n));
      // every facet supports the hull: all vertices feasible, at least N tight
      for (int i = 0; i < h.rows(); ++i) {
        int tight = 0;
        for (int v = 0; v < P.rows(); ++v) {
          const double s = h.b[i] - h.A.row(i).dot(P.row(v));
          CHECK(s > -1e-10);
          tight += std::abs(s) <= 1e-10;
        }
        CHECK(tight >= N);
      }
      if (N <= 3) {
        std::uniform_real_distribution<double> box(-1.05, 1.05);
        int checked = 0;
        for (int t = 0; t < 10000; ++t) {
          Eigen::VectorXd x(N);
          for (int k = 0; k < N; ++k) x[k] = box(rng);
          const double a = oracle::min_slack(h.A, h.b, x), b = oracle::min_slack(hull.A, hull.b, x);
          if (std::abs(b) < 1e-9) continue;
          CHECK((a > 0) == (b > 0));
          ++checked;
        }
        CHECK(checked > 9000);
      }
    }
  }
}

TEST_CASE("monomial polytope from the angular rule") {
  SUBCASE("N = 1 is an interval") {
    RealizablePolytope p(MomentBasis(BasisFamily::monomial, 1), angular_quadrature(10));
    REQUIRE(p.facets().rows() == 2);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(p.facets().A(i, 0)) == 1.0);
    CHECK(p.facets().b.cwiseAbs().minCoeff() == doctest::Approx(1.0));
  }
  SUBCASE("N = 4, n_q = 40 deduplicates mu = 0") {
    RealizablePolytope p(MomentBasis(BasisFamily::monomial, 4), angular_quadrature(40));
    CHECK(p.vertices().rows() == 39);
    CHECK(p.facets().rows() == 702);
    for (int i = 0; i < p.facets().rows(); ++i) {
      const Eigen::VectorXd s = p.facets().b[i] - (p.vertices() * p.facets().A.row(i).transpose()).array();
      CHECK(s.minCoeff() > -1e-10);
      CHECK((s.array().abs() <= 1e-10).count() >= 4);
    }
  }
}

TEST_CASE("mixed composition") {
  SUBCASE("MM1 from nodes {-1,0,0,1} is the triangle (0,0),(1,0),(0,-1)") {
    RealizablePolytope p(MomentBasis(BasisFamily::mixed, 1), angular_quadrature(4));
    Eigen::MatrixXd tri(3, 2);
    tri << 0, 0, 1, 0, 0, -1;
    oracle::Hull hull = oracle::brute_force_hull(tri);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> box(-1.2, 1.2);
    for (int t = 0; t < 10000; ++t) {
      Eigen::Vector2d x(box(rng), box(rng));
      const double b = oracle::min_slack(hull.A, hull.b, x);
      if (std::abs(b) < 1e-9) continue;
      CHECK((oracle::min_slack(p.facets().A, p.facets().b, x) > 0) == (b > 0));
    }
  }
  SUBCASE("MM2 from n_q = 12 agrees with the hull of the mixed vertices") {
    AngularQuadrature q = angular_quadrature(12);
    MomentBasis mb(BasisFamily::mixed, 2);
    RealizablePolytope p(mb, q);
    oracle::Hull hull = oracle::brute_force_hull(p.vertices());
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0), box(-1.1, 1.1);
    // convex combinations are feasible
    for (int t = 0; t < 1000; ++t) {
      Eigen::VectorXd w(p.vertices().rows());
      for (int i = 0; i < w.size(); ++i) w[i] = -std::log(U(rng) + 1e-300);
      w /= w.sum();
      Eigen::VectorXd x = p.vertices().transpose() * w;
      CHECK(oracle::min_slack(p.facets().A, p.facets().b, x) > -1e-12);
    }
    int exterior = 0;
    for (int t = 0; t < 10000; ++t) {
      Eigen::VectorXd x(4);
      for (int k = 0; k < 4; ++k) x[k] = box(rng);
      const double b = oracle::min_slack(hull.A, hull.b, x);
      if (std::abs(b) < 1e-9) continue;
      CHECK((oracle::min_slack(p.facets().A, p.facets().b, x) > 0) == (b > 0));
      exterior += b < 0;
    }
    CHECK(exterior > 0);
  }
  SUBCASE("negative right-hand sides are rejected") {
    HalfSpaces h;
    h.A = Eigen::MatrixXd::Identity(1, 1);
    h.b = Eigen::VectorXd::Constant(1, -0.5);
    CHECK_THROWS_AS(compose_mixed_halfspaces(h, h), ConstructionError);
  }
}

TEST_CASE("mixed representation needs fewer rows than full moments of twice the order") {
  for (int nq : {20, 40}) {
    AngularQuadrature q = angular_quadrature(nq);
    for (int N : {1, 2, 3}) {
      RealizablePolytope mixed(MomentBasis(BasisFamily::mixed, N), q);
      RealizablePolytope full(MomentBasis(BasisFamily::monomial, 2 * N), q);
      CHECK(mixed.facets().rows() < full.facets().rows());
    }
  }
  // for full order 4 the leading coefficients differ by a factor 1/2
  AngularQuadrature q = angular_quadrature(80);
  const double ratio = double(RealizablePolytope(MomentBasis(BasisFamily::mixed, 2), q).facets().rows()) /
                       RealizablePolytope(MomentBasis(BasisFamily::monomial, 4), q).facets().rows();
  CHECK(ratio == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("Legendre polytope is the monomial one in different coordinates") {
  AngularQuadrature q = angular_quadrature(20);
  RealizablePolytope lp(MomentBasis(BasisFamily::legendre, 3), q);
  MomentModel mm(MomentBasis(BasisFamily::monomial, 3), q), ml(MomentBasis(BasisFamily::legendre, 3), q);
  RealizablePolytope mp(mm.basis(), q);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    Eigen::VectorXd f(q.size());
    for (int j = 0; j < f.size(); ++j) f[j] = U(rng) + 0.4;  // sometimes negative
    MomentVector um = mm.moments_of_values(f), ul = ml.moments_of_values(f);
    if (um[0] <= 0) continue;
    const double a = mp.min_slack(um);
    if (std::abs(a) < 1e-9) continue;
    CHECK((lp.min_slack(ul) > 0) == (a > 0));
  }
}

TEST_CASE("membership") {
  AngularQuadrature q = angular_quadrature(40);
  MomentModel m(MomentBasis(BasisFamily::monomial, 4), q);
  RealizablePolytope p(m.basis(), q);
  CHECK(membership(p, 0.5 * m.isotropic(), 0.0) == Membership::interior);
  CHECK(membership(p, 7.0 * m.isotropic(), 0.0) == Membership::interior);
  CHECK(membership(p, m.basis().eval(m.mu()[25]), 1e-12) == Membership::boundary);
  RealizablePolytope p1(MomentBasis(BasisFamily::monomial, 1), q);
  MomentVector u(2);
  u << 1, 1.5;
  CHECK(membership(p1, u, 1e-12) == Membership::exterior);
  u << -1, 0;
  CHECK(membership(p1, u, 1e-12) == Membership::exterior);
}

TEST_CASE("polytope interior moments are Hankel realizable") {
  std::mt19937_64 rng(9);
  AngularQuadrature q = angular_quadrature(40);
  for (int N : {2, 3, 4}) {
    MomentModel m(MomentBasis(BasisFamily::monomial, N), q);
    RealizablePolytope p(m.basis(), q);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 300; ++t) {
      Eigen::VectorXd w(q.size());
      for (int j = 0; j < w.size(); ++j) w[j] = std::pow(U(rng), 4.0);
      MomentVector u = m.B().transpose() * w;
      if (p.classify(u, 1e-12) == Membership::interior) CHECK(hankel_realizable(u));
    }
  }
}

TEST_CASE("Hankel oracle examples") {
  Eigen::Vector3d u(1, 0, 1.0 / 3);
  CHECK(hankel_realizable(u));
  u << 1, 1, 1;
  CHECK_FALSE(hankel_realizable(u));
  u << 1, 0, 1.01;
  CHECK_FALSE(hankel_realizable(u));
  Eigen::Vector4d v(1, 0, 1.0 / 3, 0);
  CHECK(hankel_realizable(v));
  v << 1, 0.999, 0.99, 0.5;
  CHECK_FALSE(hankel_realizable(v));
}

TEST_CASE("limiter theta") {
  AngularQuadrature q = angular_quadrature(40);
  RealizablePolytope p1(MomentBasis(BasisFamily::monomial, 1), q);
  Eigen::Vector2d mean(1, 0.8), left(0.3, 1.2), right(1.3, 1.6);
  const double tl = limiter_theta(mean, left, p1, 0.0), tr = limiter_theta(mean, right, p1, 0.0);
  CHECK(tl == doctest::Approx(9.0 / 11).epsilon(1e-14));
  CHECK(tr == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(limiter_theta(mean, mean, p1, 0.0) == 0.0);
  Eigen::Vector2d inside(1.0, 0.1);
  CHECK(limiter_theta(mean, inside, p1, 1e-14) == 0.0);

  // crossing a facet along a known segment: u1 <= u0 hit at theta = 1/3
  Eigen::Vector2d m2(1, 0), out(1, 1.5);
  CHECK(limiter_theta(m2, out, p1, 0.0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(limiter_theta(m2, out, p1, 1e-14) == doctest::Approx(1.0 / 3 + 1e-14).epsilon(1e-15));

  // the limited point is interior for random segments
  MomentModel m(MomentBasis(BasisFamily::monomial, 3), q);
  RealizablePolytope p3(m.basis(), q);
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> U(-1.0, 1.0), P(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    Eigen::VectorXd w(q.size());
    for (int j = 0; j < w.size(); ++j) w[j] = P(rng);
    MomentVector ub = m.B().transpose() * w;
    MomentVector uq = ub;
    for (int k = 1; k < uq.size(); ++k) uq[k] += U(rng) * ub[0];
    uq[0] *= 0.5 + P(rng);
    const double th = limiter_theta(ub, uq, p3, 1e-14);
    CHECK(th >= 0.0);
    CHECK(th <= 1.0);
    const MomentVector lim = th * ub + (1 - th) * uq;
    CHECK(p3.classify(lim, 0.0) == Membership::interior);
    if (p3.min_slack(uq) > 1e-12) CHECK(th == 0.0);
  }
}

TEST_CASE("limit_cell") {
  AngularQuadrature q = angular_quadrature(40);
  RealizablePolytope p1(MomentBasis(BasisFamily::monomial, 1), q);
  // quadratic with mean (1, 0.8) and end values (0.3, 1.2), (1.3, 1.6) on Q = 3 Lobatto points
  Eigen::MatrixXd phi(3, 3);
  phi << 1, -1, 1, 1, 0, -0.5, 1, 1, 1;
  CellCoeffs c(3, 2);
  // a + b y + c P2(2y): ends a - b + c and a + b + c, mean a
  c << 1.0, 0.8, 0.5, 0.2, -0.2, 0.6;
  REQUIRE((phi * c).row(0).isApprox(Eigen::RowVector2d(0.3, 1.2)));
  REQUIRE((phi * c).row(2).isApprox(Eigen::RowVector2d(1.3, 1.6)));
  LimitedCell lc = limit_cell(c, p1, phi, 0.0);
  CHECK(lc.theta == doctest::Approx(9.0 / 11).epsilon(1e-14));
  CHECK(lc.coeffs.row(0) == c.row(0));
  CHECK(lc.coeffs.bottomRows(2).isApprox(c.bottomRows(2) * (2.0 / 11), 1e-14));

  CellCoeffs flat = CellCoeffs::Zero(3, 2);
  flat.row(0) << 1.0, 0.5;
  CHECK(limit_cell(flat, p1, phi, 1e-14).coeffs == flat);
  CHECK(limit_cell(flat, p1, phi, 1e-14).theta == 0.0);
  CellCoeffs gentle = flat;
  gentle.row(1) << 0.0, 0.1;
  CHECK(limit_cell(gentle, p1, phi, 1e-14).coeffs == gentle);

  CellCoeffs bad = flat;
  bad(0, 1) = 1.5;
  CHECK_THROWS(limit_cell(bad, p1, phi, 0.0));
}

TEST_CASE("facet CSV") {
  RealizablePolytope p(MomentBasis(BasisFamily::monomial, 2), angular_quadrature(10));
  std::ostringstream os;
  write_facets_csv(os, p.facets());
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "a_0,a_1,b");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == p.facets().rows());
}
