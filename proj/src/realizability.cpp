#include "mnkit/realizability.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mnkit {

namespace {

constexpr double kDedupTol = 1e-14;
constexpr double kZeroRhs = 1e-13;
// A cell mean further than this outside (after scaling to u0 = 1/2) is a hard error.
constexpr double kMeanTol = 1e-12;

// Members form adjacent pairs, except that a lone member may sit at either end.
void gale_rec(int i, int n, int left, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (left == 0) {
    out.push_back(cur);
    return;
  }
  if (i >= n) return;
  if (i == 0 || i == n - 1) {
    cur.push_back(i);
    gale_rec(i + 1, n, left - 1, cur, out);
    cur.pop_back();
  }
  if (left >= 2 && i + 1 < n) {
    cur.push_back(i);
    cur.push_back(i + 1);
    gale_rec(i + 2, n, left - 2, cur, out);
    cur.pop_back();
    cur.pop_back();
  }
  gale_rec(i + 1, n, left, cur, out);
}

std::vector<double> distinct_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > kDedupTol) out.push_back(x);
  return out;
}

// coefficients c_0..c_d of prod (mu - r_k)
Eigen::VectorXd poly_from_roots(const std::vector<double>& roots) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(roots.size() + 1);
  c[0] = 1.0;
  int deg = 0;
  for (double r : roots) {
    for (int p = deg + 1; p >= 1; --p) c[p] = c[p - 1] - r * c[p];
    c[0] = -r * c[0];
    ++deg;
  }
  return c;
}

HalfSpaces lift_free_normalize(HalfSpaces h) {
  for (int i = 0; i < h.rows(); ++i) {
    double s = h.A.row(i).norm();
    if (!(s > 0.0)) throw ConstructionError("degenerate facet normal");
    h.A.row(i) /= s;
    h.b[i] /= s;
  }
  return h;
}

// Legendre coefficients: P_i(mu) = sum_p L(i,p) mu^p
Eigen::MatrixXd legendre_to_monomial(int order) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(order + 1, order + 1);
  L(0, 0) = 1.0;
  if (order >= 1) L(1, 1) = 1.0;
  for (int i = 2; i <= order; ++i) {
    for (int p = 0; p <= order; ++p) {
      double v = -(i - 1.0) * L(i - 2, p);
      if (p >= 1) v += (2.0 * i - 1.0) * L(i - 1, p - 1);
      L(i, p) = v / i;
    }
  }
  return L;
}

}  // namespace

std::vector<std::vector<int>> gale_facets(int n, int d) {
  if (d < 1 || n < d + 1) throw std::invalid_argument("gale_facets: need n > d >= 1");
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  gale_rec(0, n, d, cur, out);
  std::sort(out.begin(), out.end());
  return out;
}

HalfSpaces cyclic_polytope(const std::vector<double>& nodes, int order) {
  const int n = static_cast<int>(nodes.size());
  if (order < 1) throw std::invalid_argument("cyclic_polytope: order must be >= 1");
  if (n < order + 1)
    throw ConstructionError("cyclic_polytope: need more than " + std::to_string(order) + " distinct nodes");
  for (int i = 1; i < n; ++i)
    if (!(nodes[i] > nodes[i - 1])) throw ConstructionError("cyclic_polytope: nodes must be strictly increasing");
  // interior witness: centroid of the vertices
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(order);
  for (double mu : nodes) {
    double p = 1.0;
    for (int k = 0; k < order; ++k) {
      p *= mu;
      centroid[k] += p / n;
    }
  }
  const auto sets = gale_facets(n, order);
  HalfSpaces h;
  h.A.resize(static_cast<Eigen::Index>(sets.size()), order);
  h.b.resize(static_cast<Eigen::Index>(sets.size()));
  for (std::size_t f = 0; f < sets.size(); ++f) {
    std::vector<double> roots;
    for (int k : sets[f]) roots.push_back(nodes[k]);
    // q(mu) = c_0 + a . (mu, ..., mu^N) vanishes exactly on the facet vertices
    Eigen::VectorXd c = poly_from_roots(roots);
    Eigen::VectorXd a = c.tail(order);
    double b = -c[0];
    if (a.dot(centroid) > b) {
      a = -a;
      b = -b;
    }
    h.A.row(static_cast<Eigen::Index>(f)) = a.transpose();
    h.b[static_cast<Eigen::Index>(f)] = b;
  }
  return lift_free_normalize(std::move(h));
}

std::uint64_t facet_count_formula(int order, int n_vertices) {
  if (order < 1 || n_vertices <= order)
    throw std::invalid_argument("facet_count_formula: need n > N >= 1");
  auto binom = [](std::int64_t n, std::int64_t k) -> std::uint64_t {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::int64_t i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
  };
  const int N = order, n = n_vertices;
  return binom(n - (N + 1) / 2, n - N) + binom(n - (N + 2) / 2, n - N);
}

HalfSpaces compose_mixed_halfspaces(const HalfSpaces& pos, const HalfSpaces& neg) {
  if (pos.dim() != neg.dim()) throw std::invalid_argument("compose_mixed_halfspaces: order mismatch");
  const int N = pos.dim();
  auto clean = [](const HalfSpaces& h) {
    HalfSpaces c = h;
    for (int i = 0; i < c.rows(); ++i) {
      if (std::abs(c.b[i]) <= kZeroRhs) c.b[i] = 0.0;
      if (c.b[i] < 0.0) throw ConstructionError("compose_mixed_halfspaces: half polytope rhs must be >= 0");
    }
    return c;
  };
  const HalfSpaces p = clean(pos), m = clean(neg);
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  auto place = [N](const Eigen::VectorXd& ap, const Eigen::VectorXd& am) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(2 * N);
    for (int k = 0; k < N; ++k) {
      r[2 * k] = ap[k];
      r[2 * k + 1] = am[k];
    }
    return r;
  };
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(N);
  for (int i = 0; i < p.rows(); ++i) {
    rows.push_back(place(p.A.row(i).transpose(), zero));
    rhs.push_back(p.b[i]);
  }
  for (int j = 0; j < m.rows(); ++j) {
    rows.push_back(place(zero, m.A.row(j).transpose()));
    rhs.push_back(m.b[j]);
  }
  for (int i = 0; i < p.rows(); ++i) {
    if (p.b[i] == 0.0) continue;
    for (int j = 0; j < m.rows(); ++j) {
      if (m.b[j] == 0.0) continue;
      rows.push_back(place(p.A.row(i).transpose() / p.b[i], m.A.row(j).transpose() / m.b[j]));
      rhs.push_back(1.0);
    }
  }
  HalfSpaces h;
  h.A.resize(static_cast<Eigen::Index>(rows.size()), 2 * N);
  h.b.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    h.A.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    h.b[static_cast<Eigen::Index>(r)] = rhs[r];
  }
  return lift_free_normalize(std::move(h));
}

RealizablePolytope::RealizablePolytope(const MomentBasis& basis, const AngularQuadrature& quad) : basis_(basis) {
  const int N = basis.order();
  const auto& nodes = quad.rule.nodes;
  switch (basis.family()) {
    case BasisFamily::monomial:
      facets_ = cyclic_polytope(distinct_sorted(nodes), N);
      break;
    case BasisFamily::legendre: {
      HalfSpaces mono = cyclic_polytope(distinct_sorted(nodes), N);
      // monomial lifted row (-b, a) acts on m = L^{-1} P
      // P(mu) = L m(mu), so r . m = (r L^{-1}) . P
      const Eigen::MatrixXd Linv = legendre_to_monomial(N).inverse();
      HalfSpaces h;
      h.A.resize(mono.rows(), N);
      h.b.resize(mono.rows());
      for (int i = 0; i < mono.rows(); ++i) {
        Eigen::RowVectorXd r(N + 1);
        r[0] = -mono.b[i];
        r.tail(N) = mono.A.row(i);
        Eigen::RowVectorXd t = r * Linv;
        h.A.row(i) = t.tail(N);
        h.b[i] = -t[0];
      }
      facets_ = lift_free_normalize(std::move(h));
      break;
    }
    case BasisFamily::mixed: {
      std::vector<double> neg, pos;
      for (double mu : nodes) {
        if (mu <= 0.0) neg.push_back(mu);
        if (mu >= 0.0) pos.push_back(mu);
      }
      facets_ = compose_mixed_halfspaces(cyclic_polytope(distinct_sorted(pos), N),
                                         cyclic_polytope(distinct_sorted(neg), N));
      break;
    }
  }
  const int d = facets_.dim();
  lifted_A_.resize(facets_.rows() + 1, d + 1);
  lifted_b_.resize(facets_.rows() + 1);
  lifted_A_.row(0).setZero();
  lifted_A_(0, 0) = 1.0;
  lifted_b_[0] = 1.0;
  for (int i = 0; i < facets_.rows(); ++i) {
    lifted_A_(i + 1, 0) = -facets_.b[i];
    lifted_A_.row(i + 1).tail(d) = facets_.A.row(i);
    lifted_b_[i + 1] = 0.0;
  }
  // distinct generator points
  std::vector<double> mus = distinct_sorted(nodes);
  std::vector<Eigen::VectorXd> verts;
  for (double mu : mus) {
    Eigen::VectorXd v = basis.eval(mu).tail(d);
    bool dup = false;
    for (const auto& w : verts)
      if ((w - v).norm() <= kDedupTol) dup = true;
    if (!dup) verts.push_back(v);
  }
  vertices_.resize(static_cast<Eigen::Index>(verts.size()), d);
  for (std::size_t i = 0; i < verts.size(); ++i) vertices_.row(static_cast<Eigen::Index>(i)) = verts[i].transpose();
}

double RealizablePolytope::min_slack(const MomentVector& u) const {
  if (u.size() != lifted_A_.cols()) throw std::invalid_argument("membership: moment vector length mismatch");
  if (!(u[0] > 0.0)) return -std::numeric_limits<double>::infinity();
  const MomentVector s = (0.5 / u[0]) * u;
  return (lifted_b_ - lifted_A_ * s).minCoeff();
}

Membership RealizablePolytope::classify(const MomentVector& u, double tol) const {
  const double m = min_slack(u);
  if (m > tol) return Membership::interior;
  if (m >= -tol) return Membership::boundary;
  return Membership::exterior;
}

Membership membership(const RealizablePolytope& poly, const MomentVector& u, double tol) {
  return poly.classify(u, tol);
}

double limiter_theta(const MomentVector& mean, const MomentVector& u_q, const RealizablePolytope& poly, double eps) {
  const double top = std::max(mean[0], u_q[0]);
  if (!(top > 0.0)) throw std::invalid_argument("limiter_theta: mean must have positive mass");
  const double s = 0.5 / top;
  const MomentVector ub = s * mean, uq = s * u_q;
  const Eigen::VectorXd lhs_q = poly.lifted_matrix() * uq;
  const Eigen::VectorXd dir = poly.lifted_matrix() * (ub - uq);
  const Eigen::VectorXd& rhs = poly.lifted_rhs();
  bool any = false;
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < rhs.size(); ++i) {
    if (dir[i] == 0.0) continue;
    const double th = (rhs[i] - lhs_q[i]) / dir[i];
    if (th >= -eps && th <= 1.0) {
      any = true;
      best = std::max(best, th);
    }
  }
  if (!any) return 0.0;
  return std::min(1.0, eps + best);
}

LimitedCell limit_cell(const CellCoeffs& coeffs, const RealizablePolytope& poly, const Eigen::MatrixXd& phi,
                       double eps) {
  LimitedCell out{coeffs, 0.0};
  const MomentVector mean = coeffs.row(0).transpose();
  if (poly.classify(mean, kMeanTol) == Membership::exterior)
    throw std::runtime_error("limit_cell: cell mean is not realizable");
  if (coeffs.rows() == 1) return out;
  const Eigen::MatrixXd nodes = phi * coeffs;  // Q x n_mom
  double theta = 0.0;
  for (Eigen::Index q = 0; q < nodes.rows(); ++q)
    theta = std::max(theta, limiter_theta(mean, nodes.row(q).transpose(), poly, eps));
  if (theta > 0.0) {
    out.coeffs.bottomRows(coeffs.rows() - 1) *= (1.0 - theta);
    out.theta = theta;
  }
  return out;
}

bool hankel_realizable(const MomentVector& u) {
  const int N = static_cast<int>(u.size()) - 1;
  if (N < 1) return u.size() == 1 && u[0] > 0.0;
  auto pd = [](const Eigen::MatrixXd& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    return ev.minCoeff() > 1e-14 * scale;
  };
  if (N % 2 == 0) {
    const int m = N / 2;
    Eigen::MatrixXd H1(m + 1, m + 1);
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m; ++j) H1(i, j) = u[i + j];
    if (!pd(H1)) return false;
    if (m == 0) return true;
    Eigen::MatrixXd H2(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) H2(i, j) = u[i + j] - u[i + j + 2];
    return pd(H2);
  }
  const int m = (N - 1) / 2;
  Eigen::MatrixXd Hp(m + 1, m + 1), Hm(m + 1, m + 1);
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j) {
      Hp(i, j) = u[i + j] + u[i + j + 1];
      Hm(i, j) = u[i + j] - u[i + j + 1];
    }
  return pd(Hp) && pd(Hm);
}

void write_facets_csv(std::ostream& os, const HalfSpaces& h) {
  for (int k = 0; k < h.dim(); ++k) os << "a_" << k << ",";
  os << "b\n";
  os << std::setprecision(17);
  for (int i = 0; i < h.rows(); ++i) {
    for (int k = 0; k < h.dim(); ++k) os << h.A(i, k) << ",";
    os << h.b[i] << "\n";
  }
}

}  // namespace mnkit
