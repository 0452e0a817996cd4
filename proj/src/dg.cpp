#include "mnkit/dg.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mnkit {

namespace {

std::string where(int j, double x, double t) {
  std::ostringstream os;
  os << " (cell " << j << ", x = " << x << ", t = " << t << ")";
  return os.str();
}

}  // namespace

Mesh::Mesh(double xl, double xr, int J) : x_left(xl), x_right(xr), cells(J) {
  if (J < 1) throw std::invalid_argument("mesh needs at least one cell");
  if (!(xr > xl)) throw std::invalid_argument("mesh needs x_right > x_left");
}

BoundaryKind parse_boundary(std::string_view name) {
  if (name == "periodic") return BoundaryKind::periodic;
  if (name == "dirichlet") return BoundaryKind::dirichlet;
  throw std::invalid_argument("unknown boundary kind '" + std::string(name) + "'");
}

std::string to_string(BoundaryKind b) { return b == BoundaryKind::periodic ? "periodic" : "dirichlet"; }

void DgSettings::validate() const {
  if (k < 0 || k > 2) throw std::invalid_argument("polynomial degree k must be 0, 1 or 2");
  if (Q < 2) throw std::invalid_argument("Q must be >= 2");
  if (2 * Q - 3 < k) throw std::invalid_argument("need 2Q - 3 >= k");
  if (!(lf_constant >= 1.0)) throw std::invalid_argument("Lax-Friedrichs constant must be >= 1");
  if (sigma_a < 0.0 || sigma_s < 0.0) throw std::invalid_argument("cross sections must be nonnegative");
  if (tvb_M < 0.0) throw std::invalid_argument("tvb_M must be nonnegative");
  if (!(kappa_jac > 0.0)) throw std::invalid_argument("kappa_jac must be positive");
  if (epsilon_limiter < 0.0) throw std::invalid_argument("epsilon_limiter must be nonnegative");
}

double scaled_legendre(int i, double y) {
  const double x = 2.0 * y;
  double p0 = 1.0, p1 = x;
  if (i == 0) return 1.0;
  for (int n = 2; n <= i; ++n) {
    double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double scaled_legendre_derivative(int i, double y) {
  // P'_n = n (x P_n - P_{n-1}) / (x^2 - 1) breaks at the ends, use the sum form instead
  const double x = 2.0 * y;
  double d = 0.0;
  for (int m = i - 1; m >= 0; m -= 2) d += (2.0 * m + 1.0) * scaled_legendre(m, 0.5 * x);
  return 2.0 * d;
}

SpatialTable make_spatial_table(int k, int Q) {
  SpatialTable t;
  t.rule = reference_cell_rule(Q);
  t.phi.resize(Q, k + 1);
  t.dphi.resize(Q, k + 1);
  for (int q = 0; q < Q; ++q)
    for (int i = 0; i <= k; ++i) {
      t.phi(q, i) = scaled_legendre(i, t.rule.nodes[q]);
      t.dphi(q, i) = scaled_legendre_derivative(i, t.rule.nodes[q]);
    }
  t.w_end = t.rule.weights.back();
  return t;
}

MomentVector lax_friedrichs(const MomentVector& f_left, const MomentVector& f_right, const MomentVector& v,
                            const MomentVector& w, double C) {
  return 0.5 * (f_left + f_right - C * (w - v));
}

double cfl_dt(double dx, double sigma_t, double w_q) {
  if (!(dx > 0.0)) throw std::invalid_argument("cfl_dt: dx must be positive");
  if (sigma_t < 0.0) throw std::invalid_argument("cfl_dt: sigma_t must be nonnegative");
  return w_q * dx / (1.0 + w_q * dx * sigma_t);
}

double minmod(double a1, double a2, double a3) {
  if (a1 > 0.0 && a2 > 0.0 && a3 > 0.0) return std::min({a1, a2, a3});
  if (a1 < 0.0 && a2 < 0.0 && a3 < 0.0) return std::max({a1, a2, a3});
  return 0.0;
}

DgState& DgState::operator+=(const DgState& o) {
  if (o.cells.size() != cells.size()) throw std::invalid_argument("DgState size mismatch");
  for (std::size_t j = 0; j < cells.size(); ++j) cells[j] += o.cells[j];
  return *this;
}

DgState& DgState::operator*=(double s) {
  for (auto& c : cells) c *= s;
  return *this;
}

DgState operator+(DgState a, const DgState& b) { return a += b; }
DgState operator*(double s, DgState a) { return a *= s; }

DgState project_initial(const std::function<MomentVector(double)>& f, const Mesh& mesh, int k, int n_mom) {
  const QuadratureRule gl = gauss_legendre(16, -0.5, 0.5);
  DgState s;
  s.cells.assign(mesh.cells, CellCoeffs::Zero(k + 1, n_mom));
  for (int j = 0; j < mesh.cells; ++j) {
    for (std::size_t g = 0; g < gl.size(); ++g) {
      const double y = gl.nodes[g];
      const MomentVector v = f(mesh.center(j) + mesh.dx() * y);
      for (int i = 0; i <= k; ++i) s.cells[j].row(i) += (gl.weights[g] * scaled_legendre(i, y)) * v.transpose();
    }
    for (int i = 0; i <= k; ++i) s.cells[j].row(i) *= (2.0 * i + 1.0);
  }
  return s;
}

MomentVector evaluate_cell(const CellCoeffs& c, double y) {
  MomentVector v = MomentVector::Zero(c.cols());
  for (Eigen::Index i = 0; i < c.rows(); ++i) v += scaled_legendre(static_cast<int>(i), y) * c.row(i).transpose();
  return v;
}

DgScheme::DgScheme(const Mesh& mesh, const DgSettings& settings, const Closure& closure,
                   const RealizablePolytope* poly, BoundaryData bc, SourceFn source)
    : mesh_(mesh),
      settings_(settings),
      closure_(&closure),
      poly_(poly),
      bc_(std::move(bc)),
      source_(std::move(source)),
      table_(make_spatial_table(settings.k, settings.Q)) {
  settings_.validate();
  if (settings_.boundary == BoundaryKind::dirichlet && (!bc_.left || !bc_.right))
    throw std::invalid_argument("dirichlet boundary needs left and right boundary moments");
}

WarmStart DgScheme::make_warm_start() const {
  WarmStart w;
  w.nodes.assign(static_cast<std::size_t>(mesh_.cells) * settings_.Q, Multipliers());
  w.means.assign(mesh_.cells, Multipliers());
  w.ghosts.assign(2, Multipliers());
  return w;
}

MomentVector DgScheme::ghost(int side, double t) const { return side < 0 ? bc_.left(t) : bc_.right(t); }

MomentVector DgScheme::neighbor_mean(const DgState& u, int j, int side, double t) const {
  const int J = mesh_.cells;
  int n = j + side;
  if (n >= 0 && n < J) return u.cells[n].row(0).transpose();
  if (settings_.boundary == BoundaryKind::periodic) return u.cells[(n + J) % J].row(0).transpose();
  return ghost(side, t);
}

DgState DgScheme::rhs(const DgState& u, double t, WarmStart& warm, Diagnostics& diag, double* mass_rate) const {
  const int J = mesh_.cells, Q = settings_.Q, k = settings_.k, n = moments();
  const double dx = mesh_.dx();
  const auto& rule = table_.rule;
  const MomentModel& model = closure_->model();

  auto solve = [&](const MomentVector& v, Multipliers& w, double x, int j) {
    SolveReport rep;
    try {
      rep = closure_->solve(v, w);
    } catch (const OptimizerFailure& e) {
      throw OptimizerFailure(e.what() + where(j, x, t), e.last_iterate());
    } catch (const std::exception& e) {
      throw std::runtime_error(e.what() + where(j, x, t));
    }
    ++diag.solves;
    w = rep.multipliers;
    if (rep.r_used > 0.0) diag.regularizations.push_back({t, x, rep.r_used});
    return rep;
  };

  // node moments and fluxes, node q of cell j at index j*Q + q
  std::vector<MomentVector> U(static_cast<std::size_t>(J) * Q), F(U.size());
  for (int j = 0; j < J; ++j) {
    const Eigen::MatrixXd vals = table_.phi * u.cells[j];
    for (int q = 0; q < Q; ++q) {
      const std::size_t idx = static_cast<std::size_t>(j) * Q + q;
      U[idx] = vals.row(q).transpose();
      const double x = mesh_.center(j) + dx * rule.nodes[q];
      F[idx] = closure_->flux(solve(U[idx], warm.nodes[idx], x, j));
    }
  }

  // numerical fluxes at interfaces 0..J (interface i sits left of cell i)
  std::vector<MomentVector> Fhat(J + 1);
  auto right_end = [&](int j) { return static_cast<std::size_t>(j) * Q + (Q - 1); };
  auto left_end = [&](int j) { return static_cast<std::size_t>(j) * Q; };
  for (int i = 1; i < J; ++i)
    Fhat[i] = lax_friedrichs(F[right_end(i - 1)], F[left_end(i)], U[right_end(i - 1)], U[left_end(i)],
                             settings_.lf_constant);
  if (settings_.boundary == BoundaryKind::periodic) {
    Fhat[0] = lax_friedrichs(F[right_end(J - 1)], F[left_end(0)], U[right_end(J - 1)], U[left_end(0)],
                             settings_.lf_constant);
    Fhat[J] = Fhat[0];
  } else {
    const MomentVector gl = ghost(-1, t), gr = ghost(1, t);
    const MomentVector fl = closure_->flux(solve(gl, warm.ghosts[0], mesh_.x_left, -1));
    const MomentVector fr = closure_->flux(solve(gr, warm.ghosts[1], mesh_.x_right, J));
    Fhat[0] = lax_friedrichs(fl, F[left_end(0)], gl, U[left_end(0)], settings_.lf_constant);
    Fhat[J] = lax_friedrichs(F[right_end(J - 1)], fr, U[right_end(J - 1)], gr, settings_.lf_constant);
  }

  DgState out;
  out.cells.assign(J, CellCoeffs::Zero(k + 1, n));
  double source_mass = 0.0;
  const double sa = settings_.sigma_a, ss = settings_.sigma_s;
  for (int j = 0; j < J; ++j) {
    CellCoeffs& r = out.cells[j];
    for (int q = 0; q < Q; ++q) {
      const std::size_t idx = static_cast<std::size_t>(j) * Q + q;
      const double x = mesh_.center(j) + dx * rule.nodes[q];
      MomentVector s = -sa * U[idx];
      if (ss != 0.0) s += ss * collision_moments(U[idx], model);
      if (source_) s += source_(t, x);
      const double w = rule.weights[q];
      source_mass += dx * w * s[0];
      for (int i = 0; i <= k; ++i)
        r.row(i) += (w * table_.dphi(q, i)) * F[idx].transpose() + (dx * w * table_.phi(q, i)) * s.transpose();
    }
    for (int i = 0; i <= k; ++i) {
      const double sgn = (i % 2 == 0) ? 1.0 : -1.0;
      r.row(i) -= (Fhat[j + 1] - sgn * Fhat[j]).transpose();
      r.row(i) *= (2.0 * i + 1.0) / dx;
    }
  }
  if (mass_rate) *mass_rate = -(Fhat[J][0] - Fhat[0][0]) + source_mass;
  return out;
}

DgState DgScheme::slope_limit(const DgState& u, double t, WarmStart& warm, Diagnostics& diag) const {
  if (settings_.k == 0) return u;
  const int J = mesh_.cells, n = moments();
  const double thresh = settings_.tvb_M * mesh_.dx() * mesh_.dx();
  DgState out = u;
  for (int j = 0; j < J; ++j) {
    const MomentVector m = u.cells[j].row(0).transpose();
    const MomentVector mL = neighbor_mean(u, j, -1, t), mR = neighbor_mean(u, j, 1, t);
    // characteristic variables w = V^{-1} u; fall back to the identity
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n), Vinv = V;
    bool characteristic = false;
    try {
      SolveReport rep = closure_->solve(m, warm.means[j]);
      warm.means[j] = rep.multipliers;
      ++diag.solves;
      if (rep.r_used > 0.0) diag.regularizations.push_back({t, mesh_.center(j), rep.r_used});
      CharacteristicDecomposition cd = characteristic_decomposition(rep.multipliers, closure_->model(),
                                                                    closure_->entropy());
      if (!cd.ok) {
        ++diag.eigen_failures;
      } else if (cd.condition <= settings_.kappa_jac) {
        V = cd.V;
        Vinv = cd.V_inv;
        characteristic = true;
      }
    } catch (const std::exception&) {
      ++diag.eigen_failures;
    }
    if (!characteristic) ++diag.scalar_fallbacks;
    const Eigen::MatrixXd W = u.cells[j] * Vinv.transpose();
    const Eigen::RowVectorXd w0 = (Vinv * m).transpose();
    const Eigen::RowVectorXd wL = (Vinv * mL).transpose(), wR = (Vinv * mR).transpose();
    Eigen::MatrixXd Wn = W;
    bool changed = false;
    for (int c = 0; c < n; ++c) {
      const double a1 = W(1, c);
      if (std::abs(a1) <= thresh) continue;
      const double d = minmod(a1, wR[c] - w0[c], w0[c] - wL[c]);
      if (d != a1) {
        Wn(1, c) = d;
        for (Eigen::Index i = 2; i < Wn.rows(); ++i) Wn(i, c) = 0.0;
        changed = true;
      }
    }
    if (changed) {
      CellCoeffs c = Wn * V.transpose();
      c.row(0) = u.cells[j].row(0);  // keep the mean bit-exact
      out.cells[j] = c;
    }
  }
  return out;
}

DgState DgScheme::realizability_limit(const DgState& u, double t, Diagnostics& diag) const {
  if (!poly_) return u;
  DgState out = u;
  for (int j = 0; j < mesh_.cells; ++j) {
    LimitedCell lc;
    try {
      lc = limit_cell(u.cells[j], *poly_, table_.phi, settings_.epsilon_limiter);
    } catch (const std::exception& e) {
      throw std::runtime_error(e.what() + where(j, mesh_.center(j), t));
    }
    if (lc.theta > 0.0) {
      out.cells[j] = lc.coeffs;
      diag.thetas.push_back({t, mesh_.center(j), lc.theta});
    }
  }
  return out;
}

DgState DgScheme::limit(const DgState& u, double t, WarmStart& warm, Diagnostics& diag) const {
  DgState v = settings_.slope_limiter ? slope_limit(u, t, warm, diag) : u;
  if (settings_.realizability_limiter) v = realizability_limit(v, t, diag);
  return v;
}

void DgScheme::check_means(const DgState& u, Diagnostics& diag) const {
  if (!poly_) return;
  for (const auto& c : u.cells) {
    const double s = poly_->min_slack(c.row(0).transpose());
    ++diag.mean_checks;
    diag.worst_mean_slack = std::min(diag.worst_mean_slack, s);
    if (!(s > 0.0)) ++diag.mean_violations;
  }
}

double DgScheme::stable_dt() const {
  return cfl_dt(mesh_.dx(), settings_.sigma_a + settings_.sigma_s, table_.w_end);
}

double DgScheme::total_mass(const DgState& u) const {
  double m = 0.0;
  for (const auto& c : u.cells) m += c(0, 0);
  return m * mesh_.dx();
}

DgState DgScheme::step(const DgState& u, double t, double dt, WarmStart& warm, Diagnostics& diag,
                       double* mass_change) const {
  double rates[3] = {0.0, 0.0, 0.0};
  int stage = 0;
  auto rhs_fn = [&](const DgState& s, double ts) { return rhs(s, ts, warm, diag, &rates[stage]); };
  auto limit_fn = [&](const DgState& s, double ts) { return limit(s, ts, warm, diag); };
  auto hook = [&](const DgState& e, int st) {
    check_means(e, diag);
    stage = st + 1;
  };
  DgState out = ssp33_step(u, t, dt, rhs_fn, limit_fn, hook);
  if (mass_change) *mass_change = dt * (rates[0] / 6.0 + rates[1] / 6.0 + 2.0 * rates[2] / 3.0);
  return out;
}

}  // namespace mnkit
