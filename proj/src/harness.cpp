#include "mnkit/harness.hpp"

#include <yaml-cpp/yaml.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "mnkit/realizability.hpp"

namespace mnkit {

namespace {

const std::set<std::string> kKeys = {
    "problem",     "basis",          "order",          "entropy",     "nq",         "J",
    "k",           "Q",              "t_final",        "tau",         "r_schedule", "k_r",
    "epsilon_limiter", "tvb_M",      "kappa_jac",      "lf_constant", "sigma_a",    "sigma_s",
    "boundary",    "K",              "c0",             "gamma",       "mu0",        "psi_floor",
    "beam_width",  "slope_limiter",  "realizability_limiter", "eval_cells", "output_dir"};

const std::set<std::string> kProblems = {"manufactured", "plane_source", "two_beams", "limiter_test"};

nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json j;
  j["problem"] = c.problem;
  j["basis"] = to_string(c.basis);
  j["order"] = c.order;
  j["entropy"] = to_string(c.solver.entropy);
  j["nq"] = c.nq;
  j["J"] = c.J;
  j["k"] = c.dg.k;
  j["Q"] = c.dg.Q;
  if (c.t_final) j["t_final"] = *c.t_final;
  j["tau"] = c.solver.tau;
  j["r_schedule"] = c.solver.r_schedule;
  j["k_r"] = c.solver.k_r;
  j["epsilon_limiter"] = c.dg.epsilon_limiter;
  j["tvb_M"] = c.dg.tvb_M;
  j["kappa_jac"] = c.dg.kappa_jac;
  j["lf_constant"] = c.dg.lf_constant;
  if (c.sigma_a) j["sigma_a"] = *c.sigma_a;
  if (c.sigma_s) j["sigma_s"] = *c.sigma_s;
  if (c.boundary) j["boundary"] = to_string(*c.boundary);
  j["K"] = c.manufactured.K;
  j["c0"] = c.manufactured.c0;
  j["gamma"] = c.limiter_test.gamma;
  j["mu0"] = c.limiter_test.mu0;
  j["psi_floor"] = c.benchmark.psi_floor;
  j["beam_width"] = c.benchmark.beam_width;
  j["slope_limiter"] = c.dg.slope_limiter;
  j["realizability_limiter"] = c.dg.realizability_limiter;
  j["eval_cells"] = c.eval_cells;
  j["output_dir"] = c.output_dir;
  return j;
}

template <class T>
T get(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw std::invalid_argument("config key '" + key + "' has an invalid value");
  }
}

// Everything a run needs, owned in one place so references stay valid.
struct Experiment {
  std::unique_ptr<MomentModel> model;
  std::unique_ptr<Closure> closure;
  std::unique_ptr<RealizablePolytope> poly;

  explicit Experiment(const RunConfig& cfg) {
    model = std::make_unique<MomentModel>(MomentBasis(cfg.basis, cfg.order), angular_quadrature(cfg.nq));
    closure = std::make_unique<Closure>(*model, cfg.solver);
    if (cfg.solver.entropy == Entropy::maxwell_boltzmann)
      poly = std::make_unique<RealizablePolytope>(model->basis(), model->quadrature());
  }
};

ProblemSetup make_setup(const RunConfig& cfg, const MomentModel& model, int J) {
  ProblemSetup s;
  if (cfg.problem == "manufactured") {
    ManufacturedParams p = cfg.manufactured;
    if (cfg.t_final) p.t_final = *cfg.t_final;
    s = manufactured_setup(J, cfg.dg, model, p);
  } else if (cfg.problem == "plane_source") {
    s = plane_source_setup(J, cfg.dg, model, cfg.benchmark, cfg.t_final.value_or(1.0));
  } else if (cfg.problem == "two_beams") {
    s = two_beams_setup(J, cfg.dg, model, cfg.benchmark, cfg.t_final.value_or(0.8));
  } else {
    throw std::invalid_argument("no time-dependent setup for problem '" + cfg.problem + "'");
  }
  if (cfg.sigma_a) s.dg.sigma_a = *cfg.sigma_a;
  if (cfg.sigma_s) s.dg.sigma_s = *cfg.sigma_s;
  if (cfg.boundary) s.dg.boundary = *cfg.boundary;
  return s;
}

RunReport run_limiter_test(const RunConfig& cfg, Experiment& ex) {
  RunReport rep;
  rep.config = cfg;
  rep.mesh = Mesh(-1.0, 1.0, cfg.J);
  const MomentModel& model = *ex.model;
  if (!ex.poly) throw std::invalid_argument("limiter test needs the Maxwell-Boltzmann polytope");
  const LimiterTestParams p = cfg.limiter_test;
  DgState s = project_initial([&](double x) { return limiter_test_curve(p, model, x); }, rep.mesh, cfg.dg.k,
                              model.size());
  const SpatialTable table = make_spatial_table(cfg.dg.k, cfg.dg.Q);
  for (int j = 0; j < rep.mesh.cells; ++j) {
    LimitedCell lc = limit_cell(s.cells[j], *ex.poly, table.phi, cfg.dg.epsilon_limiter);
    if (lc.theta > 0.0) {
      s.cells[j] = lc.coeffs;
      rep.diag.thetas.push_back({0.0, rep.mesh.center(j), lc.theta});
      rep.theta_max = std::max(rep.theta_max, lc.theta);
    }
  }
  rep.state = s;
  const Mesh eval = cfg.eval_cells > 0 ? Mesh(-1.0, 1.0, cfg.eval_cells) : rep.mesh;
  for (int c = 0; c < std::min(2, model.size()); ++c)
    rep.errors.push_back(error_norms(
        s, rep.mesh, [&](double x) { return limiter_test_curve(p, model, x)[c]; }, c, &eval));
  return rep;
}

void write_double(std::ostream& os, double v) { os << std::setprecision(17) << v; }

}  // namespace

void RunConfig::validate() const {
  if (!kProblems.count(problem)) throw std::invalid_argument("unknown problem '" + problem + "'");
  if (J < 1) throw std::invalid_argument("J must be >= 1");
  if (t_final && *t_final < 0.0) throw std::invalid_argument("t_final must be >= 0");
  if (eval_cells < 0) throw std::invalid_argument("eval_cells must be >= 0");
  solver.validate();
  dg.validate();
  MomentBasis(basis, order);
  if (nq < 4 || nq % 2) throw std::invalid_argument("nq must be even and >= 4");
}

RunConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw std::invalid_argument(std::string("config is not valid YAML: ") + e.what());
  }
  RunConfig c;
  if (!root || root.IsNull()) {
    c.validate();
    return c;
  }
  if (!root.IsMap()) throw std::invalid_argument("config must be a flat key/value mapping");
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    if (!kKeys.count(key)) throw std::invalid_argument("unknown config key '" + key + "'");
    if (key == "problem") c.problem = get<std::string>(v, key);
    else if (key == "basis") c.basis = parse_basis_family(get<std::string>(v, key));
    else if (key == "order") c.order = get<int>(v, key);
    else if (key == "entropy") c.solver.entropy = parse_entropy(get<std::string>(v, key));
    else if (key == "nq") c.nq = get<int>(v, key);
    else if (key == "J") c.J = get<int>(v, key);
    else if (key == "k") c.dg.k = get<int>(v, key);
    else if (key == "Q") c.dg.Q = get<int>(v, key);
    else if (key == "t_final") c.t_final = get<double>(v, key);
    else if (key == "tau") c.solver.tau = get<double>(v, key);
    else if (key == "r_schedule") c.solver.r_schedule = get<std::vector<double>>(v, key);
    else if (key == "k_r") c.solver.k_r = get<int>(v, key);
    else if (key == "epsilon_limiter") c.dg.epsilon_limiter = get<double>(v, key);
    else if (key == "tvb_M") c.dg.tvb_M = get<double>(v, key);
    else if (key == "kappa_jac") c.dg.kappa_jac = get<double>(v, key);
    else if (key == "lf_constant") c.dg.lf_constant = get<double>(v, key);
    else if (key == "sigma_a") c.sigma_a = get<double>(v, key);
    else if (key == "sigma_s") c.sigma_s = get<double>(v, key);
    else if (key == "boundary") c.boundary = parse_boundary(get<std::string>(v, key));
    else if (key == "K") c.manufactured.K = get<double>(v, key);
    else if (key == "c0") c.manufactured.c0 = get<double>(v, key);
    else if (key == "gamma") c.limiter_test.gamma = get<double>(v, key);
    else if (key == "mu0") c.limiter_test.mu0 = get<double>(v, key);
    else if (key == "psi_floor") c.benchmark.psi_floor = get<double>(v, key);
    else if (key == "beam_width") c.benchmark.beam_width = get<double>(v, key);
    else if (key == "slope_limiter") c.dg.slope_limiter = get<bool>(v, key);
    else if (key == "realizability_limiter") c.dg.realizability_limiter = get<bool>(v, key);
    else if (key == "eval_cells") c.eval_cells = get<int>(v, key);
    else if (key == "output_dir") c.output_dir = get<std::string>(v, key);
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& cfg) { return config_json(cfg).dump(2); }

ErrorNorms error_norms(const DgState& state, const Mesh& mesh, const std::function<double(double)>& exact,
                       int comp, const Mesh* eval_mesh) {
  const Mesh& em = eval_mesh ? *eval_mesh : mesh;
  static const QuadratureRule gl = gauss_lobatto(100, -0.5, 0.5);
  ErrorNorms e;
  for (int i = 0; i < em.cells; ++i) {
    const double xc = em.center(i);
    int j = static_cast<int>(std::floor((xc - mesh.x_left) / mesh.dx()));
    j = std::clamp(j, 0, mesh.cells - 1);
    const CellCoeffs& c = state.cells[j];
    for (std::size_t q = 0; q < gl.size(); ++q) {
      const double x = xc + em.dx() * gl.nodes[q];
      const double y = (x - mesh.center(j)) / mesh.dx();
      double uh = 0.0;
      for (Eigen::Index r = 0; r < c.rows(); ++r) uh += c(r, comp) * scaled_legendre(static_cast<int>(r), y);
      const double err = std::abs(exact(x) - uh);
      e.l1 += em.dx() * gl.weights[q] * err;
      e.linf = std::max(e.linf, err);
    }
  }
  return e;
}

std::optional<double> observed_order(double e_coarse, double e_fine, double dx_coarse, double dx_fine) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0) || !(dx_coarse > 0.0) || !(dx_fine > 0.0) || dx_coarse == dx_fine)
    return std::nullopt;
  return std::log(e_coarse / e_fine) / std::log(dx_coarse / dx_fine);
}

RunReport run(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  Experiment ex(cfg);
  RunReport rep;
  if (cfg.problem == "limiter_test") {
    rep = run_limiter_test(cfg, ex);
  } else {
    ProblemSetup setup = make_setup(cfg, *ex.model, cfg.J);
    const RealizablePolytope* poly = ex.poly.get();
    DgSettings dg = setup.dg;
    if (!poly) dg.realizability_limiter = false;
    DgScheme scheme(setup.mesh, dg, *ex.closure, poly, setup.boundary, setup.source);
    WarmStart warm = scheme.make_warm_start();
    rep.config = cfg;
    rep.mesh = setup.mesh;
    DgState u = scheme.limit(setup.initial, 0.0, warm, rep.diag);
    double t = 0.0;
    const double tf = setup.t_final;
    rep.mass.push_back({0.0, scheme.total_mass(u)});
    while (t < tf) {
      double dt = scheme.stable_dt();
      bool last = false;
      if (t + dt >= tf * (1.0 - 1e-14)) {
        dt = tf - t;
        last = true;
      }
      double predicted = 0.0;
      const double before = scheme.total_mass(u);
      u = scheme.step(u, t, dt, warm, rep.diag, &predicted);
      const double after = scheme.total_mass(u);
      rep.max_ledger_residual = std::max(rep.max_ledger_residual, std::abs(after - before - predicted));
      t = last ? tf : t + dt;
      ++rep.steps;
      rep.mass.push_back({t, after});
    }
    rep.state = std::move(u);
    rep.t_final = tf;
    for (const auto& th : rep.diag.thetas) rep.theta_max = std::max(rep.theta_max, th.theta);
    if (setup.exact_u0) {
      auto ex0 = setup.exact_u0;
      rep.errors.push_back(error_norms(rep.state, rep.mesh, [&](double x) { return ex0(tf, x); }, 0));
    }
  }
  rep.config = cfg;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!cfg.output_dir.empty()) write_run_outputs(rep, cfg.output_dir);
  return rep;
}

ConvergenceReport convergence_study(const RunConfig& cfg, const std::vector<int>& cells) {
  if (cells.empty()) throw std::invalid_argument("convergence study needs at least one cell count");
  for (std::size_t i = 1; i < cells.size(); ++i)
    if (cells[i] <= cells[i - 1]) throw std::invalid_argument("cell counts must be increasing");
  ConvergenceReport out;
  for (int J : cells) {
    RunConfig c = cfg;
    c.J = J;
    c.output_dir.clear();
    if (c.problem == "limiter_test" && c.eval_cells == 0) c.eval_cells = cells.back();
    RunReport r = run(c);
    ConvergenceRow row;
    row.J = J;
    row.errors = r.errors;
    row.theta_max = r.theta_max;
    row.regularizations = r.diag.regularizations.size();
    row.nu1.assign(row.errors.size(), std::nullopt);
    row.nuinf.assign(row.errors.size(), std::nullopt);
    if (!out.rows.empty()) {
      const ConvergenceRow& prev = out.rows.back();
      const double dxc = 1.0 / prev.J, dxf = 1.0 / J;
      for (std::size_t k = 0; k < row.errors.size() && k < prev.errors.size(); ++k) {
        row.nu1[k] = observed_order(prev.errors[k].l1, row.errors[k].l1, dxc, dxf);
        row.nuinf[k] = observed_order(prev.errors[k].linf, row.errors[k].linf, dxc, dxf);
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

void write_profile_csv(std::ostream& os, const RunReport& r) {
  const int n = r.state.cells.empty() ? 0 : static_cast<int>(r.state.cells.front().cols());
  os << "x";
  for (int i = 0; i < n; ++i) os << ",u_" << i;
  os << "\n";
  for (int j = 0; j < r.mesh.cells; ++j) {
    write_double(os, r.mesh.center(j));
    const MomentVector v = evaluate_cell(r.state.cells[j], 0.0);
    for (int i = 0; i < n; ++i) {
      os << ",";
      write_double(os, v[i]);
    }
    os << "\n";
  }
}

void write_theta_csv(std::ostream& os, const RunReport& r) {
  os << "t,x,theta\n";
  for (const auto& e : r.diag.thetas) {
    write_double(os, e.t);
    os << ",";
    write_double(os, e.x);
    os << ",";
    write_double(os, e.theta);
    os << "\n";
  }
}

void write_regularization_csv(std::ostream& os, const RunReport& r) {
  os << "t,x,r\n";
  for (const auto& e : r.diag.regularizations) {
    write_double(os, e.t);
    os << ",";
    write_double(os, e.x);
    os << ",";
    write_double(os, e.r);
    os << "\n";
  }
}

void write_summary_json(std::ostream& os, const RunReport& r) {
  nlohmann::json j;
  j["config"] = config_json(r.config);
  j["cells"] = r.mesh.cells;
  j["t_final"] = r.t_final;
  j["steps"] = r.steps;
  j["wall_seconds"] = r.wall_seconds;
  if (!r.mass.empty()) {
    j["mass_initial"] = r.mass.front().mass;
    j["mass_final"] = r.mass.back().mass;
  }
  j["max_mass_ledger_residual"] = r.max_ledger_residual;
  j["mean_checks"] = r.diag.mean_checks;
  j["mean_violations"] = r.diag.mean_violations;
  j["worst_mean_slack"] = r.diag.worst_mean_slack;
  j["optimizer_solves"] = r.diag.solves;
  j["regularization_events"] = r.diag.regularizations.size();
  j["limiter_events"] = r.diag.thetas.size();
  j["theta_max"] = r.theta_max;
  j["slope_limiter_scalar_fallbacks"] = r.diag.scalar_fallbacks;
  j["eigen_failures"] = r.diag.eigen_failures;
  nlohmann::json errs = nlohmann::json::array();
  for (std::size_t c = 0; c < r.errors.size(); ++c)
    errs.push_back({{"component", c}, {"l1", r.errors[c].l1}, {"linf", r.errors[c].linf}});
  j["errors"] = errs;
  os << j.dump(2) << "\n";
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& c) {
  const std::size_t ncomp = c.rows.empty() ? 0 : c.rows.front().errors.size();
  os << "J";
  for (std::size_t k = 0; k < ncomp; ++k)
    os << ",E1_u" << k << ",nu1_u" << k << ",Einf_u" << k << ",nuinf_u" << k;
  os << ",theta_max,regularizations\n";
  auto opt = [&](const std::optional<double>& v) {
    if (v) write_double(os, *v);
  };
  for (const auto& row : c.rows) {
    os << row.J;
    for (std::size_t k = 0; k < ncomp; ++k) {
      os << ",";
      write_double(os, row.errors[k].l1);
      os << ",";
      opt(row.nu1[k]);
      os << ",";
      write_double(os, row.errors[k].linf);
      os << ",";
      opt(row.nuinf[k]);
    }
    os << ",";
    write_double(os, row.theta_max);
    os << "," << row.regularizations << "\n";
  }
}

void write_run_outputs(const RunReport& r, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(fs::path(dir) / name);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    return f;
  };
  {
    auto f = open("profile.csv");
    write_profile_csv(f, r);
  }
  {
    auto f = open("theta.csv");
    write_theta_csv(f, r);
  }
  {
    auto f = open("regularization.csv");
    write_regularization_csv(f, r);
  }
  {
    auto f = open("summary.json");
    write_summary_json(f, r);
  }
}

}  // namespace mnkit
