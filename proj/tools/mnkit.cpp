#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mnkit/harness.hpp"
#include "mnkit/realizability.hpp"

namespace {

std::vector<int> parse_cells(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    int v = std::stoi(item, &pos);
    if (pos != item.size()) throw std::invalid_argument("bad cell count '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RKDG solver for entropy-based moment closures in slab geometry"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  auto* run = app.add_subcommand("run", "run one configuration");
  run->add_option("--config", config_path, "YAML config file")->required();
  run->add_option("--output-dir", out_dir, "overrides output_dir from the config");

  std::string cells_arg, conv_out;
  auto* conv = app.add_subcommand("converge", "convergence study over several cell counts");
  conv->add_option("--config", config_path, "YAML config file")->required();
  conv->add_option("--cells", cells_arg, "comma separated cell counts, increasing")->required();
  conv->add_option("--out", conv_out, "CSV file for the table (stdout when omitted)");

  std::string basis = "monomial", facets_out;
  int order = 4, nq = 40;
  auto* poly = app.add_subcommand("polytope", "export the realizable-set facets");
  poly->add_option("--basis", basis, "monomial | mixed | legendre");
  poly->add_option("--order", order, "moment order N");
  poly->add_option("--nq", nq, "angular quadrature points");
  poly->add_option("--out", facets_out, "CSV file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      mnkit::RunConfig cfg = mnkit::load_config(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      mnkit::RunReport r = mnkit::run(cfg);
      if (cfg.output_dir.empty()) {
        mnkit::write_summary_json(std::cout, r);
      } else {
        std::cout << "wrote " << cfg.output_dir << " (" << r.steps << " steps, " << r.wall_seconds << " s)\n";
      }
    } else if (*conv) {
      mnkit::RunConfig cfg = mnkit::load_config(config_path);
      mnkit::ConvergenceReport rep = mnkit::convergence_study(cfg, parse_cells(cells_arg));
      if (conv_out.empty()) {
        mnkit::write_convergence_csv(std::cout, rep);
      } else {
        std::ofstream f(conv_out);
        if (!f) throw std::runtime_error("cannot write " + conv_out);
        mnkit::write_convergence_csv(f, rep);
      }
    } else if (*poly) {
      mnkit::RealizablePolytope p(mnkit::MomentBasis(mnkit::parse_basis_family(basis), order),
                                  mnkit::angular_quadrature(nq));
      if (facets_out.empty()) {
        mnkit::write_facets_csv(std::cout, p.facets());
      } else {
        std::ofstream f(facets_out);
        if (!f) throw std::runtime_error("cannot write " + facets_out);
        mnkit::write_facets_csv(f, p.facets());
        std::cout << p.facets().rows() << " facets written to " << facets_out << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "mnkit: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
