// Command line driver: `mamix solve` runs one case and writes its artifacts,
// `mamix converge` runs a refinement study and reports fitted rates.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "mamix/harness.hpp"

namespace {

void add_common_flags(CLI::App* cmd, std::string& problem, int& degree, int& n,
                      mamix::RunConfig& config) {
  cmd->add_option("--problem", problem, "catalog label or problem file path")
      ->default_val("quadratic");
  cmd->add_option("--degree", degree, "polynomial degree k")->default_val(2);
  cmd->add_option("--n", n, "subdivisions per side of the coarsest mesh")->default_val(4);
  cmd->add_option("--quad-degree", config.quad_degree,
                  "quadrature exactness override (0 = max(3k, 2k+2))");
  cmd->add_option("--newton-tol", config.newton.tolerance,
                  "absolute Newton tolerance (0 = 1e-10 sqrt(#unknowns))");
  cmd->add_option("--newton-max", config.newton.max_iterations, "Newton iteration cap")
      ->default_val(50);
  cmd->add_option("--beta", config.beta, "rescaling factor: solve det D^2(beta u) = beta^2 f")
      ->default_val(1.0);
  cmd->add_option("--convexify-eps", config.convexify_eps,
                  "add eps |x - x0|^2 to the converged scalar variable");
  cmd->add_option("--clip", config.clip, "ceiling for f (regularization)");
  cmd->add_option("--mollify-f", config.mollify_radius, "mollification radius for f");
  cmd->add_option("--mollify-g", config.mollify_g, "boundary-data mollification radius");
  cmd->add_option("--mollify-g-h", config.mollify_g_h,
                  "per-level boundary mollification, radius = factor * h");
  cmd->add_option("--interior-margin", config.interior_margin,
                  "margin of the interior region for the sup error");
  cmd->add_option("--mesh-file", config.mesh_file, "text mesh replacing the built coarsest mesh");
}

void print_report(const mamix::ErrorReport& r) {
  std::cout << "h            = " << r.h << '\n'
            << "ndof_u       = " << r.ndof_u << '\n'
            << "ndof_sigma   = " << r.ndof_sigma << '\n'
            << "err_u_L2     = " << r.err_u_L2 << '\n'
            << "err_u_H1     = " << r.err_u_H1 << '\n'
            << "err_sigma_L2 = " << r.err_sigma_L2 << '\n'
            << "err_sup_int  = " << r.err_u_sup_interior << '\n'
            << "newton_iters = " << r.newton_iters << '\n'
            << "min_lambda1  = " << r.min_lambda1 << '\n'
            << "converged    = " << (r.solver_converged ? "yes" : "no") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed finite element solver for the 2D elliptic Monge-Ampere equation"};
  app.require_subcommand(1);

  std::string problem;
  int degree = 2, n = 4, levels = 3;
  std::string out_dir = "out";
  mamix::RunConfig config;

  CLI::App* solve = app.add_subcommand("solve", "solve one case and write artifacts");
  add_common_flags(solve, problem, degree, n, config);
  solve->add_option("--out", out_dir, "output directory")->default_val("out");

  CLI::App* converge = app.add_subcommand("converge", "refinement study with fitted rates");
  add_common_flags(converge, problem, degree, n, config);
  converge->add_option("--levels", levels, "number of refinement levels")->default_val(3);
  converge->add_option("--out", out_dir, "output directory")->default_val("out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    config.n = n;
    if (solve->parsed()) {
      const mamix::ErrorReport report = mamix::run_case(problem, degree, n, config, out_dir);
      print_report(report);
      std::cout << "artifacts written to " << out_dir << "/\n";
      return report.solver_converged ? 0 : 2;
    }
    // converge
    const mamix::ConvergenceTable table = mamix::run_convergence(problem, degree, levels, config);
    table.print_summary(std::cout);
    std::filesystem::create_directories(out_dir);
    const std::string csv_path = out_dir + "/convergence.csv";
    std::ofstream os(csv_path);
    if (!os) throw std::runtime_error("cannot write " + csv_path);
    table.write_csv(os);
    std::cout << "table written to " << csv_path << '\n';
    if (!table.rate_error.empty()) {
      std::cerr << "error: " << table.rate_error << '\n';
      return 2;
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const mamix::NewtonError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
