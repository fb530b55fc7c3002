//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>

#include "bouss/errors.hpp"
#include "bouss/optimizer.hpp"
#include "config.hpp"
#include "runner.hpp"

namespace {

using boost::property_tree::ptree;

/// Flag values kept as text so that the config parser validates them.
struct Overrides {
  std::string config_path;
  std::string preset;
  std::map<std::string, std::string> values;
  bool timing = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("preset", o.preset, "example1, example2 or custom")
      ->check(CLI::IsMember({"example1", "example2", "custom"}));
  cmd->add_option("--config", o.config_path, "INI configuration file")->check(CLI::ExistingFile);
  const std::pair<const char*, const char*> keys[] = {
      {"--geometry", "problem.geometry"}, {"--n", "problem.n"},
      {"--T", "problem.T"},               {"--nt", "problem.nt"},
      {"--nu1", "problem.nu1"},           {"--nu2", "problem.nu2"},
      {"--Pr", "problem.Pr"},             {"--Ra", "problem.Ra"},
      {"--alpha", "problem.alpha"},       {"--objective", "problem.objective"},
      {"--projection", "problem.projection"},
      {"--m", "optimizer.m"},             {"--tol", "optimizer.tol"},
      {"--max-iter", "optimizer.max_iter"}, {"--max-rho", "optimizer.max_rho"},
      {"--out", "output.dir"},            {"--snapshot-stride", "output.snapshot_stride"},
      {"--seed", "output.seed"},          {"--directions", "gradcheck.directions"},
      {"--gc-tol", "gradcheck.tol"},
  };
  for (const auto& [flag, key] : keys) {
    const std::string k = key;
    cmd->add_option_function<std::string>(flag, [&o, k](const std::string& v) { o.values[k] = v; },
                                          "overrides " + k);
  }
  cmd->add_flag("--timing", o.timing, "record wall time in history.csv");
}

bouss::cli::RunConfig resolve(const Overrides& o) {
  ptree tree;
  if (!o.config_path.empty()) {
    std::ifstream is(o.config_path);
    try {
      boost::property_tree::ini_parser::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw bouss::ConfigError(o.config_path + ":" + std::to_string(e.line()), e.message());
    }
  }
  if (!o.preset.empty()) tree.put(ptree::path_type("problem.preset", '.'), o.preset);
  const bool sets_nu = o.values.contains("problem.nu1") || o.values.contains("problem.nu2");
  const bool sets_prra = o.values.contains("problem.Pr") || o.values.contains("problem.Ra");
  if (auto problem = tree.get_child_optional("problem")) {
    if (sets_nu && !sets_prra) {
      problem->erase("Pr");
      problem->erase("Ra");
    }
    if (sets_prra && !sets_nu) {
      problem->erase("nu1");
      problem->erase("nu2");
    }
  }
  for (const auto& [key, value] : o.values) tree.put(ptree::path_type(key, '.'), value);
  if (o.timing) tree.put(ptree::path_type("output.timing", '.'), "true");
  return bouss::cli::parse_config(tree);
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = bouss::cli;
  CLI::App app{"Boundary heat-flux control of Boussinesq flow"};
  app.require_subcommand(1);

  Overrides run_o, base_o, grad_o, mesh_o;
  bool coarse = false;
  std::string mesh_file;
  CLI::App* run_cmd = app.add_subcommand("run", "optimize the control and write results");
  CLI::App* base_cmd = app.add_subcommand("baseline", "uncontrolled forward solve");
  CLI::App* grad_cmd = app.add_subcommand("gradcheck", "finite-difference check of the adjoint gradient");
  CLI::App* mesh_cmd = app.add_subcommand("mesh-dump", "write the mesh as text");
  add_common(run_cmd, run_o);
  add_common(base_cmd, base_o);
  add_common(grad_cmd, grad_o);
  add_common(mesh_cmd, mesh_o);
  mesh_cmd->add_flag("--coarse", coarse, "dump the coarse (pressure) mesh");
  mesh_cmd->add_option("--file", mesh_file, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kSuccess : cli::kConfigError;
  }

  try {
    if (run_cmd->parsed()) return cli::run(resolve(run_o), std::cerr);
    if (base_cmd->parsed()) return cli::baseline(resolve(base_o), std::cerr);
    if (grad_cmd->parsed()) return cli::gradcheck(resolve(grad_o), std::cerr);
    const cli::RunConfig config = resolve(mesh_o);
    if (mesh_file.empty()) return cli::mesh_dump(config, coarse, std::cout);
    std::ofstream os(mesh_file);
    if (!os) {
      std::cerr << "error: cannot write " << mesh_file << '\n';
      return 1;
    }
    return cli::mesh_dump(config, coarse, os);
  } catch (const bouss::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kConfigError;
  } catch (const bouss::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return cli::kSolverFailure;
  } catch (const bouss::NonfiniteObjective& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return cli::kSolverFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
