//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

#include "bouss/errors.hpp"
#include "config.hpp"
#include "runner.hpp"

using namespace bouss;
using namespace bouss::cli;
namespace fs = std::filesystem;

namespace {

int boussctl(const std::string& args) {
  const std::string cmd = std::string(BOUSSCTL_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bouss_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream s;
  s << is.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& path) {
  std::ifstream is(path);
  std::string line;
  std::getline(is, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::string error_field(const std::string& text) {
  try {
    parse_config_string(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST(Config, PresetDefaults) {
  const RunConfig c = parse_config_string("[problem]\npreset = example2\n");
  EXPECT_EQ(c.geometry, Geometry::Reactor);
  EXPECT_EQ(c.n, 12);
  EXPECT_EQ(c.final_time, 15.0);
  EXPECT_EQ(c.steps, 240);
  EXPECT_EQ(c.alpha, 1e-4);
  EXPECT_EQ(c.objective, Objective::Vorticity);
  EXPECT_EQ(c.m, 5);
  const RunConfig d = parse_config_string("");
  EXPECT_EQ(d.preset, Preset::Example1);
  EXPECT_EQ(d.alpha, 5e-5);
  EXPECT_EQ(d.m, 1);
  EXPECT_EQ(d.steps, 80);
  EXPECT_EQ(d.nu1, 0.01);
  EXPECT_EQ(d.nu2, 1.0 / 72.0);
}

TEST(Config, PrandtlRayleighDeriveDiffusivities) {
  const RunConfig c = parse_config_string("[problem]\nPr = 0.72\nRa = 7200\n");
  EXPECT_DOUBLE_EQ(c.nu1, 0.01);
  EXPECT_DOUBLE_EQ(c.nu2, 1.0 / 72.0);
}

TEST(Config, RoundTripIsIdentity) {
  const std::string inputs[] = {
      "",
      "[problem]\npreset = example2\nn = 18\nprojection = full\n[optimizer]\nmax_rho = 100\n",
      "[problem]\npreset = custom\ngeometry = square\nn = 6\nT = 0.3\nnt = 7\nPr = 0.7\nRa = 1e4\nalpha = 0.1\n"
      "objective = vorticity\n[output]\ndir = x/y\ntiming = true\nseed = 99\nsnapshot_stride = 3\n",
      "[problem]\nnu1 = 0.123456789012345678\nnu2 = 3.3e-7\n[gradcheck]\ndirections = 2\ntol = 1e-7\n",
  };
  for (const auto& text : inputs) {
    const RunConfig a = parse_config_string(text);
    const std::string ser = serialize_config(a);
    const RunConfig b = parse_config_string(ser);
    EXPECT_EQ(a, b) << ser;
    EXPECT_EQ(ser, serialize_config(b));
  }
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(error_field("[problem]\nn = 7\n"), "problem.n");
  EXPECT_EQ(error_field("[problem]\npreset = example2\nn = 8\n"), "problem.n");
  EXPECT_EQ(error_field("[problem]\nn = abc\n"), "problem.n");
  EXPECT_EQ(error_field("[problem]\nalpha = -1\n"), "problem.alpha");
  EXPECT_EQ(error_field("[problem]\nnu1 = 0.1\n"), "problem.nu2");
  EXPECT_EQ(error_field("[problem]\nnu1 = 0.1\nnu2 = 0.1\nPr = 1\nRa = 1\n"), "problem.Pr");
  EXPECT_EQ(error_field("[problem]\nRa = 1\n"), "problem.Pr");
  EXPECT_EQ(error_field("[problem]\nobjective = fastest\n"), "problem.objective");
  EXPECT_EQ(error_field("[problem]\npreset = example2\nobjective = tracking\n"), "problem.objective");
  EXPECT_EQ(error_field("[problem]\npreset = custom\ngeometry = square\n"), "problem.n");
  EXPECT_EQ(error_field("[problem]\ngeometry = square\n"), "problem.geometry");
  EXPECT_EQ(error_field("[problem]\nspeed = 3\n"), "problem.speed");
  EXPECT_EQ(error_field("[extras]\nx = 1\n"), "extras");
  EXPECT_EQ(error_field("[optimizer]\ntol = 0\n"), "optimizer.tol");
  EXPECT_EQ(error_field("[optimizer]\nm = 0\n"), "optimizer.m");
  EXPECT_EQ(error_field("[output]\ntiming = maybe\n"), "output.timing");
  EXPECT_EQ(error_field("[output]\nseed = -1\n"), "output.seed");
  EXPECT_EQ(error_field("[problem]\nT = inf\n"), "problem.T");
}

TEST(Config, SetupReflectsConfig) {
  const RunConfig c = parse_config_string("[problem]\nn = 4\nnt = 3\nT = 0.5\nalpha = 0.25\nprojection = full\n");
  const ProblemSetup s = make_setup(c);
  EXPECT_EQ(s.steps, 3);
  EXPECT_EQ(s.final_time, 0.5);
  EXPECT_EQ(s.alpha, 0.25);
  EXPECT_EQ(s.projection, ProjectionVariant::FullDirichlet);
  EXPECT_EQ(s.mesh->fine.num_nodes(), 25);
}

TEST(Cli, RunExampleOneEmitsArtifacts) {
  const fs::path dir = scratch("run1");
  ASSERT_EQ(boussctl("run example1 --n 16 --nt 32 --snapshot-stride 16 --out " + dir.string()), 0);
  for (const char* f : {"history.csv", "control_left.csv", "control_right.csv", "tracking_error.csv",
                        "vorticity.csv", "summary.csv", "config.ini", "snapshots/state_n0032.txt"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_EQ(read_file(dir / "history.csv").substr(0, 24), "k,J,grad_rel,rho,seconds");
  EXPECT_EQ(parse_config_file((dir / "config.ini").string()).steps, 32);
  const std::string summary = read_file(dir / "summary.csv");
  EXPECT_EQ(summary.substr(0, 10), "key,value\n");
  EXPECT_NE(summary.find("\nJ_final,"), std::string::npos);
}

TEST(Cli, RunsAreByteReproducible) {
  const fs::path a = scratch("repro_a");
  const fs::path b = scratch("repro_b");
  ASSERT_EQ(boussctl("run example1 --n 8 --nt 8 --max-iter 5 --out " + a.string()), 0);
  ASSERT_EQ(boussctl("run example1 --n 8 --nt 8 --max-iter 5 --out " + b.string()), 0);
  for (const char* f : {"history.csv", "control_left.csv", "summary.csv", "tracking_error.csv"}) {
    EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
  }
}

TEST(Cli, ExampleTwoControlsAreMirrorImages) {
  const fs::path dir = scratch("run2");
  ASSERT_EQ(boussctl("run example2 --n 12 --T 3 --nt 24 --max-iter 4 --out " + dir.string()), 0);
  const auto left = read_csv(dir / "control_left.csv");
  const auto right = read_csv(dir / "control_right.csv");
  ASSERT_EQ(left.size(), right.size());
  ASSERT_FALSE(left.empty());
  double scale = 0.0;
  for (const auto& row : left) scale = std::max(scale, std::abs(row[3]));
  EXPECT_GT(scale, 0.0);
  for (std::size_t i = 0; i < left.size(); ++i) {
    EXPECT_EQ(left[i][0], right[i][0]);
    EXPECT_EQ(left[i][2], right[i][2]);
    EXPECT_NEAR(left[i][3], right[i][3], 1e-8);
  }
}

TEST(Cli, BaselineTrackingErrorIsOne) {
  const fs::path dir = scratch("baseline");
  ASSERT_EQ(boussctl("baseline example1 --n 8 --nt 8 --out " + dir.string()), 0);
  for (const auto& row : read_csv(dir / "baseline_tracking_error.csv")) EXPECT_NEAR(row[2], 1.0, 1e-15);
  const fs::path dir2 = scratch("baseline2");
  ASSERT_EQ(boussctl("baseline example2 --n 12 --nt 60 --out " + dir2.string()), 0);
  double total = 0.0;
  for (const auto& row : read_csv(dir2 / "baseline_vorticity.csv")) total += row[2];
  EXPECT_GT(total, 0.0);
}

TEST(Cli, GradcheckExitCodes) {
  const fs::path dir = scratch("gradcheck");
  EXPECT_EQ(boussctl("gradcheck example1 --n 8 --nt 8 --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "gradcheck.csv"));
  EXPECT_TRUE(fs::exists(dir / "gradient_left.csv"));
  EXPECT_EQ(boussctl("gradcheck example1 --n 4 --nt 2 --directions 1 --gc-tol 1e-300 --out " + dir.string()), 4);
}

TEST(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(boussctl("run example1 --n 7"), 2);
  EXPECT_EQ(boussctl("run example1 --alpha -3"), 2);
  EXPECT_EQ(boussctl("run nowhere"), 2);
  EXPECT_EQ(boussctl("frobnicate"), 2);
  EXPECT_EQ(boussctl(""), 2);
  const fs::path dir = scratch("badconfig");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.ini") << "[problem]\nn = 8\nmystery = 1\n";
  EXPECT_EQ(boussctl("run --config " + (dir / "bad.ini").string()), 2);
}

TEST(Cli, SolverFailureExitsThree) {
  EXPECT_EQ(boussctl("baseline example1 --n 4 --nt 2 --nu1 1e308 --nu2 1 --out " + scratch("fail").string()), 3);
}

TEST(Cli, FlagsOverrideConfigFile) {
  const fs::path dir = scratch("override");
  fs::create_directories(dir);
  std::ofstream(dir / "c.ini") << "[problem]\nn = 4\nnt = 2\nT = 0.5\nnu1 = 0.5\nnu2 = 0.5\n[optimizer]\nmax_iter = 1\n"
                               << "[output]\ndir = " << (dir / "out").string() << "\n";
  ASSERT_EQ(boussctl("run --config " + (dir / "c.ini").string() + " --Pr 0.72 --Ra 7200 --nt 3"), 0);
  const RunConfig c = parse_config_file((dir / "out" / "config.ini").string());
  EXPECT_EQ(c.steps, 3);
  ASSERT_TRUE(c.pr_ra.has_value());
  EXPECT_DOUBLE_EQ(c.nu1, 0.01);
}

TEST(Cli, MeshDump) {
  const fs::path dir = scratch("mesh");
  fs::create_directories(dir);
  ASSERT_EQ(boussctl("mesh-dump example2 --n 6 --file " + (dir / "fine.txt").string()), 0);
  ASSERT_EQ(boussctl("mesh-dump example2 --n 6 --coarse --file " + (dir / "coarse.txt").string()), 0);
  const std::string fine = read_file(dir / "fine.txt");
  const std::string coarse = read_file(dir / "coarse.txt");
  EXPECT_NE(fine.find("b "), std::string::npos);
  EXPECT_NE(fine.find("SideWallLeft"), std::string::npos);
  EXPECT_GT(fine.size(), coarse.size());
}
