//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>

#include <boost/property_tree/ptree.hpp>

#include "bouss/problem.hpp"

namespace bouss::cli {

enum class Preset { Example1, Example2, Custom };
enum class Geometry { Square, Reactor };

/// Fully resolved run configuration. Every key has a concrete value after
/// parsing; preset defaults fill whatever the file and flags leave open.
struct RunConfig {
  Preset preset = Preset::Example1;
  Geometry geometry = Geometry::Square;
  int n = 16;
  double final_time = 5.0;
  int steps = 80;
  double nu1 = 0.01;
  double nu2 = 1.0 / 72.0;
  /// Set when the diffusivities were derived from (Pr, Ra).
  std::optional<std::pair<double, double>> pr_ra;
  double alpha = 5e-5;
  Objective objective = Objective::Tracking;
  ProjectionVariant projection = ProjectionVariant::NormalTrace;

  int m = 1;
  double tol = 5e-3;
  int max_iter = 200;
  std::optional<double> max_rho;

  std::string dir = "out";
  int snapshot_stride = 0;
  bool timing = false;
  std::uint64_t seed = 1;

  int gradcheck_directions = 5;
  double gradcheck_tol = 1e-5;

  bool operator==(const RunConfig&) const = default;
};

/// Keys accepted in each INI section.
///   [problem]   preset geometry n T nt nu1 nu2 Pr Ra alpha objective projection
///   [optimizer] m tol max_iter max_rho
///   [output]    dir snapshot_stride timing seed
///   [gradcheck] directions tol
/// Throws ConfigError naming the offending key path.
RunConfig parse_config(const boost::property_tree::ptree& tree);
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_string(const std::string& text);

/// INI text that parses back to an identical RunConfig.
std::string serialize_config(const RunConfig& config);

/// Problem instance described by the configuration.
ProblemSetup make_setup(const RunConfig& config);

std::string to_string(Preset preset);
std::string to_string(Objective objective);
std::string to_string(ProjectionVariant projection);

}  // namespace bouss::cli
