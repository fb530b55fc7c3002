//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "bouss/errors.hpp"

namespace bouss::cli {

namespace {

using boost::property_tree::ptree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"problem", {"preset", "geometry", "n", "T", "nt", "nu1", "nu2", "Pr", "Ra", "alpha", "objective", "projection"}},
      {"optimizer", {"m", "tol", "max_iter", "max_rho"}},
      {"output", {"dir", "snapshot_stride", "timing", "seed"}},
      {"gradcheck", {"directions", "tol"}},
  };
  return keys;
}

std::optional<std::string> raw(const ptree& tree, const std::string& path) {
  const auto value = tree.get_optional<std::string>(ptree::path_type(path, '.'));
  if (!value) return std::nullopt;
  return *value;
}

std::optional<double> get_double(const ptree& tree, const std::string& path) {
  auto s = raw(tree, path);
  if (!s) return std::nullopt;
  try {
    std::size_t pos = 0;
    const double x = std::stod(*s, &pos);
    if (pos != s->size() || !std::isfinite(x)) throw std::invalid_argument(*s);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(path, "expected a finite number, got '" + *s + "'");
  }
}

std::optional<long long> get_integer(const ptree& tree, const std::string& path) {
  auto s = raw(tree, path);
  if (!s) return std::nullopt;
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(*s, &pos);
    if (pos != s->size()) throw std::invalid_argument(*s);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(path, "expected an integer, got '" + *s + "'");
  }
}

std::optional<int> get_int(const ptree& tree, const std::string& path) {
  auto x = get_integer(tree, path);
  if (!x) return std::nullopt;
  if (*x < -1000000000LL || *x > 1000000000LL) throw ConfigError(path, "integer out of range");
  return static_cast<int>(*x);
}

std::optional<bool> get_bool(const ptree& tree, const std::string& path) {
  auto s = raw(tree, path);
  if (!s) return std::nullopt;
  if (*s == "true" || *s == "1") return true;
  if (*s == "false" || *s == "0") return false;
  throw ConfigError(path, "expected true or false, got '" + *s + "'");
}

template <typename E>
std::optional<E> get_enum(const ptree& tree, const std::string& path, const std::map<std::string, E>& names) {
  auto s = raw(tree, path);
  if (!s) return std::nullopt;
  auto it = names.find(*s);
  if (it == names.end()) {
    std::string options;
    for (const auto& [name, value] : names) options += (options.empty() ? "" : ", ") + name;
    throw ConfigError(path, "unknown value '" + *s + "' (expected one of " + options + ")");
  }
  return it->second;
}

const std::map<std::string, Preset> kPresets = {
    {"example1", Preset::Example1}, {"example2", Preset::Example2}, {"custom", Preset::Custom}};
const std::map<std::string, Geometry> kGeometries = {{"square", Geometry::Square}, {"reactor", Geometry::Reactor}};
const std::map<std::string, Objective> kObjectives = {{"tracking", Objective::Tracking},
                                                      {"vorticity", Objective::Vorticity}};
const std::map<std::string, ProjectionVariant> kProjections = {{"normal", ProjectionVariant::NormalTrace},
                                                               {"full", ProjectionVariant::FullDirichlet}};

template <typename E>
std::string name_of(const std::map<std::string, E>& names, E value) {
  for (const auto& [name, v] : names) {
    if (v == value) return name;
  }
  return "?";
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <typename T>
T required(std::optional<T> value, const std::string& path) {
  if (!value) throw ConfigError(path, "required for preset custom");
  return *value;
}

}  // namespace

std::string to_string(Preset preset) { return name_of(kPresets, preset); }
std::string to_string(Objective objective) { return name_of(kObjectives, objective); }
std::string to_string(ProjectionVariant projection) { return name_of(kProjections, projection); }

RunConfig parse_config(const ptree& tree) {
  for (const auto& [section, body] : tree) {
    auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError(section, "unknown section");
    if (!body.data().empty() && body.empty()) throw ConfigError(section, "key outside of a section");
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) throw ConfigError(section + "." + key, "unknown key");
    }
  }

  RunConfig c;
  c.preset = get_enum(tree, "problem.preset", kPresets).value_or(Preset::Example1);
  const bool custom = c.preset == Preset::Custom;

  if (custom) {
    c.geometry = required(get_enum(tree, "problem.geometry", kGeometries), "problem.geometry");
  } else {
    if (raw(tree, "problem.geometry")) throw ConfigError("problem.geometry", "only valid with preset custom");
    c.geometry = c.preset == Preset::Example1 ? Geometry::Square : Geometry::Reactor;
  }
  const bool square = c.geometry == Geometry::Square;

  if (custom) {
    c.n = required(get_int(tree, "problem.n"), "problem.n");
    c.final_time = required(get_double(tree, "problem.T"), "problem.T");
    c.steps = required(get_int(tree, "problem.nt"), "problem.nt");
    c.alpha = required(get_double(tree, "problem.alpha"), "problem.alpha");
  } else {
    c.n = get_int(tree, "problem.n").value_or(square ? 16 : 12);
    c.final_time = get_double(tree, "problem.T").value_or(square ? 5.0 : 15.0);
    c.steps = get_int(tree, "problem.nt").value_or(static_cast<int>(std::lround(16.0 * c.final_time)));
    c.alpha = get_double(tree, "problem.alpha").value_or(square ? 5e-5 : 1e-4);
  }

  const auto nu1 = get_double(tree, "problem.nu1");
  const auto nu2 = get_double(tree, "problem.nu2");
  const auto pr = get_double(tree, "problem.Pr");
  const auto ra = get_double(tree, "problem.Ra");
  const bool has_nu = nu1 || nu2;
  const bool has_prra = pr || ra;
  if (has_nu && has_prra) throw ConfigError("problem.Pr", "give either nu1/nu2 or Pr/Ra, not both");
  if (has_nu && !(nu1 && nu2)) throw ConfigError(nu1 ? "problem.nu2" : "problem.nu1", "nu1 and nu2 go together");
  if (has_prra && !(pr && ra)) throw ConfigError(pr ? "problem.Ra" : "problem.Pr", "Pr and Ra go together");
  if (has_prra) {
    if (!(*pr > 0.0)) throw ConfigError("problem.Pr", "must be positive");
    if (!(*ra > 0.0)) throw ConfigError("problem.Ra", "must be positive");
    c.pr_ra = std::make_pair(*pr, *ra);
    c.nu1 = std::sqrt(*pr / *ra);
    c.nu2 = 1.0 / std::sqrt(*ra * *pr);
  } else if (has_nu) {
    c.nu1 = *nu1;
    c.nu2 = *nu2;
  } else if (custom) {
    throw ConfigError("problem.nu1", "diffusivities (nu1/nu2 or Pr/Ra) required for preset custom");
  } else {
    c.nu1 = 1.0 / 100.0;
    c.nu2 = 1.0 / 72.0;
  }

  c.objective = get_enum(tree, "problem.objective", kObjectives)
                    .value_or(square ? Objective::Tracking : Objective::Vorticity);
  c.projection = get_enum(tree, "problem.projection", kProjections).value_or(ProjectionVariant::NormalTrace);

  c.m = get_int(tree, "optimizer.m").value_or(square ? 1 : 5);
  c.tol = get_double(tree, "optimizer.tol").value_or(5e-3);
  c.max_iter = get_int(tree, "optimizer.max_iter").value_or(200);
  c.max_rho = get_double(tree, "optimizer.max_rho");

  c.dir = raw(tree, "output.dir").value_or("out");
  c.snapshot_stride = get_int(tree, "output.snapshot_stride").value_or(0);
  c.timing = get_bool(tree, "output.timing").value_or(false);
  if (auto seed = get_integer(tree, "output.seed")) {
    if (*seed < 0) throw ConfigError("output.seed", "must be nonnegative");
    c.seed = static_cast<std::uint64_t>(*seed);
  }

  c.gradcheck_directions = get_int(tree, "gradcheck.directions").value_or(5);
  c.gradcheck_tol = get_double(tree, "gradcheck.tol").value_or(1e-5);

  if (square && (c.n < 2 || c.n % 2 != 0)) throw ConfigError("problem.n", "must be even and at least 2 on the square");
  if (!square && (c.n < 6 || c.n % 6 != 0)) throw ConfigError("problem.n", "must be a positive multiple of 6 on the reactor");
  if (!(c.final_time > 0.0)) throw ConfigError("problem.T", "must be positive");
  if (c.steps < 1) throw ConfigError("problem.nt", "must be at least 1");
  if (!(c.nu1 > 0.0)) throw ConfigError("problem.nu1", "must be positive");
  if (!(c.nu2 > 0.0)) throw ConfigError("problem.nu2", "must be positive");
  if (!(c.alpha > 0.0)) throw ConfigError("problem.alpha", "must be positive");
  if (!square && c.objective == Objective::Tracking) {
    throw ConfigError("problem.objective", "tracking needs a target velocity, which the reactor geometry lacks");
  }
  if (c.m < 1) throw ConfigError("optimizer.m", "must be at least 1");
  if (!(c.tol > 0.0)) throw ConfigError("optimizer.tol", "must be positive");
  if (c.max_iter < 0) throw ConfigError("optimizer.max_iter", "must be nonnegative");
  if (c.max_rho && !(*c.max_rho > 0.0)) throw ConfigError("optimizer.max_rho", "must be positive");
  if (c.dir.empty()) throw ConfigError("output.dir", "must not be empty");
  if (c.snapshot_stride < 0) throw ConfigError("output.snapshot_stride", "must be nonnegative");
  if (c.gradcheck_directions < 1) throw ConfigError("gradcheck.directions", "must be at least 1");
  if (!(c.gradcheck_tol > 0.0)) throw ConfigError("gradcheck.tol", "must be positive");
  return c;
}

RunConfig parse_config_string(const std::string& text) {
  ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), e.message());
  }
  return parse_config(tree);
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path, "cannot open config file");
  std::stringstream text;
  text << is.rdbuf();
  return parse_config_string(text.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[problem]\n";
  os << "preset = " << to_string(c.preset) << '\n';
  if (c.preset == Preset::Custom) os << "geometry = " << name_of(kGeometries, c.geometry) << '\n';
  os << "n = " << c.n << '\n';
  os << "T = " << fmt(c.final_time) << '\n';
  os << "nt = " << c.steps << '\n';
  if (c.pr_ra) {
    os << "Pr = " << fmt(c.pr_ra->first) << '\n';
    os << "Ra = " << fmt(c.pr_ra->second) << '\n';
  } else {
    os << "nu1 = " << fmt(c.nu1) << '\n';
    os << "nu2 = " << fmt(c.nu2) << '\n';
  }
  os << "alpha = " << fmt(c.alpha) << '\n';
  os << "objective = " << to_string(c.objective) << '\n';
  os << "projection = " << to_string(c.projection) << '\n';
  os << "\n[optimizer]\n";
  os << "m = " << c.m << '\n';
  os << "tol = " << fmt(c.tol) << '\n';
  os << "max_iter = " << c.max_iter << '\n';
  if (c.max_rho) os << "max_rho = " << fmt(*c.max_rho) << '\n';
  os << "\n[output]\n";
  os << "dir = " << c.dir << '\n';
  os << "snapshot_stride = " << c.snapshot_stride << '\n';
  os << "timing = " << (c.timing ? "true" : "false") << '\n';
  os << "seed = " << c.seed << '\n';
  os << "\n[gradcheck]\n";
  os << "directions = " << c.gradcheck_directions << '\n';
  os << "tol = " << fmt(c.gradcheck_tol) << '\n';
  return os.str();
}

ProblemSetup make_setup(const RunConfig& c) {
  ProblemSetup s = c.geometry == Geometry::Square ? example1(c.n, c.steps, c.final_time)
                                                  : example2(c.n, c.steps, c.final_time);
  s.nu1 = c.nu1;
  s.nu2 = c.nu2;
  s.alpha = c.alpha;
  s.objective = c.objective;
  s.projection = c.projection;
  return s;
}

}  // namespace bouss::cli
