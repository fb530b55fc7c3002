//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#include "bouss/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace bouss {

namespace {

constexpr std::array<std::pair<SegmentTag, std::string_view>, 11> kTagNames{{
    {SegmentTag::Left, "Left"},
    {SegmentTag::Right, "Right"},
    {SegmentTag::Top, "Top"},
    {SegmentTag::Bottom, "Bottom"},
    {SegmentTag::Susceptor, "Susceptor"},
    {SegmentTag::SideWallLeft, "SideWallLeft"},
    {SegmentTag::SideWallRight, "SideWallRight"},
    {SegmentTag::InletWall, "InletWall"},
    {SegmentTag::Inlet, "Inlet"},
    {SegmentTag::OutletLeft, "OutletLeft"},
    {SegmentTag::OutletRight, "OutletRight"},
}};

std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

// Edges used by exactly one triangle, oriented as in that (CCW) triangle.
std::vector<std::array<int, 2>> topological_boundary(const std::vector<Triangle>& tris) {
  std::map<std::pair<int, int>, std::pair<int, std::array<int, 2>>> count;
  for (const auto& t : tris) {
    for (int e = 0; e < 3; ++e) {
      const int a = t[e];
      const int b = t[(e + 1) % 3];
      auto& entry = count[edge_key(a, b)];
      ++entry.first;
      entry.second = {a, b};
    }
  }
  std::vector<std::array<int, 2>> out;
  for (const auto& [key, entry] : count) {
    if (entry.first == 1) out.push_back(entry.second);
  }
  return out;
}

using Tagger = std::function<SegmentTag(Point a, Point b)>;

Mesh make_tagged(std::vector<Point> nodes, std::vector<Triangle> tris, const Tagger& tagger) {
  std::vector<BoundaryEdge> boundary;
  for (const auto& e : topological_boundary(tris)) {
    boundary.push_back({e, tagger(nodes[e[0]], nodes[e[1]])});
  }
  Mesh mesh(std::move(nodes), std::move(tris), std::move(boundary));
  mesh.validate();
  return mesh;
}

bool near(double a, double b) { return std::abs(a - b) < 1e-12; }

}  // namespace

std::string_view tag_name(SegmentTag tag) {
  for (const auto& [t, name] : kTagNames) {
    if (t == tag) return name;
  }
  return "Unknown";
}

std::optional<SegmentTag> parse_tag(std::string_view name) {
  for (const auto& [t, n] : kTagNames) {
    if (n == name) return t;
  }
  return std::nullopt;
}

SegmentTag mirror_tag(SegmentTag tag) {
  switch (tag) {
    case SegmentTag::Left: return SegmentTag::Right;
    case SegmentTag::Right: return SegmentTag::Left;
    case SegmentTag::SideWallLeft: return SegmentTag::SideWallRight;
    case SegmentTag::SideWallRight: return SegmentTag::SideWallLeft;
    case SegmentTag::OutletLeft: return SegmentTag::OutletRight;
    case SegmentTag::OutletRight: return SegmentTag::OutletLeft;
    default: return tag;
  }
}

Mesh::Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles,
           std::vector<BoundaryEdge> boundary)
    : nodes_(std::move(nodes)), triangles_(std::move(triangles)), boundary_(std::move(boundary)) {}

double Mesh::signed_area(int t) const {
  const auto& tri = triangles_[t];
  const Point& a = nodes_[tri[0]];
  const Point& b = nodes_[tri[1]];
  const Point& c = nodes_[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double Mesh::total_area() const {
  double sum = 0.0;
  for (int t = 0; t < num_triangles(); ++t) sum += signed_area(t);
  return sum;
}

double Mesh::tag_length(const TagSet& tags) const {
  double len = 0.0;
  for (const auto& e : boundary_) {
    if (!tags.contains(e.tag)) continue;
    const Point& a = nodes_[e.nodes[0]];
    const Point& b = nodes_[e.nodes[1]];
    len += std::hypot(b.x - a.x, b.y - a.y);
  }
  return len;
}

std::vector<int> Mesh::nodes_with_tags(const TagSet& tags) const {
  std::set<int> found;
  for (const auto& e : boundary_) {
    if (tags.contains(e.tag)) found.insert(e.nodes.begin(), e.nodes.end());
  }
  return {found.begin(), found.end()};
}

TagSet Mesh::node_tags(int node) const {
  TagSet tags;
  for (const auto& e : boundary_) {
    if (e.nodes[0] == node || e.nodes[1] == node) tags.insert(e.tag);
  }
  return tags;
}

bool Mesh::has_tag(SegmentTag tag) const {
  return std::any_of(boundary_.begin(), boundary_.end(),
                     [tag](const BoundaryEdge& e) { return e.tag == tag; });
}

void Mesh::validate() const {
  for (int t = 0; t < num_triangles(); ++t) {
    for (int k : triangles_[t]) {
      if (k < 0 || k >= num_nodes()) {
        throw std::invalid_argument("triangle " + std::to_string(t) + " references a missing node");
      }
    }
    if (!(signed_area(t) > 0.0)) {
      throw std::invalid_argument("triangle " + std::to_string(t) + " has nonpositive area");
    }
  }

  auto topo = topological_boundary(triangles_);
  std::set<std::pair<int, int>> expected;
  for (const auto& e : topo) expected.insert(edge_key(e[0], e[1]));
  std::set<std::pair<int, int>> given;
  std::map<int, int> balance;
  for (const auto& e : boundary_) {
    if (!given.insert(edge_key(e.nodes[0], e.nodes[1])).second) {
      throw std::invalid_argument("duplicate boundary edge");
    }
    ++balance[e.nodes[0]];
    --balance[e.nodes[1]];
  }
  if (given != expected) {
    throw std::invalid_argument("boundary edges do not cover the mesh boundary exactly");
  }
  for (const auto& [node, b] : balance) {
    if (b != 0) throw std::invalid_argument("boundary edges do not form closed loops");
  }
}

Refinement refine_midpoint(const Mesh& coarse) {
  Refinement r;
  std::vector<Point> nodes = coarse.nodes();
  r.coarse_node_embed.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) r.coarse_node_embed[i] = static_cast<int>(i);

  auto midpoint = [&](int a, int b) {
    auto key = edge_key(a, b);
    auto it = r.edge_midpoint.find(key);
    if (it != r.edge_midpoint.end()) return it->second;
    const Point& pa = coarse.nodes()[a];
    const Point& pb = coarse.nodes()[b];
    nodes.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
    const int id = static_cast<int>(nodes.size()) - 1;
    r.edge_midpoint.emplace(key, id);
    return id;
  };

  std::vector<Triangle> tris;
  tris.reserve(4 * coarse.triangles().size());
  for (int t = 0; t < coarse.num_triangles(); ++t) {
    const auto& [a, b, c] = coarse.triangles()[t];
    const int ab = midpoint(a, b);
    const int bc = midpoint(b, c);
    const int ca = midpoint(c, a);
    tris.push_back({a, ab, ca});
    tris.push_back({ab, b, bc});
    tris.push_back({ca, bc, c});
    tris.push_back({ab, bc, ca});
    r.parent.insert(r.parent.end(), 4, t);
  }

  std::vector<BoundaryEdge> boundary;
  for (const auto& e : coarse.boundary_edges()) {
    const int m = r.edge_midpoint.at(edge_key(e.nodes[0], e.nodes[1]));
    boundary.push_back({{e.nodes[0], m}, e.tag});
    boundary.push_back({{m, e.nodes[1]}, e.tag});
  }
  r.fine = Mesh(std::move(nodes), std::move(tris), std::move(boundary));
  r.fine.validate();
  return r;
}

MeshPair MeshPair::from_coarse(Mesh coarse) {
  Refinement r = refine_midpoint(coarse);
  MeshPair pair;
  pair.coarse = std::move(coarse);
  pair.fine = std::move(r.fine);
  pair.edge_midpoint = std::move(r.edge_midpoint);
  pair.coarse_node_embed = std::move(r.coarse_node_embed);
  pair.fine_parent = std::move(r.parent);
  return pair;
}

MeshPair build_unit_square(int n) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("unit square needs an even subdivision count n >= 2, got " +
                                std::to_string(n));
  }
  const int nc = n / 2;
  std::vector<Point> nodes;
  for (int j = 0; j <= nc; ++j) {
    for (int i = 0; i <= nc; ++i) {
      nodes.push_back({static_cast<double>(i) / nc, static_cast<double>(j) / nc});
    }
  }
  auto id = [nc](int i, int j) { return j * (nc + 1) + i; };
  std::vector<Triangle> tris;
  for (int j = 0; j < nc; ++j) {
    for (int i = 0; i < nc; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  auto tagger = [](Point a, Point b) {
    const Point m{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    if (near(a.x, 0.0) && near(b.x, 0.0)) return SegmentTag::Left;
    if (near(a.x, 1.0) && near(b.x, 1.0)) return SegmentTag::Right;
    if (near(m.y, 0.0)) return SegmentTag::Bottom;
    return SegmentTag::Top;
  };
  return MeshPair::from_coarse(make_tagged(std::move(nodes), std::move(tris), tagger));
}

MeshPair build_reactor(int n) {
  if (n <= 0 || n % 6 != 0) {
    throw std::invalid_argument("reactor needs n divisible by 6, got " + std::to_string(n));
  }
  const int nc = n / 2;
  const int third = nc / 3;
  const int jmax = nc + third;

  auto in_cell = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= nc || j >= jmax) return false;
    if (j < nc) return true;
    return i >= third && i < 2 * third;
  };

  std::map<std::pair<int, int>, int> grid;
  std::vector<Point> nodes;
  for (int j = 0; j <= jmax; ++j) {
    for (int i = 0; i <= nc; ++i) {
      if (in_cell(i, j) || in_cell(i - 1, j) || in_cell(i, j - 1) || in_cell(i - 1, j - 1)) {
        grid[{i, j}] = static_cast<int>(nodes.size());
        nodes.push_back({static_cast<double>(i) / nc, static_cast<double>(j) / nc});
      }
    }
  }

  // Diagonals mirror about x = 1/2; a cell straddling the axis gets a centre
  // node so the triangulation is reflection-symmetric.
  std::vector<Triangle> tris;
  for (int j = 0; j < jmax; ++j) {
    for (int i = 0; i < nc; ++i) {
      if (!in_cell(i, j)) continue;
      const int a = grid.at({i, j});
      const int b = grid.at({i + 1, j});
      const int c = grid.at({i + 1, j + 1});
      const int d = grid.at({i, j + 1});
      if (2 * i + 1 < nc) {
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      } else if (2 * i + 1 > nc) {
        tris.push_back({a, b, d});
        tris.push_back({b, c, d});
      } else {
        nodes.push_back({(i + 0.5) / nc, (j + 0.5) / nc});
        const int m = static_cast<int>(nodes.size()) - 1;
        tris.push_back({a, b, m});
        tris.push_back({b, c, m});
        tris.push_back({c, d, m});
        tris.push_back({d, a, m});
      }
    }
  }

  auto tagger = [](Point a, Point b) {
    const Point m{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    const bool vertical = near(a.x, b.x);
    if (!vertical && near(m.y, 0.0)) return SegmentTag::Susceptor;
    if (vertical && near(m.x, 0.0)) return SegmentTag::SideWallLeft;
    if (vertical && near(m.x, 1.0)) return SegmentTag::SideWallRight;
    if (vertical) return SegmentTag::InletWall;
    if (near(m.y, 1.0)) return m.x < 0.5 ? SegmentTag::OutletLeft : SegmentTag::OutletRight;
    return SegmentTag::Inlet;
  };
  return MeshPair::from_coarse(make_tagged(std::move(nodes), std::move(tris), tagger));
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os.precision(17);
  for (const auto& p : mesh.nodes()) os << "v " << p.x << ' ' << p.y << '\n';
  for (const auto& t : mesh.triangles()) os << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundary_edges()) {
    os << "b " << e.nodes[0] << ' ' << e.nodes[1] << ' ' << tag_name(e.tag) << '\n';
  }
}

}  // namespace bouss
