//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

namespace bouss {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Named boundary pieces. The first four belong to the unit-square cavity,
/// the rest to the reactor geometry.
enum class SegmentTag : std::uint8_t {
  Left,
  Right,
  Top,
  Bottom,
  Susceptor,
  SideWallLeft,
  SideWallRight,
  InletWall,
  Inlet,
  OutletLeft,
  OutletRight,
};

std::string_view tag_name(SegmentTag tag);
std::optional<SegmentTag> parse_tag(std::string_view name);

/// Tag of the mirror-image segment under x -> 1 - x.
SegmentTag mirror_tag(SegmentTag tag);

using TagSet = std::set<SegmentTag>;

struct BoundaryEdge {
  std::array<int, 2> nodes;
  SegmentTag tag;
};

using Triangle = std::array<int, 3>;

class Mesh {
public:
  Mesh() = default;
  Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles,
       std::vector<BoundaryEdge> boundary);

  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }

  double signed_area(int t) const;
  double area(int t) const { return signed_area(t); }
  double total_area() const;

  /// Sum of boundary-edge lengths carrying one of `tags`.
  double tag_length(const TagSet& tags) const;

  /// Sorted node indices lying on an edge with one of `tags`.
  std::vector<int> nodes_with_tags(const TagSet& tags) const;

  /// Tags of all boundary edges touching `node` (empty for interior nodes).
  TagSet node_tags(int node) const;

  bool has_tag(SegmentTag tag) const;

  /// Throws std::invalid_argument when an invariant is broken: nonpositive
  /// triangle area, boundary edges not forming closed loops over exactly the
  /// topological boundary, or untagged boundary nodes.
  void validate() const;

private:
  std::vector<Point> nodes_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryEdge> boundary_;
};

struct Refinement {
  Mesh fine;
  /// (min, max) coarse node pair -> fine midpoint node.
  std::map<std::pair<int, int>, int> edge_midpoint;
  /// coarse node -> fine node (identity: coarse nodes come first).
  std::vector<int> coarse_node_embed;
  /// fine triangle -> coarse parent triangle.
  std::vector<int> parent;
};

/// Split every triangle into four by joining edge midpoints.
Refinement refine_midpoint(const Mesh& coarse);

/// Coarse (size H) and fine (size H/2) triangulations of one domain.
struct MeshPair {
  Mesh coarse;
  Mesh fine;
  std::map<std::pair<int, int>, int> edge_midpoint;
  std::vector<int> coarse_node_embed;
  std::vector<int> fine_parent;

  static MeshPair from_coarse(Mesh coarse);
};

/// Unit square with `n` fine subdivisions per side (n even, coarse n/2).
MeshPair build_unit_square(int n);

/// Reactor: unit square plus the inlet channel [1/3,2/3] x [1,4/3].
/// `n` fine subdivisions per unit length, divisible by 6.
MeshPair build_reactor(int n);

/// Plain-text dump: `v x y`, `t i j k`, `b i j TAG`, one record per line.
void write_mesh(std::ostream& os, const Mesh& mesh);

}  // namespace bouss
