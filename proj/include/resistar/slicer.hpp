#pragma once

// Cuts the resistar by d-3 hyperplanes. What remains of each simplex is a
// convex polygon in the 3D subspace left free by the planes.

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "resistar/boundary.hpp"

namespace resistar {

struct Hyperplane {
  Point normal;
  double offset = 0.0;
  int axis = -1;  // 0-based axis for axis-aligned planes, -1 otherwise

  static Hyperplane axis_aligned(int dim, int axis, double value);
  static Hyperplane general(Point normal, double offset);
  double eval(std::span<const double> x) const;
};

/// "k=value" with a 1-based axis k, e.g. "4=0.46" or "x4=0.46".
Hyperplane parse_axis_plane(const std::string& text, int dim);

struct SlicePolygon {
  std::vector<std::array<double, 3>> vertices;  // convex, in boundary order
  MultiIndex cube;
  int simplex_index = -1;   // Kuhn permutation rank, -1 for cube variant
  std::uint64_t ordinal = 0;  // simplex ordinal within its cube
};

struct SliceMesh {
  int dim = 0;
  /// Output coordinate i is the dot product with basis[i] (unit vectors of
  /// the free axes when every plane is axis-aligned).
  std::array<Point, 3> basis;
  std::vector<int> free_axes;  // empty unless all planes are axis-aligned
  std::vector<SlicePolygon> polygons;
};

SliceMesh slice(const BoundaryStore& store, std::span<const Hyperplane> planes, std::size_t workers = 0);

enum class MeshFormat { Obj, Json };

MeshFormat mesh_format_from_string(const std::string& tag);

/// OBJ: "v x y z" lines (deduplicated at 1e-9) then "f i j k ..." 1-based.
void export_mesh(const SliceMesh& mesh, MeshFormat format, std::ostream& out);

}  // namespace resistar
