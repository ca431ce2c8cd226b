#pragma once

// Regular grid over [0,1]^d: vertex and cube indexing, the face lattice of a
// cube, and the Kuhn (Freudenthal) triangulation of a cube into d! simplices.

#include <compare>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace resistar {

/// A vertex of a single cube, one bit per axis (bit k set = upper side on axis k).
using VertexMask = std::uint32_t;

using MultiIndex = std::vector<int>;

/// Largest supported dimension; cube-local vertices are 32-bit masks.
inline constexpr int kMaxDimension = 24;

struct VertexId {
  std::uint64_t linear = 0;
  auto operator<=>(const VertexId&) const = default;
};

/// Identified by its minimal corner. Linear order equals lexicographic order
/// of the multi-index (axis 0 most significant).
struct CubeId {
  std::uint64_t linear = 0;
  auto operator<=>(const CubeId&) const = default;
};

class GridSpec {
 public:
  GridSpec(int dim, int points_per_axis);

  int dim() const { return dim_; }
  int points_per_axis() const { return points_; }
  /// Distance between adjacent grid points, 1/(n_G - 1).
  double epsilon() const { return epsilon_; }
  VertexMask full_mask() const { return (VertexMask{1} << dim_) - 1; }

  std::uint64_t vertex_count() const { return vertex_count_; }
  std::uint64_t cube_count() const { return cube_count_; }

  VertexId vertex_id(std::span<const int> index) const;
  MultiIndex vertex_index(VertexId v) const;
  CubeId cube_id(std::span<const int> index) const;
  MultiIndex cube_index(CubeId c) const;

  bool valid_vertex(std::span<const int> index) const;
  bool valid_cube(std::span<const int> index) const;

  /// Real coordinate of grid line `index` on any axis.
  double coordinate(int index) const { return static_cast<double>(index) / (points_ - 1); }
  std::vector<double> vertex_coordinates(VertexId v) const;

  /// Global vertex of cube `c` selected by a local mask.
  VertexId cube_vertex(CubeId c, VertexMask local) const;
  /// Centre point of cube `c`.
  std::vector<double> cube_centre(CubeId c) const;
  /// x rescaled so that cube `c` maps to [0,1]^d. No range check.
  void to_local(CubeId c, std::span<const double> x, std::span<double> local) const;
  void to_global(CubeId c, std::span<const double> local, std::span<double> x) const;

  std::uint64_t vertex_stride(int axis) const { return vertex_strides_[axis]; }
  std::uint64_t cube_stride(int axis) const { return cube_strides_[axis]; }

  bool operator==(const GridSpec& other) const {
    return dim_ == other.dim_ && points_ == other.points_;
  }

 private:
  int dim_;
  int points_;
  double epsilon_;
  std::uint64_t vertex_count_;
  std::uint64_t cube_count_;
  std::vector<std::uint64_t> vertex_strides_;
  std::vector<std::uint64_t> cube_strides_;
};

/// A face of a cube, stored intrinsically: the set of free axes plus the
/// fixed side (0/1) of every other axis. Offset bits on free axes are zero.
struct FaceCode {
  VertexMask free_axes = 0;
  VertexMask offsets = 0;

  int dim() const;
  /// True when the cube-local vertex belongs to this face.
  bool contains(VertexMask vertex) const { return ((vertex ^ offsets) & ~free_axes) == 0; }
  /// Face of dimension 0 at a vertex.
  static FaceCode at_vertex(VertexMask vertex) { return {0, vertex}; }
  static FaceCode whole_cube(int dim) { return {(VertexMask{1} << dim) - 1, 0}; }

  auto operator<=>(const FaceCode&) const = default;
};

/// Simplex S_P of the Kuhn triangulation. `perm` is 0-based: the local
/// coordinates of points of S_P satisfy x[perm[0]] <= ... <= x[perm[d-1]].
struct KuhnSimplexRef {
  CubeId cube;
  std::vector<int> perm;
};

/// A face of a Kuhn simplex as its vertex chain (cube-local masks, each a
/// subset of the next).
struct SimplexFace {
  CubeId cube;
  std::vector<VertexMask> vertices;
};

/// Local vertex pair with `lower` dominated by `upper` (lower is a subset of upper).
struct LocalEdge {
  VertexMask lower;
  VertexMask upper;
  bool operator==(const LocalEdge&) const = default;
};

CubeId cube_of_point(const GridSpec& grid, std::span<const double> x);

KuhnSimplexRef kuhn_simplex_of_point(const GridSpec& grid, CubeId cube, std::span<const double> x);

/// Vertex chain V_0 = 0 ⊂ V_1 ⊂ ... ⊂ V_d = full of the Kuhn simplex with
/// permutation `perm`; V_j holds the j axes with the largest coordinates.
std::vector<VertexMask> kuhn_chain(std::span<const int> perm);

/// Axis-aligned edges of a cube in cube-local form (d·2^{d-1} of them).
std::vector<LocalEdge> cube_edge_masks(int dim);
/// All dominance-comparable vertex pairs of a cube (3^d - 2^d of them): the
/// union of the edges of the d! Kuhn simplices.
std::vector<LocalEdge> kuhn_edge_masks(int dim);

std::vector<std::pair<VertexId, VertexId>> cube_edges(const GridSpec& grid, CubeId cube);
std::vector<std::pair<VertexId, VertexId>> kuhn_edges(const GridSpec& grid, CubeId cube);

/// All i-dimensional faces of `face`.
std::vector<FaceCode> subfaces(FaceCode face, int i);

}  // namespace resistar
