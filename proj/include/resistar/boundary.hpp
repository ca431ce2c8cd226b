#pragma once

// Boundary points: oracle sign changes on grid edges (cube variant) or on the
// edges of the Kuhn simplices (Kuhn variant), located by successive
// dichotomies and kept in a sparse per-cube store.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "resistar/grid.hpp"
#include "resistar/oracle.hpp"

namespace resistar {

enum class Variant { Cube, Kuhn };

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view s);

/// A boundary point, expressed relative to the cube that lists it. The point is
/// v_minus + t·(v_plus - v_minus) with t = (i + 0.5) / 2^q.
struct BoundaryPoint {
  VertexMask minus = 0;  // endpoint labelled -1
  VertexMask plus = 0;   // endpoint labelled +1
  double t = 0.5;

  /// Endpoints ordered by dominance.
  VertexMask lower() const { return minus & plus; }
  VertexMask upper() const { return minus | plus; }
};

struct CubeBoundary {
  CubeId cube;
  std::vector<BoundaryPoint> points;
};

/// Immutable sparse map cube -> boundary points. Cubes without points are
/// absent; cubes are kept in ascending id (lexicographic) order, and points
/// within a cube in ascending order of their global edge, so any face shared
/// by two cubes sees its points in the same order from both.
class BoundaryStore {
 public:
  BoundaryStore(GridSpec grid, Variant variant, int q, std::string oracle_digest, Label fallback_label,
                std::vector<CubeBoundary> cubes, bool diagonal_refinement = false);

  const GridSpec& grid() const { return grid_; }
  Variant variant() const { return variant_; }
  int q() const { return q_; }
  bool diagonal_refinement() const { return diagonal_refinement_; }
  const std::string& oracle_digest() const { return oracle_digest_; }
  /// Sanitized label of the origin vertex; the classification everywhere when
  /// the store is empty.
  Label fallback_label() const { return fallback_label_; }

  bool empty() const { return cubes_.empty(); }
  std::span<const CubeBoundary> cubes() const { return cubes_; }
  /// Null when the cube holds no boundary point.
  const std::vector<BoundaryPoint>* find(CubeId c) const;
  /// Sum over cubes of their point counts (shared points counted per cube).
  std::size_t point_incidences() const;

 private:
  GridSpec grid_;
  Variant variant_;
  int q_;
  bool diagonal_refinement_;
  std::string oracle_digest_;
  Label fallback_label_;
  std::vector<CubeBoundary> cubes_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

struct BuildOptions {
  int q = 0;  // 0 selects default_dichotomies(grid)
  /// Kuhn variant: ceil(log2(sqrt(k))) extra dichotomies on an edge spanning k axes.
  bool diagonal_refinement = false;
  std::size_t workers = 0;
};

/// Smallest q with 2^-q <= ε, i.e. ceil(log2(n_G - 1)), and at least 1.
int default_dichotomies(const GridSpec& grid);

/// Extra dichotomies for an edge spanning `axes` axes under diagonal refinement.
int diagonal_extra_dichotomies(int axes);

/// q successive dichotomies on [v_minus, v_plus]; returns t. A midpoint label
/// of 0 counts as +1. Checks the endpoint labels first (two extra oracle calls).
double dichotomy_boundary(const Oracle& oracle, std::span<const double> v_minus,
                          std::span<const double> v_plus, int q);

BoundaryStore build_store(const Oracle& oracle, const GridSpec& grid, Variant variant,
                          const BuildOptions& options = {});

/// Points of cube `c` whose edge lies in face `f` of that cube.
std::vector<BoundaryPoint> boundary_points_of_face(const BoundaryStore& store, CubeId c, FaceCode f);

/// Global vertex ids of a point's endpoints.
VertexId vertex_minus(const GridSpec& grid, CubeId c, const BoundaryPoint& b);
VertexId vertex_plus(const GridSpec& grid, CubeId c, const BoundaryPoint& b);

/// Coordinates in [0,1]^d. Bitwise identical for every cube listing the point.
void global_point(const GridSpec& grid, CubeId c, const BoundaryPoint& b, std::span<double> out);
Point global_point(const GridSpec& grid, CubeId c, const BoundaryPoint& b);
void global_point(const GridSpec& grid, std::span<const int> cube_index, const BoundaryPoint& b,
                  std::span<double> out);

/// Coordinates in the unit cube standing for `c`.
void local_point(const BoundaryPoint& b, int dim, std::span<double> out);

namespace detail {
/// Algorithm core without the endpoint check: exactly q oracle calls.
double bisect(const Oracle& oracle, std::span<const double> v_minus, std::span<const double> v_plus,
              int q, std::span<double> scratch);
}  // namespace detail

}  // namespace resistar
