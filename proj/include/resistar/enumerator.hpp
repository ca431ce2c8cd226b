#pragma once

// Explicit resistar simplices, one per face chain F_1 ⊂ ... ⊂ F_{d-1} whose
// edge F_1 holds a boundary point. Used for counting, tests, watertightness
// and slicing; classification never needs them.

#include <cstdint>
#include <functional>
#include <map>
#include <span>

#include "resistar/boundary.hpp"

namespace resistar {

struct ResistarSimplex {
  CubeId cube;
  /// Lexicographic rank of the Kuhn permutation; -1 for the cube variant.
  int simplex_index = -1;
  std::span<const int> perm;
  BoundaryPoint point;
  /// d vertices of d global coordinates each, row-major. Vertex 0 is the
  /// boundary point, vertex i the barycentre of F_{i+1}, the last one the
  /// barycentre of the whole cube (or Kuhn simplex).
  std::span<const double> vertices;
  /// Cube variant: F_1..F_{d-1}.
  std::span<const FaceCode> cube_faces;
  /// Kuhn variant: F_1..F_{d-1} as sets of chain positions (bit j = V_j).
  std::span<const std::uint32_t> simplex_faces;
};

using SimplexVisitor = std::function<void(const ResistarSimplex&)>;

/// Streams the simplices of one cube. The referenced buffers are reused
/// between calls.
void enumerate_simplices(const BoundaryStore& store, CubeId c, const SimplexVisitor& visit);

/// All cubes in id order on the calling thread.
void enumerate_all(const BoundaryStore& store, const SimplexVisitor& visit);

struct SimplexCount {
  std::uint64_t boundary_points = 0;   // one per geometric edge
  std::uint64_t point_incidences = 0;  // per cube
  std::uint64_t simplices = 0;
};

/// Closed-form totals. Throws NumericError when the count exceeds 64 bits.
SimplexCount count_simplices(const BoundaryStore& store);

/// Simplex total by explicit enumeration, parallel over cubes.
std::uint64_t count_simplices_streamed(const BoundaryStore& store, std::size_t workers = 0);

inline constexpr int kDefaultEnumerationCap = 4;

struct WatertightReport {
  std::uint64_t simplices = 0;
  std::uint64_t facets = 0;           // distinct (d-2)-facets
  std::uint64_t interior_facets = 0;  // not on the boundary of [0,1]^d
  std::uint64_t bad_facets = 0;       // interior facets with incidence != 2
  int max_incidence = 0;
  std::map<int, std::uint64_t> incidence_histogram;  // interior facets only
  std::int64_t euler_characteristic = 0;
  bool watertight() const { return bad_facets == 0; }
};

/// Refuses (UsageError) when d exceeds `cap`.
WatertightReport watertightness_check(const BoundaryStore& store, int cap = kDefaultEnumerationCap);

}  // namespace resistar
