#pragma once

// Classification of a point against the c-resistar of one cube by recursive
// ray projection onto faces of decreasing dimension.

#include <span>

#include "resistar/boundary.hpp"

namespace resistar {

inline constexpr double kDefaultDelta = 1e-5;

struct RayExit {
  Point exit_point;
  FaceCode facet;
};

/// Ray from `origin` through `through` leaving face `f` of the unit cube.
/// Both points are cube-local and lie in f. Ties between axes go to the
/// smallest axis. Throws NumericError when the direction vanishes on every
/// free axis.
RayExit ray_exit_face(FaceCode f, std::span<const double> origin, std::span<const double> through);

/// Core of the in-cube classification. `points` are the boundary points of the
/// cube, `local_x` the query in cube-local coordinates, `edge_length` the cube
/// edge so that `delta` is compared in global units.
Label classify_cube_local(std::span<const BoundaryPoint> points, std::span<const double> local_x,
                          double edge_length, double delta = kDefaultDelta);

/// x in global coordinates; requires a cube-variant store listing c.
Label classify_in_cube(const BoundaryStore& store, CubeId c, std::span<const double> x,
                       double delta = kDefaultDelta);

/// Cube-local coordinates of x, clamped to [0,1]. DomainError when x is
/// outside the cube by more than a rounding slack.
Point local_coordinates_in_cube(const GridSpec& grid, CubeId c, std::span<const double> x);

}  // namespace resistar
