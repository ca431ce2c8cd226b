#pragma once

// Classification against the K-resistar of one Kuhn simplex. Faces of the
// simplex are subsets of its vertex chain; the recursion runs on barycentric
// weights.

#include <span>
#include <vector>

#include "resistar/boundary.hpp"
#include "resistar/cube_classifier.hpp"

namespace resistar {

/// Position of `mask` in the chain of a Kuhn simplex, or -1 when the vertex
/// does not belong to it.
int chain_position(std::span<const VertexMask> chain, VertexMask mask);

/// Points among `cube_points` whose two endpoints are vertices of the simplex
/// with vertex chain `chain`, in stored order.
std::vector<BoundaryPoint> filter_simplex_points(std::span<const BoundaryPoint> cube_points,
                                                 std::span<const VertexMask> chain);

std::vector<BoundaryPoint> simplex_boundary_points(const BoundaryStore& store, const KuhnSimplexRef& ref);

/// The face of the simplex spanned by its vertices of label `sign`.
SimplexFace face_of_no_boundary(const BoundaryStore& store, const KuhnSimplexRef& ref, Label sign);

/// Barycentric weights of cube-local x over the chain of `perm` (d+1 values).
std::vector<double> barycentric_weights(std::span<const int> perm, std::span<const double> local_x);

/// Core routine; `points` must already be filtered to the simplex.
Label classify_simplex_local(std::span<const BoundaryPoint> points, std::span<const int> perm,
                             std::span<const double> local_x, double edge_length,
                             double delta = kDefaultDelta);

/// x in global coordinates; requires a Kuhn-variant store.
Label classify_in_simplex(const BoundaryStore& store, const KuhnSimplexRef& ref, std::span<const double> x,
                          double delta = kDefaultDelta);

}  // namespace resistar
