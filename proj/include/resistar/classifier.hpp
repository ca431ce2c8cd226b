#pragma once

// Whole-domain classification: a point outside every boundary cube is moved
// along the segment towards a reference point m until it reaches the first
// boundary cube, and classified there.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "resistar/boundary.hpp"
#include "resistar/cube_classifier.hpp"

namespace resistar {

/// Visits every cube whose closed body meets segment [a,b], by increasing
/// entry parameter t in [0,1]. Cubes entered at the same parameter (corner
/// or facet grazing) come in lexicographic order. Returning false stops the walk.
void walk_segment(const GridSpec& grid, std::span<const double> a, std::span<const double> b,
                  const std::function<bool(CubeId, double)>& visit);

std::vector<CubeId> segment_cubes(const GridSpec& grid, std::span<const double> a, std::span<const double> b);

class Classifier {
 public:
  explicit Classifier(std::shared_ptr<const BoundaryStore> store, double delta = kDefaultDelta);

  const BoundaryStore& store() const { return *store_; }
  double delta() const { return delta_; }
  /// Centre of the lexicographically smallest store cube; empty for an empty store.
  const Point& reference_point() const { return m_; }

  Label classify(std::span<const double> x) const;

  /// Classification of x inside store cube c, by variant. x must lie in c.
  Label classify_in_store_cube(CubeId c, std::span<const double> x) const;

  /// `points` holds count·d coordinates, row-major.
  std::vector<Label> classify_batch(std::span<const double> points, std::size_t workers = 0) const;

 private:
  std::shared_ptr<const BoundaryStore> store_;
  double delta_;
  Point m_;
};

}  // namespace resistar
