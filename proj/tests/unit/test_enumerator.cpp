#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "crossing_oracle.hpp"
#include "resistar/enumerator.hpp"
#include "resistar/errors.hpp"
#include "resistar/kuhn_classifier.hpp"

using namespace resistar;
using resistar::testing::Rng;
using resistar::testing::single_cube_labels;
using resistar::testing::simplices_of;

namespace {

BoundaryStore single_cube(int d, const std::vector<int>& labels, Variant v = Variant::Cube) {
  const Oracle o(single_cube_labels(d, labels));
  return build_store(o, GridSpec(d, 2), v, {.q = 5});
}

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

int numeric_rank(std::vector<std::vector<double>> rows, double tol) {
  int rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    std::size_t pivot = rank;
    for (std::size_t r = rank; r < rows.size(); ++r) {
      if (std::abs(rows[r][c]) > std::abs(rows[pivot][c])) pivot = r;
    }
    if (std::abs(rows[pivot][c]) < tol) continue;
    std::swap(rows[pivot], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == static_cast<std::size_t>(rank)) continue;
      const double f = rows[r][c] / rows[rank][c];
      for (std::size_t k = c; k < cols; ++k) rows[r][k] -= f * rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

// independent total: per Kuhn simplex, (d-1)! chains through each of its points
std::uint64_t kuhn_total_by_simplices(const BoundaryStore& s) {
  const int d = s.grid().dim();
  std::uint64_t total = 0;
  for (const CubeBoundary& cb : s.cubes()) {
    std::vector<int> perm(d);
    for (int k = 0; k < d; ++k) perm[k] = k;
    do {
      total += filter_simplex_points(cb.points, kuhn_chain(perm)).size() * factorial(d - 1);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return total;
}

}  // namespace

TEST(Enumerator, TwoPointsInASquare) {
  const BoundaryStore s = single_cube(2, {-1, 1, 1, 1});
  const auto simplices = simplices_of(s, CubeId{0});
  ASSERT_EQ(simplices.size(), 2u);
  const Point b1 = global_point(s.grid(), CubeId{0}, (*s.find(CubeId{0}))[0]);
  const Point b2 = global_point(s.grid(), CubeId{0}, (*s.find(CubeId{0}))[1]);
  EXPECT_EQ(simplices[0].vertices[0], b1);
  EXPECT_EQ(simplices[1].vertices[0], b2);
  EXPECT_EQ(simplices[0].vertices[1], simplices[1].vertices[1]);
  EXPECT_NEAR(simplices[0].vertices[1][0], (b1[0] + b2[0]) / 2, 1e-15);
  EXPECT_NEAR(simplices[0].vertices[1][1], (b1[1] + b2[1]) / 2, 1e-15);
}

TEST(Enumerator, SixPointsGiveTwelveTriangles) {
  std::vector<int> labels(8, -1);
  labels[0b000] = 1;
  labels[0b011] = 1;
  const BoundaryStore s = single_cube(3, labels);
  EXPECT_EQ(s.point_incidences(), 6u);
  EXPECT_EQ(simplices_of(s, CubeId{0}).size(), 12u);
  EXPECT_EQ(count_simplices(s).simplices, 12u);
}

TEST(Enumerator, FourDimensionalCubeGivesSixPerPoint) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> labels(16);
    for (int& l : labels) l = rng.integer(0, 1) ? 1 : -1;
    const BoundaryStore s = single_cube(4, labels);
    if (s.empty()) continue;
    EXPECT_EQ(simplices_of(s, CubeId{0}).size(), 6 * s.point_incidences());
  }
}

TEST(Enumerator, CountLaws) {
  for (int d = 2; d <= 5; ++d) {
    const Oracle o(random_radial(d, 5, 0.3, 200 + d));
    const GridSpec g(d, d <= 3 ? 9 : (d == 4 ? 5 : 4));
    const BoundaryStore cube = build_store(o, g, Variant::Cube, {.q = 6});
    const SimplexCount cc = count_simplices(cube);
    EXPECT_EQ(cc.simplices, factorial(d - 1) * cube.point_incidences());
    EXPECT_EQ(count_simplices_streamed(cube, 2), cc.simplices);
    EXPECT_EQ(cc.point_incidences, cube.point_incidences());

    const BoundaryStore kuhn = build_store(o, g, Variant::Kuhn, {.q = 6});
    const SimplexCount kc = count_simplices(kuhn);
    EXPECT_EQ(kc.simplices, kuhn_total_by_simplices(kuhn));
    EXPECT_EQ(count_simplices_streamed(kuhn, 2), kc.simplices);
    EXPECT_GE(kc.boundary_points, cc.boundary_points);
  }
  const Oracle none(make_hyperplane({1.0, 0.0}, 4.0));
  const SimplexCount empty = count_simplices(build_store(none, GridSpec(2, 5), Variant::Cube));
  EXPECT_EQ(empty.boundary_points, 0u);
  EXPECT_EQ(empty.simplices, 0u);
}

TEST(Enumerator, UniqueBoundaryPointsCountedOnce) {
  const Oracle o(make_hyperplane({1.0, 0.0, 0.0}, 0.5 + 1e-9));
  const GridSpec g(3, 5);
  const BoundaryStore s = build_store(o, g, Variant::Cube);
  // one crossing edge per (y, z) grid point
  EXPECT_EQ(count_simplices(s).boundary_points, 25u);
  EXPECT_EQ(s.point_incidences(), 4u * 16u);
}

TEST(Enumerator, SimplicesAreNondegenerateAndNested) {
  for (Variant v : {Variant::Cube, Variant::Kuhn}) {
    for (int d = 2; d <= 4; ++d) {
      const Oracle o(random_radial(d, 5, 0.3, 80 + d));
      const GridSpec g(d, 5);
      const BoundaryStore s = build_store(o, g, v, {.q = 8});
      std::uint64_t seen = 0;
      enumerate_all(s, [&](const ResistarSimplex& r) {
        ++seen;
        std::vector<std::vector<double>> edges;
        for (int i = 1; i < d; ++i) {
          std::vector<double> e(d);
          for (int k = 0; k < d; ++k) e[k] = (r.vertices[i * d + k] - r.vertices[k]) / g.epsilon();
          edges.push_back(e);
        }
        EXPECT_EQ(numeric_rank(edges, 1e-9), d - 1);
        if (v == Variant::Cube) {
          ASSERT_EQ(r.cube_faces.size(), static_cast<std::size_t>(d - 1));
          const MultiIndex idx = g.cube_index(r.cube);
          for (int i = 0; i + 1 < d; ++i) {
            const FaceCode f = r.cube_faces[i];
            EXPECT_EQ(f.dim(), i + 1);
            if (i > 0) EXPECT_EQ(r.cube_faces[i - 1].free_axes & ~f.free_axes, 0u);
            for (int k = 0; k < d; ++k) {
              if ((f.free_axes >> k) & 1U) continue;
              const double bound = g.coordinate(idx[k] + static_cast<int>((f.offsets >> k) & 1U));
              EXPECT_EQ(r.vertices[i * d + k], bound);
            }
          }
        } else {
          ASSERT_EQ(r.simplex_faces.size(), static_cast<std::size_t>(d - 1));
          for (int i = 0; i + 1 < d; ++i) EXPECT_EQ(std::popcount(r.simplex_faces[i]), i + 2);
        }
      });
      EXPECT_EQ(seen, count_simplices(s).simplices);
    }
  }
}

TEST(Enumerator, LastVertexIsTheBarycentre) {
  const Oracle o(random_radial(3, 5, 0.3, 3));
  const BoundaryStore s = build_store(o, GridSpec(3, 5), Variant::Cube, {.q = 8});
  const CubeBoundary& cb = s.cubes().front();
  Point centre(3, 0.0);
  for (const BoundaryPoint& b : cb.points) {
    const Point p = global_point(s.grid(), cb.cube, b);
    for (int k = 0; k < 3; ++k) centre[k] += p[k] / cb.points.size();
  }
  for (const auto& simplex : simplices_of(s, cb.cube)) {
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(simplex.vertices[2][k], centre[k], 1e-15);
  }
}

TEST(Watertight, KuhnSphereIsClosed) {
  const Oracle o(resistar::testing::test_sphere(3));
  const BoundaryStore s = build_store(o, GridSpec(3, 8), Variant::Kuhn);
  const WatertightReport r = watertightness_check(s);
  EXPECT_TRUE(r.watertight());
  EXPECT_EQ(r.max_incidence, 2);
  EXPECT_EQ(r.interior_facets, r.facets);
  EXPECT_EQ(r.euler_characteristic, 2);
}

TEST(Watertight, KuhnRadialUpToFourDimensions) {
  for (int d = 2; d <= 4; ++d) {
    const Oracle o(random_radial(d, 6, 0.25, 30 + d));
    const BoundaryStore s = build_store(o, GridSpec(d, d == 4 ? 6 : 10), Variant::Kuhn, {.q = 8});
    const WatertightReport r = watertightness_check(s);
    EXPECT_TRUE(r.watertight()) << "d=" << d << " bad=" << r.bad_facets;
    EXPECT_GT(r.facets, 0u);
  }
}

TEST(Watertight, AmbiguousSquareIsFlagged) {
  const BoundaryStore s = single_cube(2, {1, -1, -1, 1});
  ASSERT_EQ(s.point_incidences(), 4u);
  const WatertightReport r = watertightness_check(s);
  EXPECT_FALSE(r.watertight());
  EXPECT_EQ(r.bad_facets, 1u);
  EXPECT_EQ(r.max_incidence, 4);
}

TEST(Watertight, SingleSquareWithTwoPoints) {
  const BoundaryStore s = single_cube(2, {-1, 1, 1, 1});
  const WatertightReport r = watertightness_check(s);
  EXPECT_TRUE(r.watertight());
  EXPECT_EQ(r.facets, 3u);
  EXPECT_EQ(r.interior_facets, 1u);
}

TEST(Watertight, RefusesAboveCap) {
  const Oracle o(resistar::testing::test_sphere(5));
  const BoundaryStore s = build_store(o, GridSpec(5, 3), Variant::Kuhn);
  EXPECT_THROW(watertightness_check(s), UsageError);
  EXPECT_NO_THROW(watertightness_check(s, 5));
}
