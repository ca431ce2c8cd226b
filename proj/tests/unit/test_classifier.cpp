#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "resistar/classifier.hpp"
#include "resistar/errors.hpp"

using namespace resistar;
using resistar::testing::Rng;

namespace {

std::vector<MultiIndex> indices(const GridSpec& g, const std::vector<CubeId>& cubes) {
  std::vector<MultiIndex> out;
  for (CubeId c : cubes) out.push_back(g.cube_index(c));
  return out;
}

}  // namespace

TEST(SegmentCubes, Examples) {
  const GridSpec g(2, 3);
  const Point a{0.1, 0.1};
  const Point b{0.9, 0.1};
  EXPECT_EQ(indices(g, segment_cubes(g, a, b)), (std::vector<MultiIndex>{{0, 0}, {1, 0}}));
  EXPECT_EQ(indices(g, segment_cubes(g, a, a)), (std::vector<MultiIndex>{{0, 0}}));
  const Point corner{0.5, 0.5};
  EXPECT_EQ(indices(g, segment_cubes(g, corner, corner)),
            (std::vector<MultiIndex>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
  const Point c{0.9, 0.9};
  EXPECT_EQ(indices(g, segment_cubes(g, a, c)), (std::vector<MultiIndex>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
}

TEST(SegmentCubes, GrazingIncludesBothSides) {
  const GridSpec g(2, 3);
  const Point a{0.1, 0.5};
  const Point b{0.9, 0.5};
  EXPECT_EQ(indices(g, segment_cubes(g, a, b)), (std::vector<MultiIndex>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
}

TEST(SegmentCubes, VisitsAtMostLinearlyManyCubes) {
  Rng rng(1);
  for (int d = 2; d <= 5; ++d) {
    const int n = 12;
    const GridSpec g(d, n);
    for (int i = 0; i < 100; ++i) {
      const Point a = rng.point(d);
      const Point b = rng.point(d);
      const auto cubes = segment_cubes(g, a, b);
      EXPECT_LE(cubes.size(), static_cast<std::size_t>(d * (n - 1) + 1));
      // consecutive cubes are face neighbours in general position
      for (std::size_t k = 1; k < cubes.size(); ++k) {
        const MultiIndex p = g.cube_index(cubes[k - 1]);
        const MultiIndex q = g.cube_index(cubes[k]);
        int diff = 0;
        for (int j = 0; j < d; ++j) diff += std::abs(p[j] - q[j]);
        EXPECT_EQ(diff, 1);
      }
      EXPECT_EQ(cubes.front(), cube_of_point(g, a));
    }
  }
}

TEST(Classifier, InsideStoreCubeMatchesDirect) {
  const Oracle o(random_radial(3, 6, 0.3, 3));
  auto store = std::make_shared<const BoundaryStore>(build_store(o, GridSpec(3, 6), Variant::Cube, {.q = 10}));
  const Classifier cl(store);
  Rng rng(2);
  for (const CubeBoundary& cb : store->cubes()) {
    const Point x = rng.in_cube(store->grid(), cb.cube);
    EXPECT_EQ(cl.classify(x), classify_in_cube(*store, cb.cube, x));
  }
}

TEST(Classifier, FarPointFollowsOracle) {
  const Oracle o(make_hyperplane({1.0, 0.0, 0.0}, 0.37));
  for (Variant v : {Variant::Cube, Variant::Kuhn}) {
    auto store = std::make_shared<const BoundaryStore>(build_store(o, GridSpec(3, 5), v));
    const Classifier cl(store);
    const Point x{0.95, 0.95, 0.95};
    EXPECT_EQ(cl.classify(x), Label::Positive);
    const Point y{0.05, 0.95, 0.5};
    EXPECT_EQ(cl.classify(y), Label::Negative);
  }
}

TEST(Classifier, EmptyStoreFallback) {
  const Oracle o(make_sphere({0.5, 0.5}, 5.0));
  auto store = std::make_shared<const BoundaryStore>(build_store(o, GridSpec(2, 4), Variant::Cube));
  const Classifier cl(store);
  const Point x{0.3, 0.3};
  EXPECT_EQ(cl.classify(x), Label::Negative);
  EXPECT_TRUE(cl.reference_point().empty());
}

TEST(Classifier, DomainErrors) {
  const Oracle o(make_hyperplane({1.0, 0.0}, 0.37));
  auto store = std::make_shared<const BoundaryStore>(build_store(o, GridSpec(2, 4), Variant::Cube));
  const Classifier cl(store);
  const Point out{1.2, 0.5};
  const Point wrong{0.5};
  EXPECT_THROW(cl.classify(out), DomainError);
  EXPECT_THROW(cl.classify(wrong), DomainError);
  ASSERT_EQ(cl.reference_point().size(), 2u);
  EXPECT_NEAR(cl.reference_point()[0], 0.5, 1e-15);
  EXPECT_NEAR(cl.reference_point()[1], 1.0 / 6, 1e-15);
}

TEST(Classifier, AgreesWithOracleAwayFromTheSurface) {
  Rng rng(5);
  for (int d = 2; d <= 4; ++d) {
    const GridSpec g(d, 12);
    const double margin = 2.0 * g.epsilon();
    const Oracle sphere(resistar::testing::test_sphere(d, 0.31));
    const Point normal = rng.unit_vector(d);
    double through_centre = 0.05;
    for (double v : normal) through_centre += 0.5 * v;
    const Oracle plane(make_hyperplane(normal, through_centre));
    for (const Oracle* o : {&sphere, &plane}) {
      for (Variant v : {Variant::Cube, Variant::Kuhn}) {
        auto store = std::make_shared<const BoundaryStore>(build_store(*o, g, v, {.q = 8}));
        if (store->empty()) continue;
        const Classifier cl(store);
        int checked = 0;
        for (int i = 0; i < 3000; ++i) {
          const Point x = rng.point(d);
          const double dist = *signed_distance(*o->spec(), x);
          if (std::abs(dist) < margin) continue;
          ASSERT_EQ(cl.classify(x), o->evaluate(x)) << "d=" << d;
          ++checked;
        }
        EXPECT_GT(checked, 500);
      }
    }
  }
}

TEST(Classifier, TruncatedStoreGivesSameLabel) {
  const Oracle o(random_radial(3, 6, 0.3, 14));
  const GridSpec g(3, 8);
  auto store = std::make_shared<const BoundaryStore>(build_store(o, g, Variant::Cube, {.q = 10}));
  const Classifier cl(store);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Point x = rng.point(3);
    const auto path = segment_cubes(g, x, cl.reference_point());
    std::vector<CubeBoundary> kept;
    for (const CubeBoundary& cb : store->cubes()) {
      if (std::find(path.begin(), path.end(), cb.cube) != path.end()) kept.push_back(cb);
    }
    auto truncated = std::make_shared<const BoundaryStore>(g, Variant::Cube, store->q(), store->oracle_digest(),
                                                           store->fallback_label(), kept);
    const Classifier small(truncated);
    ASSERT_EQ(small.reference_point(), cl.reference_point());
    EXPECT_EQ(small.classify(x), cl.classify(x));
  }
}

TEST(Classifier, BatchIsDeterministicAcrossWorkers) {
  const Oracle o(random_radial(3, 6, 0.3, 15));
  auto store = std::make_shared<const BoundaryStore>(build_store(o, GridSpec(3, 8), Variant::Kuhn, {.q = 10}));
  const Classifier cl(store);
  Rng rng(4);
  std::vector<double> pts;
  for (int i = 0; i < 3000; ++i) {
    for (double v : rng.point(3)) pts.push_back(v);
  }
  const auto a = cl.classify_batch(pts, 1);
  const auto b = cl.classify_batch(pts, 4);
  EXPECT_EQ(a, b);
  for (std::size_t i = 0; i < a.size(); i += 97) {
    EXPECT_EQ(a[i], cl.classify(std::span<const double>(pts).subspan(i * 3, 3)));
  }
}
