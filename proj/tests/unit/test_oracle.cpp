#include <gtest/gtest.h>

#include <thread>

#include "generators.hpp"
#include "resistar/errors.hpp"
#include "resistar/oracle.hpp"

using namespace resistar;
using resistar::testing::Rng;

TEST(Oracle, Hyperplane) {
  const auto spec = make_hyperplane({1.0, 0.0}, 0.37);
  const Point x{0.5, 0.2};
  EXPECT_EQ(evaluate(spec, x), Label::Positive);
  const Point y{0.2, 0.9};
  EXPECT_EQ(evaluate(spec, y), Label::Negative);
  const Point on{0.37, 0.5};
  EXPECT_EQ(evaluate(spec, on), Label::Zero);
}

TEST(Oracle, SphereInsideIsNegative) {
  const auto spec = make_sphere({0.5, 0.5}, 0.3);
  const Point c{0.5, 0.5};
  EXPECT_EQ(evaluate(spec, c), Label::Negative);
  const Point far{0.0, 0.0};
  EXPECT_EQ(evaluate(spec, far), Label::Positive);
}

TEST(Oracle, RadialEquidistantIsZero) {
  const auto spec = make_radial({{0.2, 0.5}}, {{0.8, 0.5}}, 0.2);
  const Point x{0.5, 0.3};
  EXPECT_EQ(evaluate(spec, x), Label::Zero);
  const Point near_pos{0.25, 0.5};
  EXPECT_EQ(evaluate(spec, near_pos), Label::Positive);
}

TEST(Oracle, RadialSwapNegates) {
  Rng rng(5);
  const auto a = std::get<RadialOracle>(random_radial(3, 6, 0.3, 9));
  const auto swapped = make_radial(a.negative_sites, a.positive_sites, a.sigma);
  const OracleSpec orig = a;
  for (int i = 0; i < 500; ++i) {
    const Point x = rng.point(3);
    EXPECT_EQ(evaluate(swapped, x), negate(evaluate(orig, x)));
  }
}

TEST(Oracle, SanitizedVertexLabels) {
  // sphere passing exactly through grid vertices (0.5, 0) etc.
  const Oracle sphere(make_sphere({0.5, 0.5}, 0.5));
  const GridSpec g(2, 3);
  const MultiIndex on{1, 0};
  EXPECT_EQ(evaluate(*sphere.spec(), g.vertex_coordinates(g.vertex_id(on))), Label::Zero);
  EXPECT_EQ(sanitized_vertex_label(sphere, g, g.vertex_id(on)), Label::Positive);
  const MultiIndex inside{1, 1};
  EXPECT_EQ(sanitized_vertex_label(sphere, g, g.vertex_id(inside)), Label::Negative);

  const Oracle plane(make_hyperplane({1.0, 0.0}, 0.5));
  for (std::uint64_t v = 0; v < g.vertex_count(); ++v) {
    EXPECT_NE(sanitized_vertex_label(plane, g, VertexId{v}), Label::Zero);
  }
}

TEST(Oracle, HyperplaneSignChangesOnceAlongSegment) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto spec = make_hyperplane(rng.unit_vector(4), rng.uniform(-0.5, 0.5));
    const Point a = rng.point(4);
    const Point b = rng.point(4);
    int changes = 0;
    Label prev = evaluate(spec, a);
    for (int i = 1; i <= 1000; ++i) {
      Point x(4);
      for (int k = 0; k < 4; ++k) x[k] = a[k] + (b[k] - a[k]) * i / 1000.0;
      const Label l = evaluate(spec, x);
      if (l != Label::Zero && prev != Label::Zero && l != prev) ++changes;
      if (l != Label::Zero) prev = l;
    }
    EXPECT_LE(changes, 1);
  }
}

TEST(Oracle, RandomRadialIsDeterministic) {
  const auto a = std::get<RadialOracle>(random_radial(3, 20, 0.2, 11));
  const auto b = std::get<RadialOracle>(random_radial(3, 20, 0.2, 11));
  EXPECT_EQ(a.positive_sites, b.positive_sites);
  EXPECT_EQ(a.negative_sites, b.negative_sites);
  EXPECT_EQ(a.positive_sites.size(), 20u);
  EXPECT_EQ(a.negative_sites.size(), 20u);
  for (const Point& p : a.positive_sites) {
    for (double v : p) EXPECT_TRUE(v >= 0.0 && v < 1.0);
  }
  const auto c = std::get<RadialOracle>(random_radial(3, 20, 0.2, 12));
  EXPECT_NE(a.positive_sites, c.positive_sites);
}

TEST(Oracle, JsonRoundTrip) {
  const OracleSpec specs[] = {make_hyperplane({1.0, 2.0}, 0.3), make_sphere({0.5, 0.5, 0.5}, 0.25),
                              random_radial(2, 3, 0.4, 1), make_grid_labels(1, 3, {-1, 1, 0})};
  for (const OracleSpec& s : specs) {
    const OracleSpec back = oracle_from_json(oracle_to_json(s));
    EXPECT_EQ(oracle_digest(back), oracle_digest(s));
  }
  const auto j = nlohmann::json::parse(R"({"type":"radial_random","sites":4,"sigma":0.2,"seed":3})");
  EXPECT_EQ(oracle_dimension(oracle_from_json(j, 5)), 5);
  EXPECT_THROW(oracle_from_json(j), FormatError);
  EXPECT_THROW(oracle_from_json(nlohmann::json::parse(R"({"type":"cone"})")), FormatError);
  EXPECT_THROW(oracle_from_json(nlohmann::json::parse(R"({"type":"sphere","center":[0.5],"radius":-1})")),
               FormatError);
}

TEST(Oracle, GridLabelsNearestVertex) {
  const auto spec = make_grid_labels(1, 3, {-1, 1, -1});
  const Point a{0.2};
  const Point b{0.3};
  const Point tie{0.25};
  EXPECT_EQ(evaluate(spec, a), Label::Negative);
  EXPECT_EQ(evaluate(spec, b), Label::Positive);
  EXPECT_EQ(evaluate(spec, tie), Label::Negative);
  EXPECT_THROW(make_grid_labels(1, 3, {1, 1}), DomainError);
}

TEST(Oracle, CallCounterIsThreadSafe) {
  const Oracle o(make_sphere({0.5, 0.5}, 0.3));
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      const Point x{0.1, 0.2};
      for (int i = 0; i < 10000; ++i) o.evaluate(x);
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(o.calls(), 80000u);
}

TEST(Oracle, WrongDimension) {
  const Oracle o(make_sphere({0.5, 0.5}, 0.3));
  const Point x{0.1};
  EXPECT_THROW(o.evaluate(x), DomainError);
}
