// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "crossing_oracle.hpp"
#include "resistar/classifier.hpp"
#include "resistar/cube_classifier.hpp"
#include "resistar/enumerator.hpp"
#include "resistar/eval.hpp"
#include "resistar/kuhn_classifier.hpp"

using namespace resistar;
using resistar::testing::Rng;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// --- 1 ---------------------------------------------------------------------
Outcome boundary_point_bound() {
  constexpr int kEdges = 1000;
  Rng rng(101);
  std::uint64_t checked = 0, violations = 0;
  double worst_ratio = 0.0;
  for (int d = 1; d <= 6; ++d) {
    const GridSpec grid(d, 11);
    const double eps = grid.epsilon();
    for (int q = 1; q <= 12; ++q) {
      for (int e = 0; e < kEdges; ++e) {
        // random axis-aligned grid edge and a plane crossing it at t*
        MultiIndex lo(d);
        for (int& i : lo) i = rng.integer(0, 10);
        const int axis = rng.integer(0, d - 1);
        lo[axis] = rng.integer(0, 9);
        MultiIndex hi = lo;
        hi[axis] += 1;
        const Point a = grid.vertex_coordinates(grid.vertex_id(lo));
        const Point b = grid.vertex_coordinates(grid.vertex_id(hi));
        Point n = rng.unit_vector(d);
        if (std::abs(n[axis]) < 0.05) n[axis] = n[axis] < 0 ? -0.05 : 0.05;
        const double t_true = rng.uniform(0.001, 0.999);
        double offset = 0.0;
        for (int k = 0; k < d; ++k) offset += n[k] * (a[k] + t_true * (b[k] - a[k]));
        const Oracle oracle(make_hyperplane(n, offset));
        const bool a_negative = oracle.evaluate_sanitized(a) == Label::Negative;
        const Point& vm = a_negative ? a : b;
        const Point& vp = a_negative ? b : a;
        const double t = dichotomy_boundary(oracle, vm, vp, q);
        // exact crossing, measured from v_minus
        double fm = -offset, fp = -offset;
        for (int k = 0; k < d; ++k) fm += n[k] * vm[k], fp += n[k] * vp[k];
        const double t_exact = fm / (fm - fp);
        const double error = std::abs(t - t_exact) * eps;
        const double bound = std::ldexp(eps, -q - 1);
        worst_ratio = std::max(worst_ratio, error / bound);
        if (error > bound * (1.0 + 1e-9)) ++violations;
        ++checked;
      }
    }
  }
  return {violations == 0, fmt("%llu edges, %llu violations, worst error/bound %.6f",
                               (unsigned long long)checked, (unsigned long long)violations, worst_ratio)};
}

// --- 2 ---------------------------------------------------------------------
Outcome simplex_count_law() {
  const int sizes[] = {0, 0, 33, 17, 9, 6};
  int mismatches = 0;
  std::string detail;
  for (int d = 2; d <= 5; ++d) {
    for (std::uint64_t seed : {1, 2, 3}) {
      const Oracle oracle(random_radial(d, 10, 0.3, seed));
      const BoundaryStore store = build_store(oracle, GridSpec(d, sizes[d]), Variant::Cube);
      const std::uint64_t streamed = count_simplices_streamed(store);
      const std::uint64_t expected = factorial(d - 1) * store.point_incidences();
      if (streamed != expected) ++mismatches;
      if (seed == 1) detail += fmt("d=%d: %llu=%llu ", d, (unsigned long long)streamed, (unsigned long long)expected);
    }
  }
  return {mismatches == 0, detail + fmt("mismatches %d", mismatches)};
}

// --- 3 ---------------------------------------------------------------------
Outcome crossing_parity() {
  constexpr std::uint64_t kSamples = 10000;
  std::uint64_t disagreements = 0;
  std::string detail;
  for (Variant v : {Variant::Cube, Variant::Kuhn}) {
    for (int d : {2, 3}) {
      for (int n : {4, 8}) {
        const Oracle oracle(random_radial(d, 8, 0.25, 40 + d * 10 + n));
        auto store = std::make_shared<const BoundaryStore>(build_store(oracle, GridSpec(d, n), v, {.q = 10}));
        const Classifier classifier(store);
        Rng rng(d * 100 + n);
        const auto tally = resistar::testing::parity_check(*store, classifier, kSamples, rng);
        disagreements += tally.disagreements;
        detail += fmt("%s d=%d n=%d: %llu/%llu ", std::string(to_string(v)).c_str(), d, n,
                      (unsigned long long)(tally.compared - tally.disagreements), (unsigned long long)tally.compared);
      }
    }
  }
  return {disagreements == 0, detail + fmt("disagreements %llu", (unsigned long long)disagreements)};
}

// --- 4 and 9 ---------------------------------------------------------------
EvalConfig slope_scan_config() {
  return eval_config_from_json(nlohmann::json::parse(R"({
    "oracle": {"type": "radial_random", "sites": 20, "sigma": 0.2, "seed": 11},
    "dimensions": [3],
    "grid_sizes": [8, 16, 32, 48],
    "variants": ["cube", "kuhn", "nearest"],
    "q": {"policy": "log2", "offset": 2},
    "samples_per_cube": 100,
    "seed": 7
  })"));
}

std::string scan_csv(const EvalReport& r) {
  std::ostringstream a;
  write_report_csv(r, a);
  write_slopes_csv(r, a);
  return a.str();
}

std::string first_scan_csv;

Outcome error_slopes() {
  const EvalReport report = scan(slope_scan_config());
  first_scan_csv = scan_csv(report);
  bool pass = true;
  std::string detail;
  for (const SlopeRow& s : report.slopes) {
    if (s.quantity != "error_pct") continue;
    const bool nearest = s.method == Method::Nearest;
    const double lo = nearest ? -1.3 : -2.4;
    const double hi = nearest ? -0.7 : -1.6;
    const bool ok = s.valid && s.fit.slope >= lo && s.fit.slope <= hi && s.fit.r2 >= 0.95;
    pass = pass && ok;
    detail += fmt("%s %.3f (R2 %.3f) ", std::string(to_string(s.method)).c_str(), s.fit.slope, s.fit.r2);
  }
  return {pass, detail};
}

Outcome reproducibility() {
  if (first_scan_csv.empty()) error_slopes();
  const std::string second = scan_csv(scan(slope_scan_config()));
  return {second == first_scan_csv, fmt("%zu bytes, %s", second.size(), second == first_scan_csv ? "identical" : "differ")};
}

// --- 5 ---------------------------------------------------------------------
Outcome count_slopes() {
  const std::map<int, std::vector<int>> sizes{{3, {16, 24, 32, 48}}, {4, {16, 24, 32, 48}}};
  bool pass = true;
  std::string detail;
  for (const auto& [d, ns] : sizes) {
    const Oracle oracle(random_radial(d, 20, 0.2, 11));
    for (Variant v : {Variant::Cube, Variant::Kuhn}) {
      std::vector<std::pair<double, double>> pts;
      for (int n : ns) {
        const BoundaryStore store = build_store(oracle, GridSpec(d, n), v);
        pts.emplace_back(n, static_cast<double>(count_simplices(store).simplices));
      }
      const double slope = slope_fit(pts).slope;
      const double tol = v == Variant::Cube ? 0.3 : 0.4;
      const bool ok = std::abs(slope - (d - 1)) <= tol;
      pass = pass && ok;
      detail += fmt("d=%d %s %.3f ", d, std::string(to_string(v)).c_str(), slope);
    }
  }
  return {pass, detail};
}

// --- 6 ---------------------------------------------------------------------
Outcome dimensional_flatness() {
  const EvalConfig config = eval_config_from_json(nlohmann::json::parse(R"({
    "oracle": {"type": "radial_random", "sites": 10, "sigma": 0.4},
    "dimensions": [3, 4, 5, 6],
    "grid_sizes": [4],
    "oracle_seeds": [1, 2, 3, 4, 5],
    "variants": ["cube", "kuhn", "nearest"],
    "q": {"policy": "log2", "offset": 2},
    "samples_per_cube": 100,
    "seed": 7
  })"));
  const EvalReport report = scan(config);
  std::map<Method, std::map<int, double>> mean;
  std::map<Method, std::map<int, int>> count;
  for (const EvalRow& r : report.rows) {
    mean[r.method][r.d] += r.error_pct();
    count[r.method][r.d] += 1;
  }
  bool pass = true;
  std::string detail;
  for (auto& [m, by_d] : mean) {
    for (auto& [d, v] : by_d) v /= count[m][d];
  }
  for (int d : config.dimensions) {
    const double nearest = mean[Method::Nearest][d];
    for (Method m : {Method::Cube, Method::Kuhn}) pass = pass && mean[m][d] < nearest;
    detail += fmt("d=%d cube %.3f kuhn %.3f nearest %.3f; ", d, mean[Method::Cube][d], mean[Method::Kuhn][d], nearest);
  }
  for (Method m : {Method::Cube, Method::Kuhn}) {
    double lo = 1e300, hi = 0;
    for (const auto& [d, v] : mean[m]) lo = std::min(lo, v), hi = std::max(hi, v);
    const double ratio = lo > 0 ? hi / lo : INFINITY;
    pass = pass && ratio < 3.0;
    detail += fmt("%s spread %.2f ", std::string(to_string(m)).c_str(), ratio);
  }
  return {pass, detail};
}

// --- 7 ---------------------------------------------------------------------
Outcome kuhn_watertight() {
  bool pass = true;
  std::string detail;
  for (int n : {8, 16}) {
    const Oracle oracle(make_sphere({0.5, 0.5, 0.5}, 0.3));
    const BoundaryStore store = build_store(oracle, GridSpec(3, n), Variant::Kuhn);
    // independent census of the enumerated triangles
    using Key = std::array<long long, 3>;
    std::map<Key, std::size_t> vertex_ids;
    std::map<std::pair<std::size_t, std::size_t>, int> edges;
    std::uint64_t faces = 0;
    enumerate_all(store, [&](const ResistarSimplex& s) {
      std::size_t ids[3];
      for (int v = 0; v < 3; ++v) {
        const Key k{std::llround(s.vertices[v * 3] * 1e12), std::llround(s.vertices[v * 3 + 1] * 1e12),
                    std::llround(s.vertices[v * 3 + 2] * 1e12)};
        ids[v] = vertex_ids.emplace(k, vertex_ids.size()).first->second;
      }
      for (int e = 0; e < 3; ++e) {
        const auto a = ids[e], b = ids[(e + 1) % 3];
        ++edges[{std::min(a, b), std::max(a, b)}];
      }
      ++faces;
    });
    std::uint64_t bad = 0;
    for (const auto& [e, c] : edges) bad += c != 2;
    const long long euler = (long long)vertex_ids.size() - (long long)edges.size() + (long long)faces;
    pass = pass && bad == 0 && euler == 2 && faces > 0;
    detail += fmt("n=%d: %llu triangles, %llu bad edges, euler %lld; ", n, (unsigned long long)faces,
                  (unsigned long long)bad, euler);
  }
  return {pass, detail};
}

// --- 8 ---------------------------------------------------------------------
Outcome grid_classifier_equivalence() {
  constexpr int kPoints = 10000;
  std::uint64_t direct_checked = 0, direct_bad = 0, oracle_checked = 0, oracle_bad = 0;
  Rng rng(8);
  for (int d : {2, 3}) {
    const GridSpec grid(d, 12);
    Point normal = rng.unit_vector(d);
    double offset = 0.03;
    for (double v : normal) offset += 0.5 * v;
    const OracleSpec specs[] = {make_sphere(Point(d, 0.5), 0.31), make_hyperplane(normal, offset)};
    for (const OracleSpec& spec : specs) {
      const Oracle oracle(spec);
      for (Variant v : {Variant::Cube, Variant::Kuhn}) {
        auto store = std::make_shared<const BoundaryStore>(build_store(oracle, grid, v));
        const Classifier classifier(store);
        for (int i = 0; i < kPoints; ++i) {
          const Point x = rng.point(d);
          const Label got = classifier.classify(x);
          const CubeId c = cube_of_point(grid, x);
          if (store->find(c) != nullptr) {
            Label direct;
            if (v == Variant::Cube) {
              direct = classify_in_cube(*store, c, x);
            } else if (const KuhnSimplexRef ref = kuhn_simplex_of_point(grid, c, x);
                       !simplex_boundary_points(*store, ref).empty()) {
              direct = classify_in_simplex(*store, ref, x);
            } else {
              // no sign change in the simplex: the label of any of its vertices
              Point corner(d);
              const MultiIndex index = grid.cube_index(c);
              for (int k = 0; k < d; ++k) corner[k] = index[k] * grid.epsilon();
              direct = oracle.evaluate_sanitized(corner);
            }
            ++direct_checked;
            direct_bad += direct != got;
          }
          if (std::abs(*signed_distance(spec, x)) > 2 * grid.epsilon()) {
            ++oracle_checked;
            oracle_bad += oracle.evaluate(x) != got;
          }
        }
      }
    }
  }
  return {direct_bad == 0 && oracle_bad == 0,
          fmt("direct %llu/%llu, oracle %llu/%llu", (unsigned long long)(direct_checked - direct_bad),
              (unsigned long long)direct_checked, (unsigned long long)(oracle_checked - oracle_bad),
              (unsigned long long)oracle_checked)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "boundary-point error bound", 10, boundary_point_bound},
      {2, "simplex count law", 60, simplex_count_law},
      {3, "crossing-parity equivalence", 60, crossing_parity},
      {4, "error slopes", 600, error_slopes},
      {5, "simplex count slopes", 600, count_slopes},
      {6, "flatness across dimensions", 900, dimensional_flatness},
      {7, "K-resistar watertightness", 30, kuhn_watertight},
      {8, "grid classifier equivalence", 60, grid_classifier_equivalence},
      {9, "reproducible scan output", 600, reproducibility},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.time_limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("criterion %d %s: %s | %s | %.1f s (limit %.0f s%s)\n", c.id, c.name, pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, c.time_limit_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
