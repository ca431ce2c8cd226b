#include "resistar/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "resistar/errors.hpp"
#include "resistar/kuhn_classifier.hpp"
#include "resistar/parallel.hpp"

namespace resistar {

namespace {

constexpr double kGridSnap = 1e-9;
constexpr double kMergeTimes = 1e-12;

void check_in_box(std::span<const double> x, int dim) {
  if (static_cast<int>(x.size()) != dim) throw DomainError("point has wrong dimension");
  for (double v : x) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("point lies outside [0,1]^d");
  }
}

// Cubes whose closed body holds p, lexicographic order.
void containing_cubes(const GridSpec& grid, std::span<const double> p, std::vector<std::uint64_t>& out) {
  const int d = grid.dim();
  const int last = grid.points_per_axis() - 2;
  const double scale = grid.points_per_axis() - 1;
  std::vector<std::pair<int, int>> range(d);
  for (int k = 0; k < d; ++k) {
    const double s = std::clamp(p[k], 0.0, 1.0) * scale;
    const double r = std::round(s);
    if (std::abs(s - r) <= kGridSnap) {
      const int j = static_cast<int>(r);
      range[k] = {std::max(j - 1, 0), std::min(j, last)};
    } else {
      const int j = std::clamp(static_cast<int>(std::floor(s)), 0, last);
      range[k] = {j, j};
    }
  }
  out.clear();
  std::vector<int> idx(d);
  for (int k = 0; k < d; ++k) idx[k] = range[k].first;
  while (true) {
    std::uint64_t linear = 0;
    for (int k = 0; k < d; ++k) linear += static_cast<std::uint64_t>(idx[k]) * grid.cube_stride(k);
    out.push_back(linear);
    int k = d - 1;
    while (k >= 0 && idx[k] == range[k].second) {
      idx[k] = range[k].first;
      --k;
    }
    if (k < 0) break;
    ++idx[k];
  }
}

}  // namespace

void walk_segment(const GridSpec& grid, std::span<const double> a, std::span<const double> b,
                  const std::function<bool(CubeId, double)>& visit) {
  const int d = grid.dim();
  check_in_box(a, d);
  check_in_box(b, d);
  const double scale = grid.points_per_axis() - 1;

  std::vector<double> times{0.0, 1.0};
  for (int k = 0; k < d; ++k) {
    const double sa = a[k] * scale;
    const double sb = b[k] * scale;
    if (sa == sb) continue;
    const int lo = static_cast<int>(std::ceil(std::min(sa, sb)));
    const int hi = static_cast<int>(std::floor(std::max(sa, sb)));
    for (int j = lo; j <= hi; ++j) {
      const double t = (j - sa) / (sb - sa);
      if (t > 0.0 && t < 1.0) times.push_back(t);
    }
  }
  std::sort(times.begin(), times.end());
  std::vector<double> events;
  for (double t : times) {
    if (events.empty() || t - events.back() > kMergeTimes) events.push_back(t);
  }

  std::vector<std::uint64_t> seen;
  std::vector<std::uint64_t> cubes;
  Point p(d);
  auto visit_at = [&](double t, double entry) {
    for (int k = 0; k < d; ++k) p[k] = a[k] + t * (b[k] - a[k]);
    containing_cubes(grid, p, cubes);
    for (std::uint64_t c : cubes) {
      if (std::find(seen.begin(), seen.end(), c) != seen.end()) continue;
      seen.push_back(c);
      if (!visit(CubeId{c}, entry)) return false;
    }
    return true;
  };
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (!visit_at(events[i], events[i])) return;
    if (i + 1 < events.size() && !visit_at(0.5 * (events[i] + events[i + 1]), events[i])) return;
  }
}

std::vector<CubeId> segment_cubes(const GridSpec& grid, std::span<const double> a, std::span<const double> b) {
  std::vector<CubeId> out;
  walk_segment(grid, a, b, [&](CubeId c, double) {
    out.push_back(c);
    return true;
  });
  return out;
}

Classifier::Classifier(std::shared_ptr<const BoundaryStore> store, double delta)
    : store_(std::move(store)), delta_(delta) {
  if (!store_) throw ContractViolation("classifier needs a store");
  if (!(delta_ >= 0.0)) throw DomainError("delta must be nonnegative");
  if (!store_->empty()) m_ = store_->grid().cube_centre(store_->cubes().front().cube);
}

Label Classifier::classify_in_store_cube(CubeId c, std::span<const double> x) const {
  const GridSpec& grid = store_->grid();
  const auto* points = store_->find(c);
  if (points == nullptr) throw ContractViolation("cube holds no boundary points");
  const Point local = local_coordinates_in_cube(grid, c, x);
  if (store_->variant() == Variant::Cube) return classify_cube_local(*points, local, grid.epsilon(), delta_);

  std::vector<int> perm(grid.dim());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int i, int j) { return local[i] < local[j]; });
  const std::vector<VertexMask> chain = kuhn_chain(perm);
  const std::vector<BoundaryPoint> inside = filter_simplex_points(*points, chain);
  if (!inside.empty()) return classify_simplex_local(inside, perm, local, grid.epsilon(), delta_);
  // No point in this simplex: all its vertices share the label of the cube's
  // minimal corner, which every Kuhn edge from it reaches.
  for (const BoundaryPoint& b : *points) {
    if (b.minus == 0) return Label::Negative;
    if (b.plus == 0) return Label::Positive;
  }
  throw FormatError("minimal corner carries no boundary point; store is inconsistent");
}

Label Classifier::classify(std::span<const double> x) const {
  const GridSpec& grid = store_->grid();
  check_in_box(x, grid.dim());
  if (store_->empty()) return store_->fallback_label();
  const CubeId own = cube_of_point(grid, x);
  if (store_->find(own) != nullptr) return classify_in_store_cube(own, x);

  CubeId target{};
  double entry = -1.0;
  walk_segment(grid, x, m_, [&](CubeId c, double t) {
    if (store_->find(c) == nullptr) return true;
    target = c;
    entry = t;
    return false;
  });
  if (entry < 0.0) throw ContractViolation("segment to the reference point met no boundary cube");

  Point xp(grid.dim());
  for (int k = 0; k < grid.dim(); ++k) xp[k] = x[k] + entry * (m_[k] - x[k]);
  // pull x' into the closed cube against rounding
  const MultiIndex idx = grid.cube_index(target);
  for (int k = 0; k < grid.dim(); ++k) {
    xp[k] = std::clamp(xp[k], grid.coordinate(idx[k]), grid.coordinate(idx[k] + 1));
  }
  return classify_in_store_cube(target, xp);
}

std::vector<Label> Classifier::classify_batch(std::span<const double> points, std::size_t workers) const {
  const std::size_t d = static_cast<std::size_t>(store_->grid().dim());
  if (points.size() % d != 0) throw DomainError("point buffer length is not a multiple of d");
  const std::size_t count = points.size() / d;
  std::vector<Label> out(count);
  parallel_for(count, workers, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) out[i] = classify(points.subspan(i * d, d));
  });
  return out;
}

}  // namespace resistar
