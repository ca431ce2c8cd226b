#include "resistar/cube_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "resistar/errors.hpp"

namespace resistar {

namespace {

constexpr double kDirectionFloor = 1e-15;
constexpr double kInsideSlack = 1e-9;

bool point_in_face(const BoundaryPoint& b, FaceCode f) { return f.contains(b.minus) && f.contains(b.plus); }

}  // namespace

RayExit ray_exit_face(FaceCode f, std::span<const double> origin, std::span<const double> through) {
  const int d = static_cast<int>(origin.size());
  double best = std::numeric_limits<double>::infinity();
  int hit_axis = -1;
  int hit_side = 0;
  for (int k = 0; k < d; ++k) {
    if (!((f.free_axes >> k) & 1U)) continue;
    const double dir = through[k] - origin[k];
    double t;
    int side;
    if (dir > kDirectionFloor) {
      t = (1.0 - origin[k]) / dir;
      side = 1;
    } else if (dir < -kDirectionFloor) {
      t = origin[k] / -dir;
      side = 0;
    } else {
      continue;
    }
    if (t < best) {
      best = t;
      hit_axis = k;
      hit_side = side;
    }
  }
  if (hit_axis < 0) throw NumericError("ray direction vanishes on the face");

  RayExit exit{Point(d), f};
  for (int k = 0; k < d; ++k) {
    if ((f.free_axes >> k) & 1U) {
      exit.exit_point[k] = std::clamp(origin[k] + best * (through[k] - origin[k]), 0.0, 1.0);
    } else {
      exit.exit_point[k] = static_cast<double>((f.offsets >> k) & 1U);
    }
  }
  exit.exit_point[hit_axis] = hit_side;
  exit.facet.free_axes &= ~(VertexMask{1} << hit_axis);
  if (hit_side) exit.facet.offsets |= VertexMask{1} << hit_axis;
  return exit;
}

Label classify_cube_local(std::span<const BoundaryPoint> points, std::span<const double> local_x,
                          double edge_length, double delta) {
  if (points.empty()) throw ContractViolation("cube has no boundary points");
  const int d = static_cast<int>(local_x.size());
  std::vector<BoundaryPoint> current(points.begin(), points.end());
  std::vector<BoundaryPoint> next;
  FaceCode face = FaceCode::whole_cube(d);
  Point x(local_x.begin(), local_x.end());
  Point centre(d);
  Point p(d);

  while (true) {
    std::fill(centre.begin(), centre.end(), 0.0);
    for (const BoundaryPoint& b : current) {
      local_point(b, d, p);
      for (int k = 0; k < d; ++k) centre[k] += p[k];
    }
    double dist2 = 0.0;
    for (int k = 0; k < d; ++k) {
      centre[k] /= static_cast<double>(current.size());
      const double diff = x[k] - centre[k];
      dist2 += diff * diff;
    }
    if (std::sqrt(dist2) * edge_length < delta) return Label::Zero;

    RayExit exit;
    try {
      exit = ray_exit_face(face, centre, x);
    } catch (const NumericError&) {
      return Label::Zero;
    }

    next.clear();
    for (const BoundaryPoint& b : current) {
      if (point_in_face(b, exit.facet)) next.push_back(b);
    }
    if (next.empty()) {
      for (const BoundaryPoint& b : current) {
        if (exit.facet.contains(b.plus)) return Label::Positive;
        if (exit.facet.contains(b.minus)) return Label::Negative;
      }
      throw ContractViolation("no boundary point touches the exit facet; store is inconsistent");
    }
    face = exit.facet;
    x = std::move(exit.exit_point);
    current.swap(next);
  }
}

Point local_coordinates_in_cube(const GridSpec& grid, CubeId c, std::span<const double> x) {
  if (static_cast<int>(x.size()) != grid.dim()) throw DomainError("point has wrong dimension");
  Point local(grid.dim());
  grid.to_local(c, x, local);
  for (double& v : local) {
    if (!(v >= -kInsideSlack && v <= 1.0 + kInsideSlack)) throw DomainError("point lies outside the cube");
    v = std::clamp(v, 0.0, 1.0);
  }
  return local;
}

Label classify_in_cube(const BoundaryStore& store, CubeId c, std::span<const double> x, double delta) {
  if (store.variant() != Variant::Cube) throw ContractViolation("cube classification needs a cube-variant store");
  const auto* points = store.find(c);
  if (points == nullptr) throw ContractViolation("cube holds no boundary points");
  const Point local = local_coordinates_in_cube(store.grid(), c, x);
  return classify_cube_local(*points, local, store.grid().epsilon(), delta);
}

}  // namespace resistar
