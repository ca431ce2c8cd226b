#include "resistar/slicer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include <json.hpp>

#include "resistar/enumerator.hpp"
#include "resistar/errors.hpp"
#include "resistar/parallel.hpp"

namespace resistar {

namespace {

constexpr double kOnPlane = 1e-12;
constexpr double kDedup = 1e-9;

struct CutPoint {
  Point x;
  std::uint32_t support;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

bool near(std::span<const double> a, std::span<const double> b, double tol) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k] - b[k]) > tol) return false;
  }
  return true;
}

std::array<Point, 3> residual_basis(int d, std::span<const Hyperplane> planes, std::vector<int>& free_axes) {
  std::array<Point, 3> basis;
  free_axes.clear();
  const bool aligned = std::all_of(planes.begin(), planes.end(), [](const Hyperplane& h) { return h.axis >= 0; });
  if (aligned) {
    std::vector<bool> cut(d, false);
    for (const Hyperplane& h : planes) {
      if (cut[h.axis]) throw UsageError("two slicing planes on the same axis");
      cut[h.axis] = true;
    }
    for (int k = 0; k < d; ++k) {
      if (!cut[k]) free_axes.push_back(k);
    }
    for (int i = 0; i < 3; ++i) {
      basis[i].assign(d, 0.0);
      basis[i][free_axes[i]] = 1.0;
    }
    return basis;
  }
  // Gram-Schmidt: plane normals first, then the standard basis
  std::vector<Point> ortho;
  auto add = [&](Point v) {
    for (const Point& u : ortho) {
      const double p = dot(u, v);
      for (int k = 0; k < d; ++k) v[k] -= p * u[k];
    }
    const double n = std::sqrt(dot(v, v));
    if (n < 1e-9) return false;
    for (double& x : v) x /= n;
    ortho.push_back(std::move(v));
    return true;
  };
  for (const Hyperplane& h : planes) {
    if (!add(h.normal)) throw UsageError("slicing planes are not independent");
  }
  for (int k = 0; k < d && static_cast<int>(ortho.size()) < d; ++k) {
    Point e(d, 0.0);
    e[k] = 1.0;
    add(std::move(e));
  }
  for (int i = 0; i < 3; ++i) basis[i] = ortho[planes.size() + i];
  return basis;
}

// Cuts one simplex; returns false when nothing of dimension 2 survives. A
// vertex exactly on a plane counts as lying on its positive side, so pieces
// shared by neighbouring simplices are emitted once.
bool cut_simplex(std::span<const double> vertices, int d, std::span<const Hyperplane> planes,
                 std::vector<CutPoint>& pts) {
  pts.clear();
  for (int v = 0; v < d; ++v) {
    pts.push_back({Point(vertices.begin() + v * d, vertices.begin() + (v + 1) * d), std::uint32_t{1} << v});
  }
  std::vector<CutPoint> next;
  std::vector<double> s;
  for (std::size_t k = 0; k < planes.size(); ++k) {
    s.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) s[i] = planes[k].eval(pts[i].x);
    next.clear();
    const int max_support = static_cast<int>(k) + 2;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const std::uint32_t u = pts[i].support | pts[j].support;
        if (std::popcount(u) > max_support) continue;
        if ((s[i] >= 0.0) == (s[j] >= 0.0)) continue;
        // fixed endpoint order so neighbouring simplices compute the same point
        std::size_t a = i, b = j;
        if (std::lexicographical_compare(pts[b].x.begin(), pts[b].x.end(), pts[a].x.begin(), pts[a].x.end())) {
          std::swap(a, b);
        }
        const double t = s[a] / (s[a] - s[b]);
        CutPoint c{Point(d), u};
        for (int q = 0; q < d; ++q) c.x[q] = pts[a].x[q] + t * (pts[b].x[q] - pts[a].x[q]);
        next.push_back(std::move(c));
      }
    }
    pts.clear();
    for (CutPoint& c : next) {
      const bool dup = std::any_of(pts.begin(), pts.end(), [&](const CutPoint& p) { return near(p.x, c.x, kDedup); });
      if (!dup) pts.push_back(std::move(c));
    }
    if (pts.size() < 3) return false;
  }
  return true;
}

using Vec3 = std::array<double, 3>;

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Convex hull of coplanar points, counter-clockwise around the best-fit normal.
std::vector<Vec3> planar_hull(const std::vector<Vec3>& pts) {
  Vec3 c{0, 0, 0};
  for (const Vec3& p : pts) {
    for (int k = 0; k < 3; ++k) c[k] += p[k] / static_cast<double>(pts.size());
  }
  Vec3 normal{0, 0, 0};
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Vec3 n = cross(sub(pts[i], c), sub(pts[j], c));
      const double m = dot3(n, n);
      if (m > best) {
        best = m;
        normal = n;
      }
    }
  }
  if (best < 1e-30) return {};
  Vec3 u{0, 0, 0};
  for (const Vec3& p : pts) {
    const Vec3 r = sub(p, c);
    if (dot3(r, r) > dot3(u, u)) u = r;
  }
  const double nu = std::sqrt(dot3(u, u));
  for (double& x : u) x /= nu;
  Vec3 v = cross(normal, u);
  const double nv = std::sqrt(dot3(v, v));
  for (double& x : v) x /= nv;

  struct P2 {
    double x, y;
    std::size_t i;
  };
  std::vector<P2> q;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec3 r = sub(pts[i], c);
    q.push_back({dot3(r, u), dot3(r, v), i});
  }
  std::sort(q.begin(), q.end(), [](const P2& a, const P2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  auto turn = [](const P2& o, const P2& a, const P2& b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
  std::vector<P2> hull(2 * q.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], q[i]) <= 1e-18) --k;
    hull[k++] = q[i];
  }
  for (std::size_t i = q.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && turn(hull[k - 2], hull[k - 1], q[i]) <= 1e-18) --k;
    hull[k++] = q[i];
  }
  hull.resize(k > 0 ? k - 1 : 0);
  std::vector<Vec3> out;
  for (const P2& h : hull) out.push_back(pts[h.i]);
  if (out.size() < 3) out.clear();
  return out;
}

}  // namespace

Hyperplane Hyperplane::axis_aligned(int dim, int axis, double value) {
  if (axis < 0 || axis >= dim) throw UsageError("plane axis out of range");
  if (!(value > 0.0 && value < 1.0)) throw UsageError("axis-aligned plane value must lie in (0,1)");
  Hyperplane h;
  h.normal.assign(dim, 0.0);
  h.normal[axis] = 1.0;
  h.offset = value;
  h.axis = axis;
  return h;
}

Hyperplane Hyperplane::general(Point normal, double offset) {
  if (std::none_of(normal.begin(), normal.end(), [](double v) { return v != 0.0; })) {
    throw UsageError("plane normal must be nonzero");
  }
  return Hyperplane{std::move(normal), offset, -1};
}

double Hyperplane::eval(std::span<const double> x) const { return dot(normal, x) - offset; }

Hyperplane parse_axis_plane(const std::string& text, int dim) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw UsageError("plane must look like axis=value: " + text);
  std::string axis = text.substr(0, eq);
  if (!axis.empty() && (axis[0] == 'x' || axis[0] == 'X')) axis.erase(0, 1);
  int k = 0;
  double value = 0.0;
  try {
    std::size_t used = 0;
    k = std::stoi(axis, &used);
    if (used != axis.size()) throw UsageError("bad plane axis");
    const std::string rest = text.substr(eq + 1);
    value = std::stod(rest, &used);
    if (used != rest.size()) throw UsageError("bad plane value");
  } catch (const std::logic_error&) {
    throw UsageError("plane must look like axis=value: " + text);
  }
  return Hyperplane::axis_aligned(dim, k - 1, value);
}

SliceMesh slice(const BoundaryStore& store, std::span<const Hyperplane> planes, std::size_t workers) {
  const GridSpec& grid = store.grid();
  const int d = grid.dim();
  if (d < 3) throw ContractViolation("slicing needs d >= 3");
  if (static_cast<int>(planes.size()) != d - 3) {
    throw ContractViolation("slicing needs exactly d-3 = " + std::to_string(d - 3) + " planes");
  }
  for (const Hyperplane& h : planes) {
    if (static_cast<int>(h.normal.size()) != d) throw ContractViolation("plane has wrong dimension");
  }
  SliceMesh mesh;
  mesh.dim = d;
  mesh.basis = residual_basis(d, planes, mesh.free_axes);

  // cubes whose box meets every plane
  std::vector<CubeId> candidates;
  for (const CubeBoundary& c : store.cubes()) {
    const MultiIndex idx = grid.cube_index(c.cube);
    const bool straddles = std::all_of(planes.begin(), planes.end(), [&](const Hyperplane& h) {
      double lo = -h.offset, hi = -h.offset;
      for (int k = 0; k < d; ++k) {
        const double a = h.normal[k] * grid.coordinate(idx[k]);
        const double b = h.normal[k] * grid.coordinate(idx[k] + 1);
        lo += std::min(a, b);
        hi += std::max(a, b);
      }
      return lo <= kOnPlane && hi >= -kOnPlane;
    });
    if (straddles) candidates.push_back(c.cube);
  }

  std::vector<std::vector<SlicePolygon>> partial(chunk_count(candidates.size(), workers));
  parallel_for(candidates.size(), workers, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    std::vector<CutPoint> pts;
    for (std::size_t i = begin; i < end; ++i) {
      const MultiIndex idx = grid.cube_index(candidates[i]);
      std::uint64_t ordinal = 0;
      enumerate_simplices(store, candidates[i], [&](const ResistarSimplex& s) {
        const std::uint64_t n = ordinal++;
        if (!cut_simplex(s.vertices, d, planes, pts)) return;
        std::vector<Vec3> projected;
        for (const CutPoint& p : pts) projected.push_back({dot(mesh.basis[0], p.x), dot(mesh.basis[1], p.x), dot(mesh.basis[2], p.x)});
        std::vector<Vec3> hull = planar_hull(projected);
        if (hull.empty()) return;
        partial[chunk].push_back({std::move(hull), idx, s.simplex_index, n});
      });
    }
  });
  for (auto& p : partial) {
    for (auto& poly : p) mesh.polygons.push_back(std::move(poly));
  }
  return mesh;
}

MeshFormat mesh_format_from_string(const std::string& tag) {
  if (tag == "obj") return MeshFormat::Obj;
  if (tag == "json") return MeshFormat::Json;
  throw UsageError("unsupported mesh format \"" + tag + "\" (expected obj or json)");
}

void export_mesh(const SliceMesh& mesh, MeshFormat format, std::ostream& out) {
  if (format == MeshFormat::Json) {
    nlohmann::json polys = nlohmann::json::array();
    for (const SlicePolygon& p : mesh.polygons) {
      polys.push_back({{"cube", p.cube}, {"simplex", p.simplex_index}, {"ordinal", p.ordinal}, {"vertices", p.vertices}});
    }
    nlohmann::json doc{{"format", "resistar-slice"}, {"d", mesh.dim}, {"basis", mesh.basis}, {"polygons", std::move(polys)}};
    if (!mesh.free_axes.empty()) doc["free_axes"] = mesh.free_axes;
    out << doc.dump(1) << '\n';
    return;
  }
  std::map<std::array<long long, 3>, std::size_t> index;
  std::vector<Vec3> vertices;
  std::vector<std::vector<std::size_t>> faces;
  for (const SlicePolygon& p : mesh.polygons) {
    std::vector<std::size_t> face;
    for (const Vec3& v : p.vertices) {
      const std::array<long long, 3> key{std::llround(v[0] / kDedup), std::llround(v[1] / kDedup),
                                         std::llround(v[2] / kDedup)};
      auto [it, inserted] = index.emplace(key, vertices.size());
      if (inserted) vertices.push_back(v);
      face.push_back(it->second + 1);
    }
    faces.push_back(std::move(face));
  }
  out << "# resistar slice, d=" << mesh.dim << ", " << mesh.polygons.size() << " polygons\n";
  char buf[96];
  for (const Vec3& v : vertices) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v[0], v[1], v[2]);
    out << buf;
  }
  for (const auto& f : faces) {
    out << 'f';
    for (std::size_t i : f) out << ' ' << i;
    out << '\n';
  }
}

}  // namespace resistar
