#include "resistar/boundary.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <tuple>

#include "resistar/errors.hpp"
#include "resistar/parallel.hpp"

namespace resistar {

std::string_view to_string(Variant v) { return v == Variant::Cube ? "cube" : "kuhn"; }

Variant variant_from_string(std::string_view s) {
  if (s == "cube") return Variant::Cube;
  if (s == "kuhn") return Variant::Kuhn;
  throw UsageError("unknown variant \"" + std::string(s) + "\" (expected cube or kuhn)");
}

BoundaryStore::BoundaryStore(GridSpec grid, Variant variant, int q, std::string oracle_digest,
                             Label fallback_label, std::vector<CubeBoundary> cubes,
                             bool diagonal_refinement)
    : grid_(std::move(grid)),
      variant_(variant),
      q_(q),
      diagonal_refinement_(diagonal_refinement),
      oracle_digest_(std::move(oracle_digest)),
      fallback_label_(fallback_label),
      cubes_(std::move(cubes)) {
  if (q_ < 1) throw FormatError("boundary store: q must be at least 1");
  if (fallback_label_ == Label::Zero) throw FormatError("boundary store: fallback label must be nonzero");
  const VertexMask full = grid_.full_mask();
  index_.reserve(cubes_.size());
  for (std::size_t i = 0; i < cubes_.size(); ++i) {
    const CubeBoundary& entry = cubes_[i];
    if (entry.cube.linear >= grid_.cube_count()) throw FormatError("boundary store: cube id out of range");
    if (i > 0 && !(cubes_[i - 1].cube < entry.cube)) {
      throw FormatError("boundary store: cubes must be unique and in ascending order");
    }
    if (entry.points.empty()) throw FormatError("boundary store: listed cube has no boundary point");
    for (const BoundaryPoint& b : entry.points) {
      const bool inside = (b.minus & ~full) == 0 && (b.plus & ~full) == 0;
      const bool comparable = b.minus != b.plus && (b.lower() == b.minus || b.lower() == b.plus);
      if (!inside || !comparable) throw FormatError("boundary store: point edge is not a cube edge");
      if (variant_ == Variant::Cube && std::popcount(b.minus ^ b.plus) != 1) {
        throw FormatError("boundary store: cube-variant point on a diagonal");
      }
      if (!(b.t > 0.0 && b.t < 1.0)) throw FormatError("boundary store: t outside (0,1)");
    }
    index_.emplace(entry.cube.linear, i);
  }
}

const std::vector<BoundaryPoint>* BoundaryStore::find(CubeId c) const {
  const auto it = index_.find(c.linear);
  return it == index_.end() ? nullptr : &cubes_[it->second].points;
}

std::size_t BoundaryStore::point_incidences() const {
  std::size_t n = 0;
  for (const auto& c : cubes_) n += c.points.size();
  return n;
}

int default_dichotomies(const GridSpec& grid) {
  int q = 0;
  while ((std::uint64_t{1} << q) < static_cast<std::uint64_t>(grid.points_per_axis() - 1)) ++q;
  return std::max(q, 1);
}

int diagonal_extra_dichotomies(int axes) {
  // smallest e with 2^e >= sqrt(axes), i.e. 4^e >= axes
  int e = 0;
  while ((std::uint64_t{1} << (2 * e)) < static_cast<std::uint64_t>(axes)) ++e;
  return e;
}

namespace detail {

double bisect(const Oracle& oracle, std::span<const double> v_minus, std::span<const double> v_plus,
              int q, std::span<double> scratch) {
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < q; ++i) {
    const double mid = 0.5 * (lo + hi);
    for (std::size_t k = 0; k < v_minus.size(); ++k) {
      scratch[k] = v_minus[k] + mid * (v_plus[k] - v_minus[k]);
    }
    if (oracle.evaluate_sanitized(scratch) == Label::Positive) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

double dichotomy_boundary(const Oracle& oracle, std::span<const double> v_minus,
                          std::span<const double> v_plus, int q) {
  if (q < 1) throw DomainError("dichotomy count must be at least 1");
  if (v_minus.size() != v_plus.size() || static_cast<int>(v_minus.size()) != oracle.dim()) {
    throw DomainError("edge endpoints have wrong dimension");
  }
  if (oracle.evaluate_sanitized(v_minus) != Label::Negative ||
      oracle.evaluate_sanitized(v_plus) != Label::Positive) {
    throw ContractViolation("dichotomy needs endpoint labels -1 and +1");
  }
  std::vector<double> scratch(v_minus.size());
  return detail::bisect(oracle, v_minus, v_plus, q, scratch);
}

namespace {

struct Entry {
  std::uint64_t cube;
  std::uint64_t lower;  // global vertex ids of the edge, lower one first
  std::uint64_t upper;
  BoundaryPoint point;
};

void next_index(MultiIndex& index, int points) {
  for (int k = static_cast<int>(index.size()) - 1; k >= 0; --k) {
    if (++index[k] < points) return;
    index[k] = 0;
  }
}

MultiIndex decode(std::uint64_t linear, int dim, int points) {
  MultiIndex index(dim);
  for (int k = dim - 1; k >= 0; --k) {
    index[k] = static_cast<int>(linear % points);
    linear /= points;
  }
  return index;
}

}  // namespace

BoundaryStore build_store(const Oracle& oracle, const GridSpec& grid, Variant variant,
                          const BuildOptions& options) {
  const int d = grid.dim();
  const int n = grid.points_per_axis();
  if (oracle.dim() != d) throw DomainError("oracle dimension does not match grid dimension");
  const int q = options.q == 0 ? default_dichotomies(grid) : options.q;
  if (q < 1) throw DomainError("dichotomy count must be at least 1");
  const bool refine = options.diagonal_refinement && variant == Variant::Kuhn;

  // Vertex labels live only for the duration of the build.
  const std::uint64_t vertex_count = grid.vertex_count();
  std::vector<std::int8_t> labels(vertex_count);
  parallel_for(vertex_count, options.workers, [&](std::size_t begin, std::size_t end, std::size_t) {
    if (begin >= end) return;
    MultiIndex index = decode(begin, d, n);
    std::vector<double> x(d);
    for (std::size_t v = begin; v < end; ++v) {
      for (int k = 0; k < d; ++k) x[k] = grid.coordinate(index[k]);
      labels[v] = static_cast<std::int8_t>(to_int(oracle.evaluate_sanitized(x)));
      next_index(index, n);
    }
  });

  const std::size_t chunks = chunk_count(vertex_count, options.workers);
  std::vector<std::vector<Entry>> partial(chunks);
  parallel_for(vertex_count, options.workers, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    if (begin >= end) return;
    std::vector<Entry>& out = partial[chunk];
    MultiIndex index = decode(begin, d, n);
    std::vector<double> a(d), b(d), scratch(d);
    std::vector<int> free_sides;
    for (std::size_t u = begin; u < end; ++u, next_index(index, n)) {
      VertexMask upward = 0;  // axes along which u has an upper neighbour
      for (int k = 0; k < d; ++k) {
        if (index[k] < n - 1) upward |= VertexMask{1} << k;
      }
      if (upward == 0) continue;
      auto visit_direction = [&](VertexMask dir) {
        std::uint64_t w = u;
        for (int k = 0; k < d; ++k) {
          if ((dir >> k) & 1U) w += grid.vertex_stride(k);
        }
        const std::int8_t lu = labels[u];
        const std::int8_t lw = labels[w];
        if (lu == lw) return;
        // endpoints in the -1 -> +1 orientation
        for (int k = 0; k < d; ++k) {
          const double lo = grid.coordinate(index[k]);
          const double hi = grid.coordinate(index[k] + static_cast<int>((dir >> k) & 1U));
          a[k] = lu < 0 ? lo : hi;
          b[k] = lu < 0 ? hi : lo;
        }
        int edge_q = q;
        if (refine) edge_q += diagonal_extra_dichotomies(std::popcount(dir));
        const double t = detail::bisect(oracle, a, b, edge_q, scratch);

        // every cube containing the edge: along fixed axes, u sits on either side
        std::vector<int> axes;
        for (int k = 0; k < d; ++k) {
          if (!((dir >> k) & 1U)) axes.push_back(k);
        }
        const std::uint32_t combos = std::uint32_t{1} << axes.size();
        for (std::uint32_t sel = 0; sel < combos; ++sel) {
          std::uint64_t cube = 0;
          VertexMask lower = 0;
          bool valid = true;
          for (int k = 0; k < d && valid; ++k) {
            int ck = index[k];
            if (!((dir >> k) & 1U)) {
              const auto pos = static_cast<std::size_t>(
                  std::find(axes.begin(), axes.end(), k) - axes.begin());
              if ((sel >> pos) & 1U) {  // cube below u on this axis
                ck = index[k] - 1;
                lower |= VertexMask{1} << k;
              }
            }
            if (ck < 0 || ck > n - 2) valid = false;
            else cube += static_cast<std::uint64_t>(ck) * grid.cube_stride(k);
          }
          if (!valid) continue;
          const VertexMask upper = lower | dir;
          BoundaryPoint bp{lu < 0 ? lower : upper, lu < 0 ? upper : lower, t};
          out.push_back({cube, u, w, bp});
        }
      };
      if (variant == Variant::Cube) {
        for (int k = 0; k < d; ++k) {
          if ((upward >> k) & 1U) visit_direction(VertexMask{1} << k);
        }
      } else {
        for (VertexMask dir = upward; dir != 0; dir = (dir - 1) & upward) visit_direction(dir);
      }
    }
  });

  std::vector<Entry> entries;
  {
    std::size_t total = 0;
    for (const auto& p : partial) total += p.size();
    entries.reserve(total);
    for (auto& p : partial) {
      entries.insert(entries.end(), p.begin(), p.end());
      std::vector<Entry>().swap(p);
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return std::tie(x.cube, x.lower, x.upper) < std::tie(y.cube, y.lower, y.upper);
  });

  std::vector<CubeBoundary> cubes;
  for (const Entry& e : entries) {
    if (cubes.empty() || cubes.back().cube.linear != e.cube) cubes.push_back({CubeId{e.cube}, {}});
    cubes.back().points.push_back(e.point);
  }
  const Label fallback = label_from_int(labels.front());
  return BoundaryStore(grid, variant, q, oracle.digest(), fallback, std::move(cubes), refine);
}

std::vector<BoundaryPoint> boundary_points_of_face(const BoundaryStore& store, CubeId c, FaceCode f) {
  std::vector<BoundaryPoint> result;
  const auto* points = store.find(c);
  if (points == nullptr) return result;
  for (const BoundaryPoint& b : *points) {
    if (f.contains(b.minus) && f.contains(b.plus)) result.push_back(b);
  }
  return result;
}

VertexId vertex_minus(const GridSpec& grid, CubeId c, const BoundaryPoint& b) {
  return grid.cube_vertex(c, b.minus);
}

VertexId vertex_plus(const GridSpec& grid, CubeId c, const BoundaryPoint& b) {
  return grid.cube_vertex(c, b.plus);
}

void global_point(const GridSpec& grid, std::span<const int> cube_index, const BoundaryPoint& b,
                  std::span<double> out) {
  for (int k = 0; k < grid.dim(); ++k) {
    const double from = grid.coordinate(cube_index[k] + static_cast<int>((b.minus >> k) & 1U));
    const double to = grid.coordinate(cube_index[k] + static_cast<int>((b.plus >> k) & 1U));
    out[k] = from + b.t * (to - from);
  }
}

void global_point(const GridSpec& grid, CubeId c, const BoundaryPoint& b, std::span<double> out) {
  const MultiIndex index = grid.cube_index(c);
  global_point(grid, index, b, out);
}

Point global_point(const GridSpec& grid, CubeId c, const BoundaryPoint& b) {
  Point x(grid.dim());
  global_point(grid, c, b, x);
  return x;
}

void local_point(const BoundaryPoint& b, int dim, std::span<double> out) {
  for (int k = 0; k < dim; ++k) {
    const double from = static_cast<double>((b.minus >> k) & 1U);
    const double to = static_cast<double>((b.plus >> k) & 1U);
    out[k] = from + b.t * (to - from);
  }
}

}  // namespace resistar
