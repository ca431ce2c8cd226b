#include "resistar/enumerator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "resistar/errors.hpp"
#include "resistar/kuhn_classifier.hpp"
#include "resistar/parallel.hpp"

namespace resistar {

namespace {

struct GlobalPoint {
  BoundaryPoint local;
  std::uint64_t lower;  // global ids of the edge
  std::uint64_t upper;
  Point x;
};

std::vector<GlobalPoint> sorted_global_points(const GridSpec& grid, CubeId c,
                                              const std::vector<BoundaryPoint>& points) {
  const MultiIndex index = grid.cube_index(c);
  std::vector<GlobalPoint> out;
  out.reserve(points.size());
  for (const BoundaryPoint& b : points) {
    GlobalPoint g{b, 0, 0, Point(grid.dim())};
    for (int k = 0; k < grid.dim(); ++k) {
      g.lower += static_cast<std::uint64_t>(index[k] + static_cast<int>((b.lower() >> k) & 1U)) * grid.vertex_stride(k);
      g.upper += static_cast<std::uint64_t>(index[k] + static_cast<int>((b.upper() >> k) & 1U)) * grid.vertex_stride(k);
    }
    global_point(grid, index, b, g.x);
    out.push_back(std::move(g));
  }
  // Summation order fixed by the global edge so shared faces get identical barycentres.
  std::sort(out.begin(), out.end(), [](const GlobalPoint& a, const GlobalPoint& b) {
    return std::tie(a.lower, a.upper) < std::tie(b.lower, b.upper);
  });
  return out;
}

template <class InFace>
void barycentre(const std::vector<GlobalPoint>& points, InFace in_face, int d, double* out) {
  std::fill(out, out + d, 0.0);
  std::size_t n = 0;
  for (const GlobalPoint& p : points) {
    if (!in_face(p.local)) continue;
    for (int k = 0; k < d; ++k) out[k] += p.x[k];
    ++n;
  }
  for (int k = 0; k < d; ++k) out[k] /= static_cast<double>(n);
}

// Calls emit() once per ordering of `remaining`, with faces[level..] filled by
// grow(previous face, element).
template <class Face, class Grow, class Emit>
void chains(std::vector<Face>& faces, int level, std::vector<int>& remaining, Grow grow, Emit emit) {
  if (level == static_cast<int>(faces.size())) {
    emit();
    return;
  }
  for (std::size_t i = 0; i < remaining.size(); ++i) {
    const int e = remaining[i];
    faces[level] = grow(faces[level - 1], e);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(i));
    chains(faces, level + 1, remaining, grow, emit);
    remaining.insert(remaining.begin() + static_cast<std::ptrdiff_t>(i), e);
  }
}

void enumerate_cube_variant(const GridSpec& grid, CubeId c, const std::vector<GlobalPoint>& points,
                            const SimplexVisitor& visit) {
  const int d = grid.dim();
  const VertexMask full = grid.full_mask();
  std::map<FaceCode, Point> cache;
  auto face_centre = [&](FaceCode f) -> const Point& {
    auto it = cache.find(f);
    if (it == cache.end()) {
      Point centre(d);
      barycentre(points, [&](const BoundaryPoint& b) { return f.contains(b.minus) && f.contains(b.plus); }, d,
                 centre.data());
      it = cache.emplace(f, std::move(centre)).first;
    }
    return it->second;
  };
  const Point& cube_centre = face_centre(FaceCode::whole_cube(d));

  std::vector<double> vertices(static_cast<std::size_t>(d) * d);
  std::vector<FaceCode> faces(std::max(d - 1, 0));
  std::vector<int> remaining;
  for (const GlobalPoint& p : points) {
    const VertexMask axis = p.local.minus ^ p.local.plus;
    ResistarSimplex s{c, -1, {}, p.local, vertices, faces, {}};
    auto emit = [&] {
      std::copy(p.x.begin(), p.x.end(), vertices.begin());
      for (int i = 1; i < d - 1; ++i) {
        const Point& centre = face_centre(faces[i]);
        std::copy(centre.begin(), centre.end(), vertices.begin() + static_cast<std::ptrdiff_t>(i) * d);
      }
      if (d > 1) std::copy(cube_centre.begin(), cube_centre.end(), vertices.end() - d);
      visit(s);
    };
    if (d == 1) {
      emit();
      continue;
    }
    faces[0] = FaceCode{axis, p.local.lower() & ~axis};
    // F_{d-1} leaves one axis fixed: pick it, then order the other d-2
    std::vector<int> others;
    for (int k = 0; k < d; ++k) {
      if (!((axis >> k) & 1U)) others.push_back(k);
    }
    for (std::size_t skip = 0; skip < others.size(); ++skip) {
      remaining.clear();
      for (std::size_t i = 0; i < others.size(); ++i) {
        if (i != skip) remaining.push_back(others[i]);
      }
      chains(
          faces, 1, remaining,
          [&](FaceCode f, int k) {
            const VertexMask bit = VertexMask{1} << k;
            return FaceCode{f.free_axes | bit, f.offsets & ~bit & full};
          },
          emit);
    }
  }
}

void enumerate_kuhn_variant(const GridSpec& grid, CubeId c, const std::vector<GlobalPoint>& points,
                            const SimplexVisitor& visit) {
  const int d = grid.dim();
  std::map<std::vector<VertexMask>, Point> cache;
  std::vector<VertexMask> chain;
  auto face_centre = [&](std::uint32_t set) -> const Point& {
    std::vector<VertexMask> key;
    for (int j = 0; j <= d; ++j) {
      if ((set >> j) & 1U) key.push_back(chain[j]);
    }
    auto it = cache.find(key);
    if (it == cache.end()) {
      Point centre(d);
      auto member = [&](VertexMask m) { return std::find(key.begin(), key.end(), m) != key.end(); };
      barycentre(points, [&](const BoundaryPoint& b) { return member(b.minus) && member(b.plus); }, d,
                 centre.data());
      it = cache.emplace(std::move(key), std::move(centre)).first;
    }
    return it->second;
  };

  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> vertices(static_cast<std::size_t>(d) * d);
  std::vector<std::uint32_t> faces(std::max(d - 1, 0));
  std::vector<int> remaining;
  int rank = 0;
  do {
    chain = kuhn_chain(perm);
    std::vector<const GlobalPoint*> inside;
    for (const GlobalPoint& p : points) {
      if (chain_position(chain, p.local.minus) >= 0 && chain_position(chain, p.local.plus) >= 0) {
        inside.push_back(&p);
      }
    }
    if (!inside.empty()) {
      const std::uint32_t all = (std::uint32_t{1} << (d + 1)) - 1;
      const Point simplex_centre = face_centre(all);
      for (const GlobalPoint* p : inside) {
        const int i = chain_position(chain, p->local.minus);
        const int j = chain_position(chain, p->local.plus);
        ResistarSimplex s{c, rank, perm, p->local, vertices, {}, faces};
        auto emit = [&] {
          std::copy(p->x.begin(), p->x.end(), vertices.begin());
          for (int f = 1; f < d - 1; ++f) {
            const Point& centre = face_centre(faces[f]);
            std::copy(centre.begin(), centre.end(), vertices.begin() + static_cast<std::ptrdiff_t>(f) * d);
          }
          if (d > 1) std::copy(simplex_centre.begin(), simplex_centre.end(), vertices.end() - d);
          visit(s);
        };
        if (d == 1) {
          emit();
          continue;
        }
        faces[0] = (std::uint32_t{1} << i) | (std::uint32_t{1} << j);
        std::vector<int> others;
        for (int v = 0; v <= d; ++v) {
          if (v != i && v != j) others.push_back(v);
        }
        for (std::size_t skip = 0; skip < others.size(); ++skip) {
          remaining.clear();
          for (std::size_t o = 0; o < others.size(); ++o) {
            if (o != skip) remaining.push_back(others[o]);
          }
          chains(faces, 1, remaining, [](std::uint32_t f, int v) { return f | (std::uint32_t{1} << v); }, emit);
        }
      }
    }
    ++rank;
  } while (std::next_permutation(perm.begin(), perm.end()));
}

using u128 = unsigned __int128;

u128 factorial(int n) {
  u128 f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<u128>(i);
  return f;
}

std::uint64_t narrow(u128 v) {
  if (v > static_cast<u128>(UINT64_MAX)) throw NumericError("simplex count exceeds 64 bits");
  return static_cast<std::uint64_t>(v);
}

}  // namespace

void enumerate_simplices(const BoundaryStore& store, CubeId c, const SimplexVisitor& visit) {
  const auto* points = store.find(c);
  if (points == nullptr) return;
  const std::vector<GlobalPoint> sorted = sorted_global_points(store.grid(), c, *points);
  if (store.variant() == Variant::Cube) {
    enumerate_cube_variant(store.grid(), c, sorted, visit);
  } else {
    enumerate_kuhn_variant(store.grid(), c, sorted, visit);
  }
}

void enumerate_all(const BoundaryStore& store, const SimplexVisitor& visit) {
  for (const CubeBoundary& c : store.cubes()) enumerate_simplices(store, c.cube, visit);
}

SimplexCount count_simplices(const BoundaryStore& store) {
  const GridSpec& grid = store.grid();
  const int d = grid.dim();
  if (d > 30) throw NumericError("dimension too large for simplex counting");
  const u128 chains = factorial(d - 1);
  SimplexCount count;
  u128 simplices = 0;
  for (const CubeBoundary& c : store.cubes()) {
    const MultiIndex index = grid.cube_index(c.cube);
    for (const BoundaryPoint& b : c.points) {
      ++count.point_incidences;
      const VertexMask lower = b.lower();
      const VertexMask upper = b.upper();
      bool owner = true;
      for (int k = 0; k < d && owner; ++k) {
        if ((((lower ^ upper) >> k) & 1U) == 0 && ((lower >> k) & 1U) == 0 && index[k] != 0) owner = false;
      }
      if (owner) ++count.boundary_points;
      if (store.variant() == Variant::Cube) {
        simplices += chains;
      } else {
        const int lo = std::popcount(lower);
        const int hi = std::popcount(upper);
        simplices += chains * factorial(lo) * factorial(hi - lo) * factorial(d - hi);
      }
    }
  }
  count.simplices = narrow(simplices);
  return count;
}

std::uint64_t count_simplices_streamed(const BoundaryStore& store, std::size_t workers) {
  const auto cubes = store.cubes();
  std::vector<std::uint64_t> partial(chunk_count(cubes.size(), workers), 0);
  parallel_for(cubes.size(), workers, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    std::uint64_t n = 0;
    for (std::size_t i = begin; i < end; ++i) {
      enumerate_simplices(store, cubes[i].cube, [&](const ResistarSimplex&) { ++n; });
    }
    partial[chunk] = n;
  });
  return std::accumulate(partial.begin(), partial.end(), std::uint64_t{0});
}

namespace {

using Key = std::vector<std::int64_t>;

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::int64_t v : k) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

constexpr double kQuantum = 1e-12;

}  // namespace

WatertightReport watertightness_check(const BoundaryStore& store, int cap) {
  const int d = store.grid().dim();
  if (d > cap) {
    throw UsageError("watertightness check enumerates every simplex; d=" + std::to_string(d) +
                     " exceeds the cap of " + std::to_string(cap));
  }
  WatertightReport report;
  if (d < 2) {
    enumerate_all(store, [&](const ResistarSimplex&) { ++report.simplices; });
    report.euler_characteristic = static_cast<std::int64_t>(report.simplices);
    return report;
  }

  // vertex keys -> small ids, so faces are keyed by sorted id lists
  std::unordered_map<Key, std::int64_t, KeyHash> vertex_ids;
  std::vector<Key> vertex_keys;
  std::vector<std::unordered_set<Key, KeyHash>> faces_by_dim(d);
  std::unordered_map<Key, int, KeyHash> facet_incidence;

  std::vector<std::int64_t> ids(d);
  Key key(d);
  enumerate_all(store, [&](const ResistarSimplex& s) {
    ++report.simplices;
    for (int v = 0; v < d; ++v) {
      for (int k = 0; k < d; ++k) key[k] = std::llround(s.vertices[v * d + k] / kQuantum);
      auto [it, inserted] = vertex_ids.emplace(key, static_cast<std::int64_t>(vertex_keys.size()));
      if (inserted) vertex_keys.push_back(key);
      ids[v] = it->second;
    }
    std::vector<std::int64_t> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    // every nonempty subset is a face of the complex
    for (std::uint32_t sub = 1; sub < (std::uint32_t{1} << d); ++sub) {
      Key face;
      for (int v = 0; v < d; ++v) {
        if ((sub >> v) & 1U) face.push_back(sorted[v]);
      }
      const int dim = std::popcount(sub) - 1;
      if (dim == d - 2) ++facet_incidence[face];
      faces_by_dim[dim].insert(std::move(face));
    }
  });

  const std::int64_t one = std::llround(1.0 / kQuantum);
  for (const auto& [facet, incidence] : facet_incidence) {
    ++report.facets;
    bool on_box = false;
    for (int k = 0; k < d && !on_box; ++k) {
      bool all_low = true;
      bool all_high = true;
      for (std::int64_t v : facet) {
        const std::int64_t c = vertex_keys[v][k];
        all_low = all_low && c == 0;
        all_high = all_high && c == one;
      }
      on_box = all_low || all_high;
    }
    if (on_box) continue;
    ++report.interior_facets;
    ++report.incidence_histogram[incidence];
    report.max_incidence = std::max(report.max_incidence, incidence);
    if (incidence != 2) ++report.bad_facets;
  }
  for (int dim = 0; dim < d; ++dim) {
    const auto n = static_cast<std::int64_t>(faces_by_dim[dim].size());
    report.euler_characteristic += (dim % 2 == 0) ? n : -n;
  }
  return report;
}

}  // namespace resistar
