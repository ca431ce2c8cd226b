#include "resistar/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "resistar/errors.hpp"

namespace resistar {

namespace {

// Local-coordinate slack when deciding that a point lies inside a cube.
constexpr double kInsideSlack = 1e-9;

std::uint64_t checked_power(std::uint64_t base, int exponent) {
  std::uint64_t result = 1;
  for (int i = 0; i < exponent; ++i) {
    if (base != 0 && result > std::numeric_limits<std::uint64_t>::max() / 4 / base) {
      throw DomainError("grid too large: n_G^d does not fit in 62 bits");
    }
    result *= base;
  }
  return result;
}

}  // namespace

GridSpec::GridSpec(int dim, int points_per_axis) : dim_(dim), points_(points_per_axis) {
  if (dim < 1 || dim > kMaxDimension) {
    throw DomainError("grid dimension must be in [1, " + std::to_string(kMaxDimension) +
                      "], got " + std::to_string(dim));
  }
  if (points_per_axis < 2) {
    throw DomainError("grid needs at least 2 points per axis, got " +
                      std::to_string(points_per_axis));
  }
  epsilon_ = 1.0 / (points_ - 1);
  vertex_count_ = checked_power(static_cast<std::uint64_t>(points_), dim_);
  cube_count_ = checked_power(static_cast<std::uint64_t>(points_ - 1), dim_);
  vertex_strides_.assign(dim_, 1);
  cube_strides_.assign(dim_, 1);
  for (int k = dim_ - 2; k >= 0; --k) {
    vertex_strides_[k] = vertex_strides_[k + 1] * points_;
    cube_strides_[k] = cube_strides_[k + 1] * (points_ - 1);
  }
}

bool GridSpec::valid_vertex(std::span<const int> index) const {
  if (static_cast<int>(index.size()) != dim_) return false;
  return std::all_of(index.begin(), index.end(), [&](int i) { return i >= 0 && i < points_; });
}

bool GridSpec::valid_cube(std::span<const int> index) const {
  if (static_cast<int>(index.size()) != dim_) return false;
  return std::all_of(index.begin(), index.end(), [&](int i) { return i >= 0 && i < points_ - 1; });
}

VertexId GridSpec::vertex_id(std::span<const int> index) const {
  if (!valid_vertex(index)) throw DomainError("vertex multi-index out of range");
  std::uint64_t linear = 0;
  for (int k = 0; k < dim_; ++k) linear += static_cast<std::uint64_t>(index[k]) * vertex_strides_[k];
  return {linear};
}

MultiIndex GridSpec::vertex_index(VertexId v) const {
  if (v.linear >= vertex_count_) throw DomainError("vertex id out of range");
  MultiIndex index(dim_);
  std::uint64_t rest = v.linear;
  for (int k = 0; k < dim_; ++k) {
    index[k] = static_cast<int>(rest / vertex_strides_[k]);
    rest %= vertex_strides_[k];
  }
  return index;
}

CubeId GridSpec::cube_id(std::span<const int> index) const {
  if (!valid_cube(index)) throw DomainError("cube multi-index out of range");
  std::uint64_t linear = 0;
  for (int k = 0; k < dim_; ++k) linear += static_cast<std::uint64_t>(index[k]) * cube_strides_[k];
  return {linear};
}

MultiIndex GridSpec::cube_index(CubeId c) const {
  if (c.linear >= cube_count_) throw DomainError("cube id out of range");
  MultiIndex index(dim_);
  std::uint64_t rest = c.linear;
  for (int k = 0; k < dim_; ++k) {
    index[k] = static_cast<int>(rest / cube_strides_[k]);
    rest %= cube_strides_[k];
  }
  return index;
}

std::vector<double> GridSpec::vertex_coordinates(VertexId v) const {
  const MultiIndex index = vertex_index(v);
  std::vector<double> x(dim_);
  for (int k = 0; k < dim_; ++k) x[k] = coordinate(index[k]);
  return x;
}

VertexId GridSpec::cube_vertex(CubeId c, VertexMask local) const {
  const MultiIndex index = cube_index(c);
  std::uint64_t linear = 0;
  for (int k = 0; k < dim_; ++k) {
    const int i = index[k] + static_cast<int>((local >> k) & 1U);
    linear += static_cast<std::uint64_t>(i) * vertex_strides_[k];
  }
  return {linear};
}

std::vector<double> GridSpec::cube_centre(CubeId c) const {
  const MultiIndex index = cube_index(c);
  std::vector<double> x(dim_);
  for (int k = 0; k < dim_; ++k) x[k] = (index[k] + 0.5) * epsilon_;
  return x;
}

void GridSpec::to_local(CubeId c, std::span<const double> x, std::span<double> local) const {
  const MultiIndex index = cube_index(c);
  const double scale = points_ - 1;
  for (int k = 0; k < dim_; ++k) local[k] = x[k] * scale - index[k];
}

void GridSpec::to_global(CubeId c, std::span<const double> local, std::span<double> x) const {
  const MultiIndex index = cube_index(c);
  for (int k = 0; k < dim_; ++k) x[k] = (index[k] + local[k]) * epsilon_;
}

int FaceCode::dim() const { return std::popcount(free_axes); }

CubeId cube_of_point(const GridSpec& grid, std::span<const double> x) {
  if (static_cast<int>(x.size()) != grid.dim()) throw DomainError("point has wrong dimension");
  MultiIndex index(grid.dim());
  const double scale = grid.points_per_axis() - 1;
  for (int k = 0; k < grid.dim(); ++k) {
    if (!(x[k] >= 0.0 && x[k] <= 1.0)) {
      throw DomainError("point coordinate " + std::to_string(k) + " outside [0,1]");
    }
    const int i = static_cast<int>(std::floor(x[k] * scale));
    index[k] = std::min(i, grid.points_per_axis() - 2);
  }
  return grid.cube_id(index);
}

KuhnSimplexRef kuhn_simplex_of_point(const GridSpec& grid, CubeId cube, std::span<const double> x) {
  const int d = grid.dim();
  if (static_cast<int>(x.size()) != d) throw DomainError("point has wrong dimension");
  std::vector<double> local(d);
  grid.to_local(cube, x, local);
  for (double v : local) {
    if (v < -kInsideSlack || v > 1.0 + kInsideSlack) throw DomainError("point outside cube");
  }
  KuhnSimplexRef ref{cube, std::vector<int>(d)};
  std::iota(ref.perm.begin(), ref.perm.end(), 0);
  std::stable_sort(ref.perm.begin(), ref.perm.end(),
                   [&](int a, int b) { return local[a] < local[b]; });
  return ref;
}

std::vector<VertexMask> kuhn_chain(std::span<const int> perm) {
  const int d = static_cast<int>(perm.size());
  std::vector<VertexMask> chain(d + 1, 0);
  for (int j = 1; j <= d; ++j) chain[j] = chain[j - 1] | (VertexMask{1} << perm[d - j]);
  return chain;
}

std::vector<LocalEdge> cube_edge_masks(int dim) {
  std::vector<LocalEdge> edges;
  const VertexMask count = VertexMask{1} << dim;
  for (VertexMask v = 0; v < count; ++v) {
    for (int k = 0; k < dim; ++k) {
      const VertexMask bit = VertexMask{1} << k;
      if ((v & bit) == 0) edges.push_back({v, v | bit});
    }
  }
  return edges;
}

std::vector<LocalEdge> kuhn_edge_masks(int dim) {
  std::vector<LocalEdge> edges;
  const VertexMask count = VertexMask{1} << dim;
  for (VertexMask upper = 1; upper < count; ++upper) {
    // proper subsets of `upper`, including the empty set
    for (VertexMask lower = (upper - 1) & upper;; lower = (lower - 1) & upper) {
      edges.push_back({lower, upper});
      if (lower == 0) break;
    }
  }
  std::sort(edges.begin(), edges.end(), [](const LocalEdge& a, const LocalEdge& b) {
    return a.lower != b.lower ? a.lower < b.lower : a.upper < b.upper;
  });
  return edges;
}

namespace {

std::vector<std::pair<VertexId, VertexId>> to_global_edges(const GridSpec& grid, CubeId cube,
                                                           const std::vector<LocalEdge>& local) {
  std::vector<std::pair<VertexId, VertexId>> edges;
  edges.reserve(local.size());
  for (const LocalEdge& e : local) {
    edges.emplace_back(grid.cube_vertex(cube, e.lower), grid.cube_vertex(cube, e.upper));
  }
  return edges;
}

}  // namespace

std::vector<std::pair<VertexId, VertexId>> cube_edges(const GridSpec& grid, CubeId cube) {
  return to_global_edges(grid, cube, cube_edge_masks(grid.dim()));
}

std::vector<std::pair<VertexId, VertexId>> kuhn_edges(const GridSpec& grid, CubeId cube) {
  return to_global_edges(grid, cube, kuhn_edge_masks(grid.dim()));
}

std::vector<FaceCode> subfaces(FaceCode face, int i) {
  const int dim = face.dim();
  if (i < 0 || i >= dim) {
    throw DomainError("subface dimension " + std::to_string(i) + " must be below face dimension " +
                      std::to_string(dim));
  }
  std::vector<int> free;
  for (int k = 0; k < 32; ++k) {
    if ((face.free_axes >> k) & 1U) free.push_back(k);
  }
  std::vector<FaceCode> result;
  // subsets of the free axes of size i stay free; the rest get fixed to 0 or 1
  const std::uint32_t subsets = std::uint32_t{1} << dim;
  for (std::uint32_t keep = 0; keep < subsets; ++keep) {
    if (std::popcount(keep) != i) continue;
    VertexMask kept = 0;
    VertexMask fixed = 0;
    for (int j = 0; j < dim; ++j) {
      ((keep >> j) & 1U ? kept : fixed) |= VertexMask{1} << free[j];
    }
    // enumerate all offset assignments on the newly fixed axes
    for (VertexMask side = fixed;; side = (side - 1) & fixed) {
      result.push_back({kept, face.offsets | side});
      if (side == 0) break;
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace resistar
