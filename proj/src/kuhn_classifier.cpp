#include "resistar/kuhn_classifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "resistar/errors.hpp"

namespace resistar {

namespace {

constexpr double kWeightFloor = 1e-15;
constexpr double kInsideSlack = 1e-9;

using ChainSet = std::uint32_t;  // subset of chain positions 0..d

bool in_set(ChainSet s, int pos) { return (s >> pos) & 1U; }

struct ChainPoint {
  int minus;
  int plus;
  double t;
};

}  // namespace

int chain_position(std::span<const VertexMask> chain, VertexMask mask) {
  const int p = std::popcount(mask);
  return p < static_cast<int>(chain.size()) && chain[p] == mask ? p : -1;
}

std::vector<BoundaryPoint> filter_simplex_points(std::span<const BoundaryPoint> cube_points,
                                                 std::span<const VertexMask> chain) {
  std::vector<BoundaryPoint> out;
  for (const BoundaryPoint& b : cube_points) {
    if (chain_position(chain, b.minus) >= 0 && chain_position(chain, b.plus) >= 0) out.push_back(b);
  }
  return out;
}

std::vector<BoundaryPoint> simplex_boundary_points(const BoundaryStore& store, const KuhnSimplexRef& ref) {
  if (store.variant() != Variant::Kuhn) throw ContractViolation("simplex points need a Kuhn-variant store");
  const auto* points = store.find(ref.cube);
  if (points == nullptr) return {};
  return filter_simplex_points(*points, kuhn_chain(ref.perm));
}

SimplexFace face_of_no_boundary(const BoundaryStore& store, const KuhnSimplexRef& ref, Label sign) {
  if (sign == Label::Zero) throw DomainError("face sign must be -1 or +1");
  const std::vector<VertexMask> chain = kuhn_chain(ref.perm);
  const std::vector<BoundaryPoint> points = simplex_boundary_points(store, ref);
  if (points.empty()) throw ContractViolation("simplex holds no boundary points");
  std::vector<int> labels(chain.size(), 0);
  auto assign = [&](VertexMask m, int label) {
    int& slot = labels[chain_position(chain, m)];
    if (slot != 0 && slot != label) throw FormatError("vertex carries both labels; store is inconsistent");
    slot = label;
  };
  for (const BoundaryPoint& b : points) {
    assign(b.minus, -1);
    assign(b.plus, 1);
  }
  SimplexFace face{ref.cube, {}};
  for (std::size_t j = 0; j < chain.size(); ++j) {
    if (labels[j] == 0) throw FormatError("simplex vertex without label; store is inconsistent");
    if (labels[j] == to_int(sign)) face.vertices.push_back(chain[j]);
  }
  if (face.vertices.empty()) throw FormatError("simplex vertices share one label; store is inconsistent");
  return face;
}

std::vector<double> barycentric_weights(std::span<const int> perm, std::span<const double> local_x) {
  const int d = static_cast<int>(perm.size());
  std::vector<double> w(d + 1);
  // V_j holds the j largest axes, so w_j = x[perm[d-j]] - x[perm[d-j-1]]
  w[0] = 1.0 - local_x[perm[d - 1]];
  for (int j = 1; j < d; ++j) w[j] = local_x[perm[d - j]] - local_x[perm[d - j - 1]];
  w[d] = local_x[perm[0]];
  for (double& v : w) v = std::max(v, 0.0);
  return w;
}

Label classify_simplex_local(std::span<const BoundaryPoint> points, std::span<const int> perm,
                             std::span<const double> local_x, double edge_length, double delta) {
  if (points.empty()) throw ContractViolation("simplex holds no boundary points");
  const int d = static_cast<int>(perm.size());
  const std::vector<VertexMask> chain = kuhn_chain(perm);

  std::vector<ChainPoint> current;
  current.reserve(points.size());
  for (const BoundaryPoint& b : points) {
    const int im = chain_position(chain, b.minus);
    const int ip = chain_position(chain, b.plus);
    if (im < 0 || ip < 0) throw ContractViolation("boundary point is not on an edge of the simplex");
    current.push_back({im, ip, b.t});
  }
  std::vector<ChainPoint> next;

  ChainSet face = (ChainSet{1} << (d + 1)) - 1;
  std::vector<double> x = barycentric_weights(perm, local_x);
  std::vector<double> centre(d + 1);
  std::vector<double> dir(d + 1);

  while (true) {
    std::fill(centre.begin(), centre.end(), 0.0);
    for (const ChainPoint& b : current) {
      centre[b.minus] += 1.0 - b.t;
      centre[b.plus] += b.t;
    }
    const double inv = 1.0 / static_cast<double>(current.size());
    for (double& c : centre) c *= inv;

    // Cartesian distance: axis perm[d-j] has coordinate sum_{i>=j} w_i
    for (int j = 0; j <= d; ++j) dir[j] = x[j] - centre[j];
    double dist2 = 0.0;
    double tail = 0.0;
    for (int j = d; j >= 1; --j) {
      tail += dir[j];
      dist2 += tail * tail;
    }
    if (std::sqrt(dist2) * edge_length < delta) return Label::Zero;

    double best = std::numeric_limits<double>::infinity();
    int drop = -1;
    for (int j = 0; j <= d; ++j) {
      if (!in_set(face, j) || !(dir[j] < -kWeightFloor)) continue;
      const double t = centre[j] / -dir[j];
      if (t < best) {
        best = t;
        drop = j;
      }
    }
    if (drop < 0) return Label::Zero;

    const ChainSet facet = face & ~(ChainSet{1} << drop);
    next.clear();
    for (const ChainPoint& b : current) {
      if (in_set(facet, b.minus) && in_set(facet, b.plus)) next.push_back(b);
    }
    if (next.empty()) {
      for (const ChainPoint& b : current) {
        if (in_set(facet, b.plus)) return Label::Positive;
        if (in_set(facet, b.minus)) return Label::Negative;
      }
      throw ContractViolation("no boundary point touches the exit facet; store is inconsistent");
    }
    for (int j = 0; j <= d; ++j) x[j] = in_set(facet, j) ? std::max(centre[j] + best * dir[j], 0.0) : 0.0;
    face = facet;
    current.swap(next);
  }
}

Label classify_in_simplex(const BoundaryStore& store, const KuhnSimplexRef& ref, std::span<const double> x,
                          double delta) {
  if (store.variant() != Variant::Kuhn) throw ContractViolation("simplex classification needs a Kuhn-variant store");
  const GridSpec& grid = store.grid();
  const Point local = local_coordinates_in_cube(grid, ref.cube, x);
  for (int j = 1; j < grid.dim(); ++j) {
    if (local[ref.perm[j - 1]] > local[ref.perm[j]] + kInsideSlack) {
      throw DomainError("point lies outside the simplex");
    }
  }
  const std::vector<BoundaryPoint> points = simplex_boundary_points(store, ref);
  if (points.empty()) throw ContractViolation("simplex holds no boundary points");
  return classify_simplex_local(points, ref.perm, local, grid.epsilon(), delta);
}

}  // namespace resistar
