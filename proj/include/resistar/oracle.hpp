#pragma once

// The labelling oracle: a black box telling on which side of the unknown
// manifold a point of [0,1]^d lies.

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "resistar/grid.hpp"

namespace resistar {

enum class Label : std::int8_t { Negative = -1, Zero = 0, Positive = 1 };

inline int to_int(Label l) { return static_cast<int>(l); }
inline Label label_from_int(int v) { return v > 0 ? Label::Positive : (v < 0 ? Label::Negative : Label::Zero); }
inline Label negate(Label l) { return static_cast<Label>(-static_cast<int>(l)); }
/// Zero maps to +1 (grid-vertex sanitization rule).
inline Label sanitize(Label l) { return l == Label::Zero ? Label::Positive : l; }

using Point = std::vector<double>;

struct HyperplaneOracle {
  Point normal;
  double offset = 0.0;
};

/// Inside of the ball is labelled -1.
struct SphereOracle {
  Point center;
  double radius = 0.0;
};

/// sign(Σ φ(|p_i - x|/σ) - Σ φ(|n_i - x|/σ)), φ(u) = 100 / (1 + u²).
struct RadialOracle {
  std::vector<Point> positive_sites;
  std::vector<Point> negative_sites;
  double sigma = 0.0;
};

/// Labels precomputed on a grid of its own; a point takes the label of its
/// nearest vertex in that grid.
struct GridLabelsOracle {
  int dim = 0;
  int points_per_axis = 0;
  std::vector<std::int8_t> labels;
};

using OracleSpec = std::variant<HyperplaneOracle, SphereOracle, RadialOracle, GridLabelsOracle>;

OracleSpec make_hyperplane(Point normal, double offset);
OracleSpec make_sphere(Point center, double radius);
OracleSpec make_radial(std::vector<Point> positive_sites, std::vector<Point> negative_sites,
                       double sigma);
OracleSpec make_grid_labels(int dim, int points_per_axis, std::vector<std::int8_t> labels);

/// Sites of both signs drawn uniformly in [0,1]^d from a seeded 64-bit
/// Mersenne twister; identical for identical arguments on every platform.
OracleSpec random_radial(int dim, int n_sites, double sigma, std::uint64_t seed);

int oracle_dimension(const OracleSpec& spec);

/// Pure evaluation; exact zero returns Label::Zero.
Label evaluate(const OracleSpec& spec, std::span<const double> x);

/// Signed Euclidean distance to the separating surface, where it is known in
/// closed form (hyperplane, sphere).
std::optional<double> signed_distance(const OracleSpec& spec, std::span<const double> x);

nlohmann::json oracle_to_json(const OracleSpec& spec);
/// Accepts the concrete variants plus {"type":"radial_random", "dim", "sites",
/// "sigma", "seed"}, which is expanded through random_radial. `default_dim`
/// fills in a missing "dim" for radial_random.
OracleSpec oracle_from_json(const nlohmann::json& j, std::optional<int> default_dim = std::nullopt);

/// 16 hex digits identifying the oracle (FNV-1a of its canonical JSON).
std::string oracle_digest(const OracleSpec& spec);

/// Oracle as used by the builders: either an OracleSpec or an arbitrary
/// callable, with a thread-safe count of evaluations.
class Oracle {
 public:
  using Function = std::function<Label(std::span<const double>)>;

  explicit Oracle(OracleSpec spec);
  Oracle(int dim, Function fn, std::string digest);

  Oracle(const Oracle&) = delete;
  Oracle& operator=(const Oracle&) = delete;

  int dim() const { return dim_; }
  const std::string& digest() const { return digest_; }
  /// Null for callable-backed oracles.
  const OracleSpec* spec() const { return spec_ ? &*spec_ : nullptr; }

  Label evaluate(std::span<const double> x) const;
  Label evaluate_sanitized(std::span<const double> x) const { return sanitize(evaluate(x)); }

  std::uint64_t calls() const { return calls_.load(std::memory_order_relaxed); }
  void reset_calls() { calls_.store(0, std::memory_order_relaxed); }

 private:
  int dim_;
  std::optional<OracleSpec> spec_;
  Function fn_;
  std::string digest_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

/// Label of a grid vertex with the zero label replaced by +1.
Label sanitized_vertex_label(const Oracle& oracle, const GridSpec& grid, VertexId v);

}  // namespace resistar
