#pragma once

// Experimental protocol: sample points in the boundary cubes, compare the
// classification with the oracle, and scan grid sizes and dimensions.

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "resistar/boundary.hpp"
#include "resistar/classifier.hpp"

namespace resistar {

enum class Method { Cube, Kuhn, Nearest };

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

/// q for a grid: a fixed value, ceil(log2(n_G)) + offset ("log2"), or
/// default_dichotomies + offset ("default").
struct QPolicy {
  enum class Kind { Fixed, Log2, Default } kind = Kind::Default;
  int value = 0;  // fixed q, or the offset

  int resolve(const GridSpec& grid) const;
};

struct EvalConfig {
  nlohmann::json oracle;  // "radial_random" may omit "dim"; it is filled per dimension
  std::vector<int> dimensions;
  std::vector<int> grid_sizes;
  std::vector<Method> methods{Method::Cube, Method::Kuhn, Method::Nearest};
  QPolicy q;
  int samples_per_cube = 100;
  std::uint64_t seed = 1;
  double delta = kDefaultDelta;
  std::size_t workers = 0;
  bool diagonal_refinement = false;
  /// Overrides the template's "seed" for radial_random, one series each.
  std::vector<std::uint64_t> oracle_seeds;
};

EvalConfig eval_config_from_json(const nlohmann::json& j);
EvalConfig load_eval_config(const std::string& path);

struct ErrorStats {
  std::uint64_t samples = 0;
  std::uint64_t misclassified = 0;  // nonzero label differing from the oracle
  std::uint64_t zero_labels = 0;
  /// misclassified / (samples - zero_labels) * 100, 0 when nothing is scored.
  double error_pct() const;
};

/// Uniform point `i` of cube `c`; depends only on (seed, c, i).
void sample_in_cube(const GridSpec& grid, std::span<const int> cube_index, std::uint64_t cube_linear,
                    std::uint64_t seed, std::uint64_t i, std::span<double> out);

/// Scores `samples_per_cube` points in every store cube against the
/// sanitized oracle label.
ErrorStats measure_error(const Classifier& classifier, const Oracle& oracle, int samples_per_cube,
                         std::uint64_t seed, std::size_t workers = 0);

/// Label of the grid vertex nearest to x; ties go to the lexicographically
/// smallest vertex.
Label nearest_vertex_classify(const GridSpec& grid, const std::function<Label(VertexId)>& labels,
                              std::span<const double> x);

/// Nearest-vertex baseline scored on the same samples of the given cubes.
ErrorStats measure_nearest_error(const GridSpec& grid, const Oracle& oracle, std::span<const CubeId> cubes,
                                 int samples_per_cube, std::uint64_t seed, std::size_t workers = 0);

/// Cubes whose vertices do not all share one sanitized label.
std::vector<CubeId> mixed_cubes(const Oracle& oracle, const GridSpec& grid, std::size_t workers = 0);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Least squares of log10(value) on log10(n). Needs 3 points; values must be positive.
SlopeFit slope_fit(std::span<const std::pair<double, double>> points);

struct EvalRow {
  int d = 0;
  int n_g = 0;
  Method method = Method::Cube;
  std::uint64_t oracle_seed = 0;
  int q = 0;
  std::uint64_t boundary_cubes = 0;
  std::uint64_t total_cubes = 0;
  std::uint64_t boundary_points = 0;
  std::uint64_t simplices = 0;
  std::uint64_t oracle_calls = 0;
  ErrorStats stats;
  double wall_seconds = 0.0;

  double error_pct_in_cubes() const { return stats.error_pct(); }
  /// Error as a share of the whole domain: in-cube rate times the volume
  /// fraction of boundary cubes.
  double error_pct() const;
};

struct SlopeRow {
  int d = 0;
  Method method = Method::Cube;
  std::string series;    // oracle seed, or "mean" over seeds
  std::string quantity;  // error_pct, boundary_points, simplices
  SlopeFit fit;
  bool valid = false;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::vector<SlopeRow> slopes;
};

EvalReport scan(const EvalConfig& config);

/// Wall time is left out so equal configs give byte-identical files.
void write_report_csv(const EvalReport& report, std::ostream& out);
void write_slopes_csv(const EvalReport& report, std::ostream& out);

}  // namespace resistar
