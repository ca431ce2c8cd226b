#include "resistar/eval.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

#include "resistar/enumerator.hpp"
#include "resistar/errors.hpp"
#include "resistar/parallel.hpp"

namespace resistar {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// make_scorer(cube) returns a callable x -> (classifier label, oracle label).
template <class MakeScorer>
ErrorStats score_cubes(const GridSpec& grid, std::span<const CubeId> cubes, int samples_per_cube, std::uint64_t seed,
                       std::size_t workers, MakeScorer make_scorer) {
  if (samples_per_cube < 1) throw DomainError("samples per cube must be at least 1");
  std::vector<ErrorStats> partial(chunk_count(cubes.size(), workers));
  parallel_for(cubes.size(), workers, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    ErrorStats s;
    Point x(grid.dim());
    for (std::size_t i = begin; i < end; ++i) {
      const MultiIndex idx = grid.cube_index(cubes[i]);
      auto score = make_scorer(cubes[i]);
      for (int j = 0; j < samples_per_cube; ++j) {
        sample_in_cube(grid, idx, cubes[i].linear, seed, static_cast<std::uint64_t>(j), x);
        const auto [got, want] = score(x);
        ++s.samples;
        if (got == Label::Zero) ++s.zero_labels;
        else if (got != want) ++s.misclassified;
      }
    }
    partial[chunk] = s;
  });
  ErrorStats total;
  for (const ErrorStats& s : partial) {
    total.samples += s.samples;
    total.misclassified += s.misclassified;
    total.zero_labels += s.zero_labels;
  }
  return total;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Cube: return "cube";
    case Method::Kuhn: return "kuhn";
    case Method::Nearest: return "nearest";
  }
  return "?";
}

Method method_from_string(std::string_view s) {
  if (s == "cube") return Method::Cube;
  if (s == "kuhn") return Method::Kuhn;
  if (s == "nearest") return Method::Nearest;
  throw UsageError("unknown method \"" + std::string(s) + "\" (expected cube, kuhn or nearest)");
}

int QPolicy::resolve(const GridSpec& grid) const {
  int q = 0;
  switch (kind) {
    case Kind::Fixed:
      q = value;
      break;
    case Kind::Log2: {
      int l = 0;
      while ((1LL << l) < grid.points_per_axis()) ++l;
      q = l + value;
      break;
    }
    case Kind::Default:
      q = default_dichotomies(grid) + value;
      break;
  }
  if (q < 1 || q > 52) throw DomainError("resolved dichotomy count " + std::to_string(q) + " out of range");
  return q;
}

EvalConfig eval_config_from_json(const nlohmann::json& j) {
  try {
    EvalConfig c;
    c.oracle = j.at("oracle");
    c.dimensions = j.at("dimensions").get<std::vector<int>>();
    c.grid_sizes = j.at("grid_sizes").get<std::vector<int>>();
    if (j.contains("variants")) {
      c.methods.clear();
      for (const auto& v : j.at("variants")) c.methods.push_back(method_from_string(v.get<std::string>()));
    }
    if (j.contains("q")) {
      const auto& q = j.at("q");
      if (q.is_number_integer()) {
        c.q = {QPolicy::Kind::Fixed, q.get<int>()};
      } else {
        const std::string policy = q.at("policy").get<std::string>();
        if (policy == "log2") c.q.kind = QPolicy::Kind::Log2;
        else if (policy == "default") c.q.kind = QPolicy::Kind::Default;
        else throw FormatError("unknown q policy \"" + policy + "\"");
        c.q.value = q.value("offset", 0);
      }
    }
    c.samples_per_cube = j.value("samples_per_cube", c.samples_per_cube);
    c.seed = j.value("seed", c.seed);
    c.delta = j.value("delta", c.delta);
    c.workers = j.value("workers", c.workers);
    c.diagonal_refinement = j.value("diagonal_refinement", c.diagonal_refinement);
    if (j.contains("oracle_seeds")) c.oracle_seeds = j.at("oracle_seeds").get<std::vector<std::uint64_t>>();

    if (c.dimensions.empty() || c.grid_sizes.empty() || c.methods.empty()) {
      throw FormatError("config needs nonempty dimensions, grid_sizes and variants");
    }
    for (int d : c.dimensions) {
      if (d < 1 || d > kMaxDimension) throw FormatError("config dimension out of range");
    }
    for (int n : c.grid_sizes) {
      if (n < 2) throw FormatError("config grid sizes must be at least 2");
    }
    if (c.samples_per_cube < 1) throw FormatError("samples_per_cube must be at least 1");
    if (!(c.delta >= 0.0)) throw FormatError("delta must be nonnegative");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid evaluation config: ") + e.what());
  } catch (const UsageError& e) {
    throw FormatError(std::string("invalid evaluation config: ") + e.what());
  }
}

EvalConfig load_eval_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  return eval_config_from_json(j);
}

double ErrorStats::error_pct() const {
  const std::uint64_t scored = samples - zero_labels;
  return scored == 0 ? 0.0 : 100.0 * static_cast<double>(misclassified) / static_cast<double>(scored);
}

void sample_in_cube(const GridSpec& grid, std::span<const int> cube_index, std::uint64_t cube_linear,
                    std::uint64_t seed, std::uint64_t i, std::span<double> out) {
  const std::uint64_t base = splitmix64(splitmix64(splitmix64(seed) ^ cube_linear) ^ i);
  for (int k = 0; k < grid.dim(); ++k) {
    const std::uint64_t h = splitmix64(base ^ static_cast<std::uint64_t>(k));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    out[k] = std::min(grid.coordinate(cube_index[k]) + u * grid.epsilon(), grid.coordinate(cube_index[k] + 1));
  }
}

ErrorStats measure_error(const Classifier& classifier, const Oracle& oracle, int samples_per_cube,
                         std::uint64_t seed, std::size_t workers) {
  const BoundaryStore& store = classifier.store();
  std::vector<CubeId> cubes;
  cubes.reserve(store.cubes().size());
  for (const CubeBoundary& c : store.cubes()) cubes.push_back(c.cube);
  return score_cubes(store.grid(), cubes, samples_per_cube, seed, workers, [&](CubeId c) {
    return [&, c](std::span<const double> x) {
      return std::pair{classifier.classify_in_store_cube(c, x), oracle.evaluate_sanitized(x)};
    };
  });
}

Label nearest_vertex_classify(const GridSpec& grid, const std::function<Label(VertexId)>& labels,
                              std::span<const double> x) {
  if (static_cast<int>(x.size()) != grid.dim()) throw DomainError("point has wrong dimension");
  const double scale = grid.points_per_axis() - 1;
  std::uint64_t v = 0;
  for (int k = 0; k < grid.dim(); ++k) {
    if (!(x[k] >= 0.0 && x[k] <= 1.0)) throw DomainError("point lies outside [0,1]^d");
    const int i = std::clamp(static_cast<int>(std::ceil(x[k] * scale - 0.5)), 0, grid.points_per_axis() - 1);
    v += static_cast<std::uint64_t>(i) * grid.vertex_stride(k);
  }
  return labels(VertexId{v});
}

ErrorStats measure_nearest_error(const GridSpec& grid, const Oracle& oracle, std::span<const CubeId> cubes,
                                 int samples_per_cube, std::uint64_t seed, std::size_t workers) {
  // A sample's nearest vertex is a corner of its cube, so corner labels are
  // evaluated lazily per cube instead of over the whole grid.
  return score_cubes(grid, cubes, samples_per_cube, seed, workers, [&](CubeId) {
    return [&grid, &oracle, memo = std::map<std::uint64_t, Label>{}](std::span<const double> x) mutable {
      auto labels = [&](VertexId v) {
        auto it = memo.find(v.linear);
        if (it == memo.end()) it = memo.emplace(v.linear, sanitized_vertex_label(oracle, grid, v)).first;
        return it->second;
      };
      return std::pair{nearest_vertex_classify(grid, labels, x), oracle.evaluate_sanitized(x)};
    };
  });
}

std::vector<CubeId> mixed_cubes(const Oracle& oracle, const GridSpec& grid, std::size_t workers) {
  const int d = grid.dim();
  std::vector<std::int8_t> labels(grid.vertex_count());
  parallel_for(labels.size(), workers, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t v = begin; v < end; ++v) {
      labels[v] = static_cast<std::int8_t>(to_int(sanitized_vertex_label(oracle, grid, VertexId{v})));
    }
  });
  std::vector<CubeId> out;
  for (std::uint64_t c = 0; c < grid.cube_count(); ++c) {
    const MultiIndex idx = grid.cube_index(CubeId{c});
    std::uint64_t base = 0;
    for (int k = 0; k < d; ++k) base += static_cast<std::uint64_t>(idx[k]) * grid.vertex_stride(k);
    bool mixed = false;
    for (VertexMask m = 1; m <= grid.full_mask() && !mixed; ++m) {
      std::uint64_t v = base;
      for (int k = 0; k < d; ++k) {
        if ((m >> k) & 1U) v += grid.vertex_stride(k);
      }
      mixed = labels[v] != labels[base];
    }
    if (mixed) out.push_back(CubeId{c});
  }
  return out;
}

SlopeFit slope_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw DomainError("slope fit needs at least 3 points");
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw DomainError("slope fit needs positive values");
    sx += std::log10(x);
    sy += std::log10(y);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : points) {
    const double dx = std::log10(x) - mx;
    const double dy = std::log10(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw DomainError("slope fit needs distinct abscissae");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  fit.points = points.size();
  return fit;
}

double EvalRow::error_pct() const {
  if (total_cubes == 0) return 0.0;
  return error_pct_in_cubes() * static_cast<double>(boundary_cubes) / static_cast<double>(total_cubes);
}

EvalReport scan(const EvalConfig& config) {
  EvalReport report;
  const bool random_oracle = config.oracle.value("type", std::string()) == "radial_random";
  std::vector<std::uint64_t> seeds = config.oracle_seeds;
  if (seeds.empty() || !random_oracle) seeds = {random_oracle ? config.oracle.value("seed", std::uint64_t{0}) : 0};

  for (int d : config.dimensions) {
    for (std::uint64_t oracle_seed : seeds) {
      nlohmann::json spec = config.oracle;
      if (random_oracle) spec["seed"] = oracle_seed;
      Oracle oracle(oracle_from_json(spec, d));
      if (oracle.dim() != d) {
        throw FormatError("oracle dimension " + std::to_string(oracle.dim()) + " does not match scanned d=" +
                          std::to_string(d));
      }
      for (int n : config.grid_sizes) {
        const GridSpec grid(d, n);
        const int q = config.q.resolve(grid);
        for (Method method : config.methods) {
          const auto start = std::chrono::steady_clock::now();
          EvalRow row;
          row.d = d;
          row.n_g = n;
          row.method = method;
          row.oracle_seed = oracle_seed;
          row.total_cubes = grid.cube_count();
          oracle.reset_calls();
          if (method == Method::Nearest) {
            const std::vector<CubeId> cubes = mixed_cubes(oracle, grid, config.workers);
            row.oracle_calls = oracle.calls();
            row.boundary_cubes = cubes.size();
            row.stats = measure_nearest_error(grid, oracle, cubes, config.samples_per_cube, config.seed, config.workers);
          } else {
            row.q = q;
            BuildOptions options{q, config.diagonal_refinement, config.workers};
            auto store = std::make_shared<const BoundaryStore>(
                build_store(oracle, grid, method == Method::Cube ? Variant::Cube : Variant::Kuhn, options));
            row.oracle_calls = oracle.calls();
            row.boundary_cubes = store->cubes().size();
            const SimplexCount count = count_simplices(*store);
            row.boundary_points = count.boundary_points;
            row.simplices = count.simplices;
            const Classifier classifier(store, config.delta);
            row.stats = measure_error(classifier, oracle, config.samples_per_cube, config.seed, config.workers);
          }
          row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          report.rows.push_back(row);
        }
      }
    }
  }

  // slopes per (d, method, series)
  auto fit_series = [&](int d, Method method, const std::string& series, const std::string& quantity,
                        const std::vector<std::pair<double, double>>& pts) {
    SlopeRow s{d, method, series, quantity, {}, false};
    if (pts.size() >= 3) {
      try {
        s.fit = slope_fit(pts);
        s.valid = true;
      } catch (const DomainError&) {
        s.fit.points = pts.size();
      }
    } else {
      s.fit.points = pts.size();
    }
    report.slopes.push_back(s);
  };
  for (int d : config.dimensions) {
    for (Method method : config.methods) {
      std::map<int, std::pair<double, int>> mean;  // n -> (sum, count)
      for (std::uint64_t seed : seeds) {
        std::vector<std::pair<double, double>> err, points, simplices;
        for (const EvalRow& r : report.rows) {
          if (r.d != d || r.method != method || r.oracle_seed != seed) continue;
          err.emplace_back(r.n_g, r.error_pct());
          points.emplace_back(r.n_g, static_cast<double>(r.boundary_points));
          simplices.emplace_back(r.n_g, static_cast<double>(r.simplices));
          mean[r.n_g].first += r.error_pct();
          mean[r.n_g].second += 1;
        }
        const std::string series = std::to_string(seed);
        fit_series(d, method, series, "error_pct", err);
        if (method != Method::Nearest) {
          fit_series(d, method, series, "boundary_points", points);
          fit_series(d, method, series, "simplices", simplices);
        }
      }
      if (seeds.size() > 1) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& [n, acc] : mean) pts.emplace_back(n, acc.first / acc.second);
        fit_series(d, method, "mean", "error_pct", pts);
      }
    }
  }
  return report;
}

void write_report_csv(const EvalReport& report, std::ostream& out) {
  out << "d,n_g,variant,oracle_seed,q,boundary_cubes,total_cubes,boundary_points,simplices,oracle_calls,"
         "samples,misclassified,zero_labels,error_pct_in_cubes,error_pct\n";
  for (const EvalRow& r : report.rows) {
    out << r.d << ',' << r.n_g << ',' << to_string(r.method) << ',' << r.oracle_seed << ',' << r.q << ','
        << r.boundary_cubes << ',' << r.total_cubes << ',' << r.boundary_points << ',' << r.simplices << ','
        << r.oracle_calls << ',' << r.stats.samples << ',' << r.stats.misclassified << ',' << r.stats.zero_labels
        << ',' << fmt(r.error_pct_in_cubes()) << ',' << fmt(r.error_pct()) << '\n';
  }
}

void write_slopes_csv(const EvalReport& report, std::ostream& out) {
  out << "d,variant,series,quantity,slope,r2,points\n";
  for (const SlopeRow& s : report.slopes) {
    out << s.d << ',' << to_string(s.method) << ',' << s.series << ',' << s.quantity << ','
        << (s.valid ? fmt(s.fit.slope) : "nan") << ',' << (s.valid ? fmt(s.fit.r2) : "nan") << ',' << s.fit.points
        << '\n';
  }
}

}  // namespace resistar
