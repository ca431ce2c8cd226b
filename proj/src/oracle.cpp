#include "resistar/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "resistar/errors.hpp"

namespace resistar {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Label sign_of(double v) {
  if (v > 0.0) return Label::Positive;
  if (v < 0.0) return Label::Negative;
  return Label::Zero;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

void require_dim(std::span<const double> x, std::size_t dim) {
  if (x.size() != dim) throw DomainError("point has wrong dimension for oracle");
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

OracleSpec make_hyperplane(Point normal, double offset) {
  double norm2 = 0.0;
  for (double v : normal) norm2 += v * v;
  if (normal.empty() || !(norm2 > 0.0)) throw DomainError("hyperplane normal must be nonzero");
  if (!std::isfinite(offset)) throw DomainError("hyperplane offset must be finite");
  return HyperplaneOracle{std::move(normal), offset};
}

OracleSpec make_sphere(Point center, double radius) {
  if (center.empty()) throw DomainError("sphere center must be nonempty");
  if (!(radius > 0.0)) throw DomainError("sphere radius must be positive");
  return SphereOracle{std::move(center), radius};
}

OracleSpec make_radial(std::vector<Point> positive_sites, std::vector<Point> negative_sites,
                       double sigma) {
  if (!(sigma > 0.0)) throw DomainError("radial sigma must be positive");
  if (positive_sites.empty() || negative_sites.empty()) {
    throw DomainError("radial oracle needs nonempty positive and negative site lists");
  }
  const std::size_t dim = positive_sites.front().size();
  if (dim == 0) throw DomainError("radial sites must be nonempty points");
  for (const auto* list : {&positive_sites, &negative_sites}) {
    for (const Point& p : *list) {
      if (p.size() != dim) throw DomainError("radial sites have inconsistent dimensions");
    }
  }
  return RadialOracle{std::move(positive_sites), std::move(negative_sites), sigma};
}

OracleSpec make_grid_labels(int dim, int points_per_axis, std::vector<std::int8_t> labels) {
  const GridSpec grid(dim, points_per_axis);
  if (labels.size() != grid.vertex_count()) {
    throw DomainError("grid label array has " + std::to_string(labels.size()) +
                      " entries, expected " + std::to_string(grid.vertex_count()));
  }
  for (std::int8_t l : labels) {
    if (l < -1 || l > 1) throw DomainError("grid labels must be -1, 0 or +1");
  }
  return GridLabelsOracle{dim, points_per_axis, std::move(labels)};
}

OracleSpec random_radial(int dim, int n_sites, double sigma, std::uint64_t seed) {
  if (dim < 1) throw DomainError("radial oracle dimension must be positive");
  if (n_sites < 1) throw DomainError("radial oracle needs at least one site per sign");
  std::mt19937_64 rng(seed);
  auto draw = [&] {
    Point p(dim);
    for (double& v : p) v = uniform01(rng);
    return p;
  };
  std::vector<Point> positive(n_sites);
  std::vector<Point> negative(n_sites);
  for (Point& p : positive) p = draw();
  for (Point& p : negative) p = draw();
  return make_radial(std::move(positive), std::move(negative), sigma);
}

int oracle_dimension(const OracleSpec& spec) {
  return std::visit(Overloaded{
                        [](const HyperplaneOracle& o) { return static_cast<int>(o.normal.size()); },
                        [](const SphereOracle& o) { return static_cast<int>(o.center.size()); },
                        [](const RadialOracle& o) {
                          return static_cast<int>(o.positive_sites.front().size());
                        },
                        [](const GridLabelsOracle& o) { return o.dim; },
                    },
                    spec);
}

Label evaluate(const OracleSpec& spec, std::span<const double> x) {
  return std::visit(
      Overloaded{
          [&](const HyperplaneOracle& o) {
            require_dim(x, o.normal.size());
            double s = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) s += o.normal[k] * x[k];
            return sign_of(s - o.offset);
          },
          [&](const SphereOracle& o) {
            require_dim(x, o.center.size());
            return sign_of(std::sqrt(squared_distance(x, o.center)) - o.radius);
          },
          [&](const RadialOracle& o) {
            require_dim(x, o.positive_sites.front().size());
            const double inv_s2 = 1.0 / (o.sigma * o.sigma);
            double pos = 0.0;
            double neg = 0.0;
            for (const Point& p : o.positive_sites) pos += 100.0 / (1.0 + squared_distance(p, x) * inv_s2);
            for (const Point& n : o.negative_sites) neg += 100.0 / (1.0 + squared_distance(n, x) * inv_s2);
            return sign_of(pos - neg);
          },
          [&](const GridLabelsOracle& o) {
            require_dim(x, static_cast<std::size_t>(o.dim));
            const int scale = o.points_per_axis - 1;
            std::uint64_t linear = 0;
            for (int k = 0; k < o.dim; ++k) {
              // nearest grid line, ties toward the lower index
              int i = static_cast<int>(std::ceil(x[k] * scale - 0.5));
              i = std::clamp(i, 0, scale);
              linear = linear * o.points_per_axis + static_cast<std::uint64_t>(i);
            }
            return label_from_int(o.labels[linear]);
          },
      },
      spec);
}

std::optional<double> signed_distance(const OracleSpec& spec, std::span<const double> x) {
  if (const auto* h = std::get_if<HyperplaneOracle>(&spec)) {
    require_dim(x, h->normal.size());
    double s = 0.0;
    double n2 = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      s += h->normal[k] * x[k];
      n2 += h->normal[k] * h->normal[k];
    }
    return (s - h->offset) / std::sqrt(n2);
  }
  if (const auto* s = std::get_if<SphereOracle>(&spec)) {
    require_dim(x, s->center.size());
    return std::sqrt(squared_distance(x, s->center)) - s->radius;
  }
  return std::nullopt;
}

nlohmann::json oracle_to_json(const OracleSpec& spec) {
  using nlohmann::json;
  return std::visit(Overloaded{
                        [](const HyperplaneOracle& o) {
                          return json{{"type", "hyperplane"}, {"normal", o.normal}, {"offset", o.offset}};
                        },
                        [](const SphereOracle& o) {
                          return json{{"type", "sphere"}, {"center", o.center}, {"radius", o.radius}};
                        },
                        [](const RadialOracle& o) {
                          return json{{"type", "radial"},
                                      {"positive_sites", o.positive_sites},
                                      {"negative_sites", o.negative_sites},
                                      {"sigma", o.sigma}};
                        },
                        [](const GridLabelsOracle& o) {
                          return json{{"type", "grid_labels"},
                                      {"dim", o.dim},
                                      {"points_per_axis", o.points_per_axis},
                                      {"labels", o.labels}};
                        },
                    },
                    spec);
}

OracleSpec oracle_from_json(const nlohmann::json& j, std::optional<int> default_dim) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "hyperplane") {
      return make_hyperplane(j.at("normal").get<Point>(), j.at("offset").get<double>());
    }
    if (type == "sphere") {
      return make_sphere(j.at("center").get<Point>(), j.at("radius").get<double>());
    }
    if (type == "radial") {
      return make_radial(j.at("positive_sites").get<std::vector<Point>>(),
                         j.at("negative_sites").get<std::vector<Point>>(), j.at("sigma").get<double>());
    }
    if (type == "radial_random") {
      int dim = 0;
      if (j.contains("dim")) {
        dim = j.at("dim").get<int>();
      } else if (default_dim) {
        dim = *default_dim;
      } else {
        throw FormatError("radial_random oracle needs \"dim\"");
      }
      return random_radial(dim, j.at("sites").get<int>(), j.at("sigma").get<double>(),
                           j.value("seed", std::uint64_t{0}));
    }
    if (type == "grid_labels") {
      return make_grid_labels(j.at("dim").get<int>(), j.at("points_per_axis").get<int>(),
                              j.at("labels").get<std::vector<std::int8_t>>());
    }
    throw FormatError("unknown oracle type \"" + type + "\"");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid oracle specification: ") + e.what());
  } catch (const DomainError& e) {
    throw FormatError(std::string("invalid oracle specification: ") + e.what());
  }
}

std::string oracle_digest(const OracleSpec& spec) {
  const std::string text = oracle_to_json(spec).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Oracle::Oracle(OracleSpec spec)
    : dim_(oracle_dimension(spec)), spec_(std::move(spec)), digest_(oracle_digest(*spec_)) {}

Oracle::Oracle(int dim, Function fn, std::string digest)
    : dim_(dim), fn_(std::move(fn)), digest_(std::move(digest)) {
  if (dim < 1) throw DomainError("oracle dimension must be positive");
  if (!fn_) throw ContractViolation("oracle function is empty");
}

Label Oracle::evaluate(std::span<const double> x) const {
  calls_.fetch_add(1, std::memory_order_relaxed);
  if (spec_) return resistar::evaluate(*spec_, x);
  return fn_(x);
}

Label sanitized_vertex_label(const Oracle& oracle, const GridSpec& grid, VertexId v) {
  const std::vector<double> x = grid.vertex_coordinates(v);
  return oracle.evaluate_sanitized(x);
}

}  // namespace resistar
