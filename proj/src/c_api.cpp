#include "resistar/resistar.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "resistar/boundary.hpp"
#include "resistar/classifier.hpp"
#include "resistar/enumerator.hpp"
#include "resistar/errors.hpp"
#include "resistar/eval.hpp"
#include "resistar/slicer.hpp"
#include "resistar/store_io.hpp"

struct rs_oracle {
  std::unique_ptr<resistar::Oracle> oracle;
};

struct rs_store {
  std::shared_ptr<const resistar::BoundaryStore> store;
};

struct rs_classifier {
  std::unique_ptr<resistar::Classifier> classifier;
};

struct rs_mesh {
  resistar::SliceMesh mesh;
};

namespace {

thread_local std::string g_last_error;

rs_status fail(rs_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class Fn>
rs_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RS_OK;
  } catch (const resistar::UsageError& e) {
    return fail(RS_ERR_USAGE, e.what());
  } catch (const resistar::DomainError& e) {
    return fail(RS_ERR_DOMAIN, e.what());
  } catch (const resistar::IoError& e) {
    return fail(RS_ERR_IO, e.what());
  } catch (const resistar::FormatError& e) {
    return fail(RS_ERR_DATA, e.what());
  } catch (const resistar::ContractViolation& e) {
    return fail(RS_ERR_DATA, e.what());
  } catch (const resistar::NumericError& e) {
    return fail(RS_ERR_DATA, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(RS_ERR_DATA, e.what());
  } catch (const std::bad_alloc&) {
    return fail(RS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RS_ERR_INTERNAL, "unknown error");
  }
}

#define RS_REQUIRE(cond, what) \
  if (!(cond)) return fail(RS_ERR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* rs_last_error(void) { return g_last_error.c_str(); }

const char* rs_status_name(rs_status status) {
  switch (status) {
    case RS_OK: return "ok";
    case RS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RS_ERR_USAGE: return "usage error";
    case RS_ERR_DATA: return "data error";
    case RS_ERR_DOMAIN: return "domain error";
    case RS_ERR_IO: return "i/o error";
    case RS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* rs_version(void) { return "1.0.0"; }

rs_status rs_oracle_from_json(const char* json, int default_dim, rs_oracle** out) {
  RS_REQUIRE(json && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
      throw resistar::FormatError(std::string("oracle spec: ") + e.what());
    }
    auto spec = resistar::oracle_from_json(j, default_dim > 0 ? std::optional<int>(default_dim) : std::nullopt);
    *out = new rs_oracle{std::make_unique<resistar::Oracle>(std::move(spec))};
  });
}

rs_status rs_oracle_from_file(const char* path, int default_dim, rs_oracle** out) {
  RS_REQUIRE(path && out, "null argument");
  *out = nullptr;
  std::string text;
  const rs_status read = guarded([&] {
    std::ifstream in(path);
    if (!in) throw resistar::IoError(std::string("cannot open ") + path);
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  });
  if (read != RS_OK) return read;
  return rs_oracle_from_json(text.c_str(), default_dim, out);
}

rs_status rs_oracle_from_callback(int dim, rs_label_fn fn, void* user, const char* digest, rs_oracle** out) {
  RS_REQUIRE(fn && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto call = [fn, user](std::span<const double> x) {
      return resistar::label_from_int(fn(x.data(), static_cast<int>(x.size()), user));
    };
    *out = new rs_oracle{std::make_unique<resistar::Oracle>(dim, call, digest ? digest : "callback")};
  });
}

rs_status rs_oracle_dim(const rs_oracle* oracle, int* dim) {
  RS_REQUIRE(oracle && dim, "null argument");
  *dim = oracle->oracle->dim();
  return RS_OK;
}

rs_status rs_oracle_evaluate(const rs_oracle* oracle, const double* x, int dim, int* label) {
  RS_REQUIRE(oracle && x && label, "null argument");
  RS_REQUIRE(dim == oracle->oracle->dim(), "point dimension does not match the oracle");
  return guarded([&] { *label = resistar::to_int(oracle->oracle->evaluate({x, static_cast<std::size_t>(dim)})); });
}

rs_status rs_oracle_calls(const rs_oracle* oracle, uint64_t* calls) {
  RS_REQUIRE(oracle && calls, "null argument");
  *calls = oracle->oracle->calls();
  return RS_OK;
}

void rs_oracle_free(rs_oracle* oracle) { delete oracle; }

rs_status rs_store_build(const rs_oracle* oracle, const rs_build_options* options, rs_store** out) {
  RS_REQUIRE(oracle && options && out, "null argument");
  RS_REQUIRE(options->variant == RS_VARIANT_CUBE || options->variant == RS_VARIANT_KUHN, "unknown variant");
  *out = nullptr;
  return guarded([&] {
    const resistar::GridSpec grid(oracle->oracle->dim(), options->points_per_axis);
    resistar::BuildOptions build{options->q, options->diagonal_refinement != 0, options->workers};
    const auto variant = options->variant == RS_VARIANT_CUBE ? resistar::Variant::Cube : resistar::Variant::Kuhn;
    auto store = std::make_shared<const resistar::BoundaryStore>(resistar::build_store(*oracle->oracle, grid, variant, build));
    *out = new rs_store{std::move(store)};
  });
}

rs_status rs_store_load(const char* path, rs_store** out) {
  RS_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new rs_store{std::make_shared<const resistar::BoundaryStore>(resistar::load_store(path))};
  });
}

rs_status rs_store_save(const rs_store* store, const char* path) {
  RS_REQUIRE(store && path, "null argument");
  return guarded([&] { resistar::save_store(*store->store, path); });
}

rs_status rs_store_info_get(const rs_store* store, rs_store_info* info) {
  RS_REQUIRE(store && info, "null argument");
  const resistar::BoundaryStore& s = *store->store;
  *info = rs_store_info{};
  info->dim = s.grid().dim();
  info->points_per_axis = s.grid().points_per_axis();
  info->q = s.q();
  info->variant = s.variant() == resistar::Variant::Cube ? RS_VARIANT_CUBE : RS_VARIANT_KUHN;
  info->diagonal_refinement = s.diagonal_refinement() ? 1 : 0;
  info->fallback_label = resistar::to_int(s.fallback_label());
  info->cubes = s.cubes().size();
  info->point_incidences = s.point_incidences();
  std::strncpy(info->oracle_digest, s.oracle_digest().c_str(), sizeof info->oracle_digest - 1);
  return RS_OK;
}

rs_status rs_store_count(const rs_store* store, rs_count* count) {
  RS_REQUIRE(store && count, "null argument");
  return guarded([&] {
    const resistar::SimplexCount c = resistar::count_simplices(*store->store);
    *count = rs_count{c.boundary_points, c.point_incidences, c.simplices};
  });
}

rs_status rs_store_count_streamed(const rs_store* store, size_t workers, uint64_t* simplices) {
  RS_REQUIRE(store && simplices, "null argument");
  return guarded([&] { *simplices = resistar::count_simplices_streamed(*store->store, workers); });
}

rs_status rs_store_watertight(const rs_store* store, int cap, rs_watertight_report* report) {
  RS_REQUIRE(store && report, "null argument");
  return guarded([&] {
    const auto r = resistar::watertightness_check(*store->store, cap > 0 ? cap : resistar::kDefaultEnumerationCap);
    *report = rs_watertight_report{r.simplices,     r.facets,    r.interior_facets, r.bad_facets,
                                   r.max_incidence, r.euler_characteristic, r.watertight() ? 1 : 0};
  });
}

void rs_store_free(rs_store* store) { delete store; }

rs_status rs_classifier_create(const rs_store* store, double delta, rs_classifier** out) {
  RS_REQUIRE(store && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new rs_classifier{std::make_unique<resistar::Classifier>(store->store, delta)}; });
}

rs_status rs_classify(const rs_classifier* classifier, const double* x, int dim, int* label) {
  RS_REQUIRE(classifier && x && label, "null argument");
  RS_REQUIRE(dim == classifier->classifier->store().grid().dim(), "point dimension does not match the store");
  return guarded([&] { *label = resistar::to_int(classifier->classifier->classify({x, static_cast<std::size_t>(dim)})); });
}

rs_status rs_classify_batch(const rs_classifier* classifier, const double* points, size_t count, int dim,
                            size_t workers, int* labels) {
  RS_REQUIRE(classifier && labels && (points || count == 0), "null argument");
  RS_REQUIRE(dim == classifier->classifier->store().grid().dim(), "point dimension does not match the store");
  return guarded([&] {
    const auto out = classifier->classifier->classify_batch({points, count * static_cast<std::size_t>(dim)}, workers);
    for (std::size_t i = 0; i < out.size(); ++i) labels[i] = resistar::to_int(out[i]);
  });
}

void rs_classifier_free(rs_classifier* classifier) { delete classifier; }

rs_status rs_slice_axis(const rs_store* store, const int* axes, const double* values, size_t count, size_t workers,
                        rs_mesh** out) {
  RS_REQUIRE(store && out && ((axes && values) || count == 0), "null argument");
  *out = nullptr;
  return guarded([&] {
    const int d = store->store->grid().dim();
    std::vector<resistar::Hyperplane> planes;
    for (std::size_t i = 0; i < count; ++i) planes.push_back(resistar::Hyperplane::axis_aligned(d, axes[i] - 1, values[i]));
    if (d < 3 || static_cast<int>(planes.size()) != d - 3) {
      throw resistar::ContractViolation("slicing a d=" + std::to_string(d) + " store needs exactly " +
                                 std::to_string(std::max(d - 3, 0)) + " planes");
    }
    *out = new rs_mesh{resistar::slice(*store->store, planes, workers)};
  });
}

rs_status rs_mesh_polygon_count(const rs_mesh* mesh, size_t* count) {
  RS_REQUIRE(mesh && count, "null argument");
  *count = mesh->mesh.polygons.size();
  return RS_OK;
}

rs_status rs_mesh_export(const rs_mesh* mesh, const char* format, const char* path) {
  RS_REQUIRE(mesh && format && path, "null argument");
  return guarded([&] {
    const auto f = resistar::mesh_format_from_string(format);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw resistar::IoError(std::string("cannot open ") + path + " for writing");
    resistar::export_mesh(mesh->mesh, f, out);
    out.flush();
    if (!out) throw resistar::IoError(std::string("failed writing ") + path);
  });
}

void rs_mesh_free(rs_mesh* mesh) { delete mesh; }

rs_status rs_evaluate_config_file(const char* config_path, const char* report_path, const char* slopes_path,
                                  size_t workers) {
  RS_REQUIRE(config_path && report_path, "null argument");
  return guarded([&] {
    resistar::EvalConfig config = resistar::load_eval_config(config_path);
    if (workers != 0) config.workers = workers;
    const resistar::EvalReport report = resistar::scan(config);
    auto write = [&](const char* path, auto writer) {
      std::ofstream out(path, std::ios::binary);
      if (!out) throw resistar::IoError(std::string("cannot open ") + path + " for writing");
      writer(report, out);
      out.flush();
      if (!out) throw resistar::IoError(std::string("failed writing ") + path);
    };
    write(report_path, resistar::write_report_csv);
    if (slopes_path != nullptr) write(slopes_path, resistar::write_slopes_csv);
  });
}

}  // extern "C"
