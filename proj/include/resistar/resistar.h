#ifndef RESISTAR_H
#define RESISTAR_H

/* C interface to the resistar library. Every function returns an rs_status;
 * on failure rs_last_error() describes the problem (per thread). Handles are
 * opaque and released with the matching *_free function. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RS_API __declspec(dllexport)
#else
#define RS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rs_status {
  RS_OK = 0,
  RS_ERR_INVALID_ARGUMENT = 1, /* null handle or pointer, bad size */
  RS_ERR_USAGE = 2,            /* unknown format tag, bad plane spec, cap exceeded */
  RS_ERR_DATA = 3,             /* malformed file or config, contract violation */
  RS_ERR_DOMAIN = 4,           /* point or parameter outside its domain */
  RS_ERR_IO = 5,
  RS_ERR_INTERNAL = 6
} rs_status;

typedef enum rs_variant { RS_VARIANT_CUBE = 0, RS_VARIANT_KUHN = 1 } rs_variant;

typedef struct rs_oracle rs_oracle;
typedef struct rs_store rs_store;
typedef struct rs_classifier rs_classifier;
typedef struct rs_mesh rs_mesh;

RS_API const char* rs_last_error(void);
RS_API const char* rs_status_name(rs_status status);
RS_API const char* rs_version(void);

/* Oracles. default_dim (0 for none) fills a missing "dim" of radial_random. */
RS_API rs_status rs_oracle_from_json(const char* json, int default_dim, rs_oracle** out);
RS_API rs_status rs_oracle_from_file(const char* path, int default_dim, rs_oracle** out);
/* fn returns the sign (-1, 0, +1) of the point; it may be called concurrently. */
typedef int (*rs_label_fn)(const double* x, int dim, void* user);
RS_API rs_status rs_oracle_from_callback(int dim, rs_label_fn fn, void* user, const char* digest, rs_oracle** out);
RS_API rs_status rs_oracle_dim(const rs_oracle* oracle, int* dim);
RS_API rs_status rs_oracle_evaluate(const rs_oracle* oracle, const double* x, int dim, int* label);
RS_API rs_status rs_oracle_calls(const rs_oracle* oracle, uint64_t* calls);
RS_API void rs_oracle_free(rs_oracle* oracle);

/* Boundary stores. */
typedef struct rs_build_options {
  int points_per_axis;
  int variant;             /* rs_variant */
  int q;                   /* 0: ceil(log2(n_G - 1)) */
  int diagonal_refinement; /* Kuhn only */
  size_t workers;          /* 0: hardware concurrency */
} rs_build_options;

typedef struct rs_store_info {
  int dim;
  int points_per_axis;
  int q;
  int variant;
  int diagonal_refinement;
  int fallback_label;
  uint64_t cubes;
  uint64_t point_incidences;
  char oracle_digest[65];
} rs_store_info;

typedef struct rs_count {
  uint64_t boundary_points;
  uint64_t point_incidences;
  uint64_t simplices;
} rs_count;

typedef struct rs_watertight_report {
  uint64_t simplices;
  uint64_t facets;
  uint64_t interior_facets;
  uint64_t bad_facets;
  int max_incidence;
  int64_t euler_characteristic;
  int watertight;
} rs_watertight_report;

RS_API rs_status rs_store_build(const rs_oracle* oracle, const rs_build_options* options, rs_store** out);
/* The format follows the extension: ".json" text, anything else binary. */
RS_API rs_status rs_store_load(const char* path, rs_store** out);
RS_API rs_status rs_store_save(const rs_store* store, const char* path);
RS_API rs_status rs_store_info_get(const rs_store* store, rs_store_info* info);
RS_API rs_status rs_store_count(const rs_store* store, rs_count* count);
RS_API rs_status rs_store_count_streamed(const rs_store* store, size_t workers, uint64_t* simplices);
/* cap 0 selects the default dimension cap (4). */
RS_API rs_status rs_store_watertight(const rs_store* store, int cap, rs_watertight_report* report);
RS_API void rs_store_free(rs_store* store);

/* Classification. The classifier keeps the store alive on its own. */
RS_API rs_status rs_classifier_create(const rs_store* store, double delta, rs_classifier** out);
RS_API rs_status rs_classify(const rs_classifier* classifier, const double* x, int dim, int* label);
/* points: count rows of dim doubles; labels: count ints. */
RS_API rs_status rs_classify_batch(const rs_classifier* classifier, const double* points, size_t count, int dim,
                                   size_t workers, int* labels);
RS_API void rs_classifier_free(rs_classifier* classifier);

/* Slicing by axis-aligned planes x_{axes[i]} = values[i], axes 1-based. */
RS_API rs_status rs_slice_axis(const rs_store* store, const int* axes, const double* values, size_t count,
                               size_t workers, rs_mesh** out);
RS_API rs_status rs_mesh_polygon_count(const rs_mesh* mesh, size_t* count);
/* format: "obj" or "json". */
RS_API rs_status rs_mesh_export(const rs_mesh* mesh, const char* format, const char* path);
RS_API void rs_mesh_free(rs_mesh* mesh);

/* Runs an evaluation scan; slopes_path may be null. workers 0 keeps the config's value. */
RS_API rs_status rs_evaluate_config_file(const char* config_path, const char* report_path, const char* slopes_path,
                                         size_t workers);

#ifdef __cplusplus
}
#endif

#endif
