// Command-line front end; talks to the library only through the C API.

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "resistar/resistar.h"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct CliError {
  int code;
  std::string message;
};

void check(rs_status status) {
  if (status == RS_OK) return;
  const int code = (status == RS_ERR_USAGE || status == RS_ERR_INVALID_ARGUMENT) ? kExitUsage : kExitData;
  throw CliError{code, std::string(rs_status_name(status)) + ": " + rs_last_error()};
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using OracleHandle = Handle<rs_oracle, rs_oracle_free>;
using StoreHandle = Handle<rs_store, rs_store_free>;
using ClassifierHandle = Handle<rs_classifier, rs_classifier_free>;
using MeshHandle = Handle<rs_mesh, rs_mesh_free>;

const char* variant_name(int v) { return v == RS_VARIANT_CUBE ? "cube" : "kuhn"; }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size();
}

// d columns per row; a first row that is not numeric is taken as a header.
std::vector<double> read_points(const std::string& path, int dim, std::size_t& count) {
  std::ifstream in(path);
  if (!in) throw CliError{kExitData, "cannot open " + path};
  std::vector<double> coords;
  std::string line;
  std::size_t line_no = 0;
  count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    std::vector<double> row;
    bool numeric = true;
    for (const auto& c : cells) {
      double v;
      if (!parse_double(c, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (count == 0 && coords.empty() && line_no == 1) continue;  // header
      throw CliError{kExitData, path + ":" + std::to_string(line_no) + ": non-numeric value"};
    }
    if (static_cast<int>(row.size()) != dim) {
      throw CliError{kExitData, path + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                                    " columns, found " + std::to_string(row.size())};
    }
    coords.insert(coords.end(), row.begin(), row.end());
    ++count;
  }
  return coords;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CliError{kExitData, "cannot open " + path + " for writing"};
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Manifold approximation by recursive simplex stars on a regular grid"};
  app.require_subcommand(1);

  // build
  std::string oracle_path, store_out, variant = "cube";
  int dim = 0, points_per_axis = 0, q = 0;
  bool diagonal = false;
  std::size_t workers = 0;
  auto* build = app.add_subcommand("build", "Compute the boundary store of an oracle on a grid");
  build->add_option("--oracle", oracle_path, "Oracle spec (JSON)")->required()->check(CLI::ExistingFile);
  build->add_option("--d", dim, "Dimension (fills a missing dim; must match the oracle)");
  build->add_option("--ng", points_per_axis, "Grid points per axis")->required()->check(CLI::Range(2, 1 << 30));
  build->add_option("--q", q, "Dichotomies per edge (0: ceil(log2(n_G - 1)))")->check(CLI::Range(0, 52));
  build->add_option("--variant", variant, "cube or kuhn")->check(CLI::IsMember({"cube", "kuhn"}));
  build->add_flag("--diagonal-refinement", diagonal, "Kuhn: extra dichotomies on long diagonals");
  build->add_option("--workers", workers, "Worker threads (0: all cores)");
  build->add_option("--out", store_out, "Store file (.rsb binary, .json text)")->required();

  // classify
  std::string store_path, points_path, labels_out;
  double delta = 1e-5;
  auto* classify = app.add_subcommand("classify", "Classify points against a store");
  classify->add_option("--store", store_path, "Store file")->required()->check(CLI::ExistingFile);
  classify->add_option("--points", points_path, "CSV, d coordinates per row, optional header")
      ->required()
      ->check(CLI::ExistingFile);
  classify->add_option("--out", labels_out, "CSV with columns index,label (label in -1,0,1)")->required();
  classify->add_option("--delta", delta, "Distance below which a point is labelled 0");
  classify->add_option("--workers", workers, "Worker threads (0: all cores)");

  // evaluate
  std::string config_path, report_out, slopes_out;
  auto* evaluate = app.add_subcommand(
      "evaluate",
      "Run an evaluation scan. report.csv columns: d,n_g,variant,oracle_seed,q,boundary_cubes,total_cubes,"
      "boundary_points,simplices,oracle_calls,samples,misclassified,zero_labels,error_pct_in_cubes,error_pct. "
      "Slopes file columns: d,variant,series,quantity,slope,r2,points");
  evaluate->add_option("--config", config_path, "Evaluation config (JSON)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--out", report_out, "Report CSV")->required();
  evaluate->add_option("--slopes", slopes_out, "Slope CSV (default: <out stem>_slopes.csv)");
  evaluate->add_option("--workers", workers, "Worker threads (0: as configured)");

  // count
  bool streamed = false;
  auto* count = app.add_subcommand("count", "Boundary point and simplex counts of a store (CSV to stdout)");
  count->add_option("--store", store_path, "Store file")->required()->check(CLI::ExistingFile);
  count->add_flag("--streamed", streamed, "Also count simplices by explicit enumeration");
  count->add_option("--workers", workers, "Worker threads (0: all cores)");

  // slice
  std::vector<std::string> planes;
  std::string format = "obj", mesh_out;
  auto* slice = app.add_subcommand("slice", "Cut the approximation by d-3 axis-aligned planes");
  slice->add_option("--store", store_path, "Store file")->required()->check(CLI::ExistingFile);
  slice->add_option("--plane", planes, "axis=value, axis 1-based (repeat d-3 times)");
  slice->add_option("--format", format, "obj or json");
  slice->add_option("--out", mesh_out, "Mesh file")->required();
  slice->add_option("--workers", workers, "Worker threads (0: all cores)");

  // watertight
  int cap = 0;
  auto* watertight = app.add_subcommand("watertight", "Facet incidence census of the enumerated simplices");
  watertight->add_option("--store", store_path, "Store file")->required()->check(CLI::ExistingFile);
  watertight->add_option("--cap", cap, "Largest dimension to enumerate (0: default 4)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*build) {
      OracleHandle oracle;
      check(rs_oracle_from_file(oracle_path.c_str(), dim, oracle.out()));
      int oracle_dim = 0;
      check(rs_oracle_dim(oracle.get(), &oracle_dim));
      if (dim != 0 && dim != oracle_dim) {
        throw CliError{kExitUsage, "--d " + std::to_string(dim) + " does not match the oracle dimension " +
                                       std::to_string(oracle_dim)};
      }
      rs_build_options options{points_per_axis, variant == "cube" ? RS_VARIANT_CUBE : RS_VARIANT_KUHN, q,
                               diagonal ? 1 : 0, workers};
      StoreHandle store;
      check(rs_store_build(oracle.get(), &options, store.out()));
      check(rs_store_save(store.get(), store_out.c_str()));
      rs_store_info info;
      check(rs_store_info_get(store.get(), &info));
      uint64_t calls = 0;
      check(rs_oracle_calls(oracle.get(), &calls));
      std::cout << "d=" << info.dim << " n_g=" << info.points_per_axis << " q=" << info.q
                << " variant=" << variant_name(info.variant) << " cubes=" << info.cubes
                << " point_incidences=" << info.point_incidences << " oracle_calls=" << calls << '\n';
    } else if (*classify) {
      StoreHandle store;
      check(rs_store_load(store_path.c_str(), store.out()));
      rs_store_info info;
      check(rs_store_info_get(store.get(), &info));
      std::size_t n = 0;
      const std::vector<double> coords = read_points(points_path, info.dim, n);
      ClassifierHandle classifier;
      check(rs_classifier_create(store.get(), delta, classifier.out()));
      std::vector<int> labels(n);
      check(rs_classify_batch(classifier.get(), coords.data(), n, info.dim, workers, labels.data()));
      auto out = open_out(labels_out);
      out << "index,label\n";
      for (std::size_t i = 0; i < n; ++i) out << i << ',' << labels[i] << '\n';
      if (!out) throw CliError{kExitData, "failed writing " + labels_out};
    } else if (*evaluate) {
      if (slopes_out.empty()) {
        const auto dot = report_out.rfind('.');
        const auto slash = report_out.find_last_of('/');
        const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
        slopes_out = (has_ext ? report_out.substr(0, dot) : report_out) + "_slopes.csv";
      }
      check(rs_evaluate_config_file(config_path.c_str(), report_out.c_str(), slopes_out.c_str(), workers));
    } else if (*count) {
      StoreHandle store;
      check(rs_store_load(store_path.c_str(), store.out()));
      rs_store_info info;
      check(rs_store_info_get(store.get(), &info));
      rs_count c;
      check(rs_store_count(store.get(), &c));
      std::cout << "d,n_g,variant,q,boundary_cubes,boundary_points,point_incidences,simplices";
      if (streamed) std::cout << ",simplices_streamed";
      std::cout << '\n'
                << info.dim << ',' << info.points_per_axis << ',' << variant_name(info.variant) << ',' << info.q << ','
                << info.cubes << ',' << c.boundary_points << ',' << c.point_incidences << ',' << c.simplices;
      if (streamed) {
        uint64_t s = 0;
        check(rs_store_count_streamed(store.get(), workers, &s));
        std::cout << ',' << s;
      }
      std::cout << '\n';
    } else if (*slice) {
      StoreHandle store;
      check(rs_store_load(store_path.c_str(), store.out()));
      rs_store_info info;
      check(rs_store_info_get(store.get(), &info));
      std::vector<int> axes;
      std::vector<double> values;
      for (const std::string& p : planes) {
        const auto eq = p.find('=');
        std::string axis = eq == std::string::npos ? std::string() : p.substr(0, eq);
        if (!axis.empty() && (axis[0] == 'x' || axis[0] == 'X')) axis.erase(0, 1);
        double a = 0, v = 0;
        if (eq == std::string::npos || !parse_double(axis, a) || !parse_double(p.substr(eq + 1), v) ||
            a != static_cast<int>(a)) {
          throw CliError{kExitUsage, "plane must look like axis=value: " + p};
        }
        axes.push_back(static_cast<int>(a));
        values.push_back(v);
      }
      MeshHandle mesh;
      check(rs_slice_axis(store.get(), axes.data(), values.data(), axes.size(), workers, mesh.out()));
      check(rs_mesh_export(mesh.get(), format.c_str(), mesh_out.c_str()));
      std::size_t polygons = 0;
      check(rs_mesh_polygon_count(mesh.get(), &polygons));
      std::cout << "polygons=" << polygons << '\n';
    } else if (*watertight) {
      StoreHandle store;
      check(rs_store_load(store_path.c_str(), store.out()));
      rs_watertight_report r;
      check(rs_store_watertight(store.get(), cap, &r));
      std::cout << "simplices=" << r.simplices << " facets=" << r.facets << " interior_facets=" << r.interior_facets
                << " bad_facets=" << r.bad_facets << " max_incidence=" << r.max_incidence
                << " euler=" << r.euler_characteristic << " watertight=" << (r.watertight ? "yes" : "no") << '\n';
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  }
  return 0;
}
