#include "resistar/store_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "resistar/errors.hpp"

namespace resistar {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'T', 'R'};

template <class T>
void put(std::ostream& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<unsigned char>(u & 0xFFU);
    u = static_cast<U>(u >> 8);
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

void put_double(std::ostream& out, double v) { put(out, std::bit_cast<std::uint64_t>(v)); }

template <class T>
T get(std::istream& in) {
  using U = std::make_unsigned_t<T>;
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw FormatError("store file truncated");
  U u = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) u = static_cast<U>((u << 8) | bytes[i]);
  return static_cast<T>(u);
}

double get_double(std::istream& in) { return std::bit_cast<double>(get<std::uint64_t>(in)); }

Label fallback_from_int(int v) {
  if (v != -1 && v != 1) throw FormatError("store fallback label must be -1 or +1");
  return label_from_int(v);
}

std::uint64_t global_vertex(const GridSpec& grid, const MultiIndex& cube, VertexMask mask) {
  std::uint64_t v = 0;
  for (int k = 0; k < grid.dim(); ++k) {
    v += static_cast<std::uint64_t>(cube[k] + static_cast<int>((mask >> k) & 1U)) * grid.vertex_stride(k);
  }
  return v;
}

VertexMask local_mask(const GridSpec& grid, const MultiIndex& cube, std::uint64_t vertex) {
  if (vertex >= grid.vertex_count()) throw FormatError("store vertex id out of range");
  const MultiIndex v = grid.vertex_index(VertexId{vertex});
  VertexMask mask = 0;
  for (int k = 0; k < grid.dim(); ++k) {
    const int diff = v[k] - cube[k];
    if (diff == 1) mask |= VertexMask{1} << k;
    else if (diff != 0) throw FormatError("store point endpoint is not a vertex of its cube");
  }
  return mask;
}

GridSpec checked_grid(std::int64_t d, std::int64_t n) {
  if (d < 1 || d > kMaxDimension) throw FormatError("store dimension out of range");
  if (n < 2 || n > (std::int64_t{1} << 30)) throw FormatError("store grid size out of range");
  try {
    return GridSpec(static_cast<int>(d), static_cast<int>(n));
  } catch (const DomainError& e) {
    throw FormatError(std::string("store grid: ") + e.what());
  }
}

MultiIndex checked_cube(const GridSpec& grid, MultiIndex index) {
  if (static_cast<int>(index.size()) != grid.dim() || !grid.valid_cube(index)) {
    throw FormatError("store cube index out of range");
  }
  return index;
}

}  // namespace

StoreFormat store_format_for_path(const std::string& path) {
  const std::string ext = ".json";
  if (path.size() >= ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0) {
    return StoreFormat::Json;
  }
  return StoreFormat::Binary;
}

void write_store_binary(const BoundaryStore& store, std::ostream& out) {
  const GridSpec& grid = store.grid();
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kStoreFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.points_per_axis()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(store.q()));
  put<std::uint8_t>(out, store.variant() == Variant::Cube ? 0 : 1);
  put<std::uint8_t>(out, store.diagonal_refinement() ? 1 : 0);
  put<std::int8_t>(out, static_cast<std::int8_t>(to_int(store.fallback_label())));
  put<std::uint8_t>(out, 0);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(store.oracle_digest().size()));
  out.write(store.oracle_digest().data(), static_cast<std::streamsize>(store.oracle_digest().size()));
  put<std::uint64_t>(out, store.cubes().size());
  for (const CubeBoundary& c : store.cubes()) {
    const MultiIndex index = grid.cube_index(c.cube);
    for (int k : index) put<std::uint32_t>(out, static_cast<std::uint32_t>(k));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(c.points.size()));
    for (const BoundaryPoint& b : c.points) {
      put<std::uint64_t>(out, global_vertex(grid, index, b.minus));
      put<std::uint64_t>(out, global_vertex(grid, index, b.plus));
      put_double(out, b.t);
    }
  }
  if (!out) throw IoError("failed writing store");
}

BoundaryStore read_store_binary(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw FormatError("not a resistar store file");
  const auto version = get<std::uint32_t>(in);
  if (version != kStoreFormatVersion) {
    throw FormatError("unsupported store format version " + std::to_string(version));
  }
  const auto d = get<std::uint32_t>(in);
  const auto n = get<std::uint32_t>(in);
  const GridSpec grid = checked_grid(d, n);
  const auto q = get<std::uint32_t>(in);
  if (q < 1 || q > 62) throw FormatError("store dichotomy count out of range");
  const auto variant_code = get<std::uint8_t>(in);
  if (variant_code > 1) throw FormatError("unknown store variant code");
  const auto diag = get<std::uint8_t>(in);
  const Label fallback = fallback_from_int(get<std::int8_t>(in));
  (void)get<std::uint8_t>(in);
  const auto digest_len = get<std::uint32_t>(in);
  if (digest_len > 4096) throw FormatError("store digest too long");
  std::string digest(digest_len, '\0');
  if (digest_len > 0 && !in.read(digest.data(), digest_len)) throw FormatError("store file truncated");
  const auto cube_count = get<std::uint64_t>(in);
  if (cube_count > grid.cube_count()) throw FormatError("store lists more cubes than the grid holds");

  std::vector<CubeBoundary> cubes;
  cubes.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(cube_count, 1U << 20)));
  for (std::uint64_t i = 0; i < cube_count; ++i) {
    MultiIndex index(grid.dim());
    for (int& k : index) k = static_cast<int>(std::min<std::uint32_t>(get<std::uint32_t>(in), 1U << 30));
    index = checked_cube(grid, std::move(index));
    const auto count = get<std::uint32_t>(in);
    CubeBoundary entry{grid.cube_id(index), {}};
    entry.points.reserve(std::min<std::uint32_t>(count, 1U << 16));
    for (std::uint32_t p = 0; p < count; ++p) {
      const auto vm = get<std::uint64_t>(in);
      const auto vp = get<std::uint64_t>(in);
      const double t = get_double(in);
      entry.points.push_back({local_mask(grid, index, vm), local_mask(grid, index, vp), t});
    }
    cubes.push_back(std::move(entry));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after store data");
  return BoundaryStore(grid, variant_code == 0 ? Variant::Cube : Variant::Kuhn, static_cast<int>(q),
                       std::move(digest), fallback, std::move(cubes), diag != 0);
}

nlohmann::json store_to_json(const BoundaryStore& store) {
  using nlohmann::json;
  const GridSpec& grid = store.grid();
  json cubes = json::array();
  for (const CubeBoundary& c : store.cubes()) {
    const MultiIndex index = grid.cube_index(c.cube);
    json points = json::array();
    for (const BoundaryPoint& b : c.points) {
      points.push_back(json::array({global_vertex(grid, index, b.minus), global_vertex(grid, index, b.plus), b.t}));
    }
    cubes.push_back({{"cube", index}, {"points", std::move(points)}});
  }
  return json{{"format", "resistar-store"},
              {"version", kStoreFormatVersion},
              {"d", grid.dim()},
              {"n_g", grid.points_per_axis()},
              {"q", store.q()},
              {"variant", std::string(to_string(store.variant()))},
              {"diagonal_refinement", store.diagonal_refinement()},
              {"fallback_label", to_int(store.fallback_label())},
              {"oracle_digest", store.oracle_digest()},
              {"cubes", std::move(cubes)}};
}

BoundaryStore store_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "resistar-store") throw FormatError("not a resistar store document");
    const auto version = j.at("version").get<std::uint32_t>();
    if (version != kStoreFormatVersion) {
      throw FormatError("unsupported store format version " + std::to_string(version));
    }
    const GridSpec grid = checked_grid(j.at("d").get<std::int64_t>(), j.at("n_g").get<std::int64_t>());
    const int q = j.at("q").get<int>();
    Variant variant;
    try {
      variant = variant_from_string(j.at("variant").get<std::string>());
    } catch (const UsageError& e) {
      throw FormatError(e.what());
    }
    std::vector<CubeBoundary> cubes;
    for (const auto& c : j.at("cubes")) {
      const MultiIndex index = checked_cube(grid, c.at("cube").get<MultiIndex>());
      CubeBoundary entry{grid.cube_id(index), {}};
      for (const auto& p : c.at("points")) {
        if (!p.is_array() || p.size() != 3) throw FormatError("store point must be [v_minus, v_plus, t]");
        entry.points.push_back({local_mask(grid, index, p[0].get<std::uint64_t>()),
                                local_mask(grid, index, p[1].get<std::uint64_t>()), p[2].get<double>()});
      }
      cubes.push_back(std::move(entry));
    }
    return BoundaryStore(grid, variant, q, j.at("oracle_digest").get<std::string>(),
                         fallback_from_int(j.at("fallback_label").get<int>()), std::move(cubes),
                         j.value("diagonal_refinement", false));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid store document: ") + e.what());
  }
}

void save_store(const BoundaryStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  if (store_format_for_path(path) == StoreFormat::Json) {
    out << store_to_json(store).dump(1) << '\n';
  } else {
    write_store_binary(store, out);
  }
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

BoundaryStore load_store(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  if (store_format_for_path(path) == StoreFormat::Json) {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path + ": " + e.what());
    }
    return store_from_json(j);
  }
  return read_store_binary(in);
}

}  // namespace resistar
