#pragma once

// Persistence of a BoundaryStore.
//
// Binary layout (.rsb, little-endian):
//   "RSTR" u32 version u32 d u32 n_G u32 q u8 variant u8 diagonal_refinement
//   i8 fallback_label u8 reserved u32 digest_len digest_bytes u64 cube_count
//   per cube: d x u32 multi-index, u32 count,
//     per point: u64 v_minus, u64 v_plus (global vertex ids), f64 t
//
// The text rendering is JSON with the same content; doubles round-trip exactly.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "resistar/boundary.hpp"

namespace resistar {

inline constexpr std::uint32_t kStoreFormatVersion = 1;

enum class StoreFormat { Binary, Json };

/// ".json" selects Json, anything else Binary.
StoreFormat store_format_for_path(const std::string& path);

void write_store_binary(const BoundaryStore& store, std::ostream& out);
BoundaryStore read_store_binary(std::istream& in);

nlohmann::json store_to_json(const BoundaryStore& store);
BoundaryStore store_from_json(const nlohmann::json& j);

void save_store(const BoundaryStore& store, const std::string& path);
BoundaryStore load_store(const std::string& path);

}  // namespace resistar
