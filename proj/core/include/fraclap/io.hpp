#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "fraclap/grid.hpp"

namespace fraclap {

// Formats a double so that equal values always produce identical text and
// round-trip exactly (shortest representation, %.17g fallback).
std::string format_double(double v);

// Write via temp file + rename so no partially written file is observable.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// Flat little-endian float64 dump (row-major by axis) plus a JSON sidecar
// "<path>.json" describing shape, spacing and ordering.
void dump_field(const std::filesystem::path& path, const Field& u);
Field load_field_dump(const std::filesystem::path& path);

}  // namespace fraclap
