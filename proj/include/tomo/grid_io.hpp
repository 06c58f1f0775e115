#pragma once

#include <filesystem>

#include "tomo/geometry.hpp"

namespace tomo {

/// Sidecar path for a grid binary: "img.bin" -> "img.bin.json".
std::filesystem::path sidecar_path(const std::filesystem::path& bin);

/// Little-endian float32, row-major, plus the JSON sidecar
/// {nx, ny, dx, dy, origin_x, origin_y}.
void save_grid(const Grid2D& grid, const std::filesystem::path& bin);
Grid2D load_grid(const std::filesystem::path& bin);

/// 8-bit binary PGM, min-max normalized, top row = largest y.
void save_pgm(const Grid2D& grid, const std::filesystem::path& path);

}  // namespace tomo
