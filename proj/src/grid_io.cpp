#include "tomo/grid_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "tomo/error.hpp"

namespace tomo {

namespace {

std::uint32_t to_le(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::big) return __builtin_bswap32(v);
    return v;
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& bin) {
    auto p = bin;
    p += ".json";
    return p;
}

void save_grid(const Grid2D& grid, const std::filesystem::path& bin) {
    grid.validate();
    std::ofstream out(bin, std::ios::binary);
    if (!out) throw IoError("cannot open " + bin.string() + " for writing");
    for (double v : grid.values) {
        const float f = static_cast<float>(v);
        std::uint32_t bits = 0;
        std::memcpy(&bits, &f, sizeof bits);
        bits = to_le(bits);
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    if (!out) throw IoError("write failed for " + bin.string());

    const nlohmann::json meta = {{"nx", grid.nx},         {"ny", grid.ny},
                                 {"dx", grid.dx},         {"dy", grid.dy},
                                 {"origin_x", grid.origin.x}, {"origin_y", grid.origin.y}};
    std::ofstream side(sidecar_path(bin));
    if (!side) throw IoError("cannot write sidecar for " + bin.string());
    side << meta.dump(2) << '\n';
}

Grid2D load_grid(const std::filesystem::path& bin) {
    std::ifstream side(sidecar_path(bin));
    if (!side) throw IoError("missing sidecar " + sidecar_path(bin).string());
    nlohmann::json meta;
    try {
        side >> meta;
        Grid2D grid(meta.at("nx").get<std::size_t>(), meta.at("ny").get<std::size_t>(),
                    meta.at("dx").get<double>(), meta.at("dy").get<double>(),
                    {meta.at("origin_x").get<double>(), meta.at("origin_y").get<double>()});
        std::ifstream in(bin, std::ios::binary);
        if (!in) throw IoError("cannot open " + bin.string());
        for (double& v : grid.values) {
            std::uint32_t bits = 0;
            if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits))
                throw IoError(bin.string() + " is shorter than its sidecar declares");
            bits = to_le(bits);
            float f = 0.0f;
            std::memcpy(&f, &bits, sizeof f);
            v = f;
        }
        grid.validate();
        return grid;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed sidecar for " + bin.string() + ": " + e.what());
    }
}

void save_pgm(const Grid2D& grid, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string());
    const auto [lo, hi] = std::minmax_element(grid.values.begin(), grid.values.end());
    const double span = (*hi > *lo) ? *hi - *lo : 1.0;
    out << "P5\n" << grid.nx << ' ' << grid.ny << "\n255\n";
    for (std::size_t r = 0; r < grid.ny; ++r) {
        const std::size_t j = grid.ny - 1 - r;
        for (std::size_t i = 0; i < grid.nx; ++i) {
            const double t = (grid.at(i, j) - *lo) / span;
            out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t))));
        }
    }
}

}  // namespace tomo
